//! Rank-3 points of the Gram family.
//!
//! `G(λ)` has rank at most 3 exactly when some 3-dimensional subspace lies in
//! its kernel. Writing that subspace as the column span of `F·[K; I₃]` for a
//! fixed invertible frame `F` turns the rank condition into the bilinear
//! system `G(λ)·F·[K; I₃] = 0`: 18 equations in the 15 unknowns `(λ, K)`.
//! Random complex starts are driven to solutions by Gauss–Newton, deduplicated,
//! and classified by reality and signature.

use nalgebra::{ComplexField, DMatrix, DVector, Matrix3, Matrix6, Matrix6x3, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gram::{kernel_matrix, GramFamily, GramPoint, Reality, Signature};
use crate::newton::{gauss_newton, LeastSquaresSystem, NewtonOptions};
use crate::scalar::{FromRational, Magnitude};
use crate::symmat::SymMatrix6;

/// Singular values and eigenvalues below this (relative to the largest) are zero.
pub const RANK_TOL: f64 = 1e-8;

const CHART_BLOWUP: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub restarts: usize,
    pub newton_max_iters: usize,
    pub convergence_tol: f64,
    pub dedup_tol: f64,
    pub real_tol: f64,
    pub master_seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            restarts: 20_000,
            newton_max_iters: 100,
            convergence_tol: 1e-12,
            dedup_tol: 1e-6,
            real_tol: 1e-8,
            master_seed: 0,
        }
    }
}

impl SolveConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { master_seed: seed, ..Self::default() }
    }

    pub fn is_consistent(&self) -> bool {
        self.convergence_tol < self.real_tol && self.real_tol < self.dedup_tol
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub complex_total: usize,
    pub real_total: usize,
    pub psd_total: usize,
}

impl Counts {
    pub const SMOOTH_NONNEGATIVE: Counts = Counts { complex_total: 63, real_total: 15, psd_total: 8 };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub points: Vec<GramPoint>,
    pub counts: Counts,
    pub budget_exhausted: bool,
    pub config: SolveConfig,
    /// Restarts whose Gauss–Newton run converged to a rank-3 point.
    pub converged_restarts: usize,
}

impl SolutionSet {
    /// Non-real points whose conjugate is absent from the set.
    pub fn unpaired_conjugates(&self) -> Vec<usize> {
        let complex: Vec<(usize, &GramPoint)> =
            self.points.iter().enumerate().filter(|(_, p)| !p.is_real()).collect();
        complex
            .iter()
            .filter(|(_, p)| {
                let conj = p.lambda.map(|l| l.conj());
                !complex.iter().any(|(_, q)| lambda_distance(&conj, &q.lambda) <= self.config.dedup_tol * lambda_norm(&q.lambda).max(1.0))
            })
            .map(|(i, _)| *i)
            .collect()
    }

    pub fn is_conjugation_closed(&self) -> bool {
        self.unpaired_conjugates().is_empty()
    }

    /// Smallest pairwise λ-distance among the points.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.min(lambda_distance(&p.lambda, &q.lambda));
            }
        }
        best
    }
}

fn lambda_norm(lambda: &[Complex64; 6]) -> f64 {
    lambda.iter().map(|l| l.norm_sqr()).sum::<f64>().sqrt()
}

pub fn lambda_distance(a: &[Complex64; 6], b: &[Complex64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `G(λ)·[K; I₃]` flattened row-major (18 entries).
pub fn residual_system(family: &GramFamily, lambda: &[Complex64; 6], k: &Matrix3<Complex64>) -> [Complex64; 18] {
    let g = family.matrix_at(lambda).to_matrix();
    let mut n = Matrix6x3::zeros();
    n.fixed_view_mut::<3, 3>(0, 0).copy_from(k);
    n.fixed_view_mut::<3, 3>(3, 0).copy_from(&Matrix3::identity());
    let r = g * n;
    std::array::from_fn(|idx| r[(idx / 3, idx % 3)])
}

/// The kernel-chart system for a fixed frame.
struct KernelChart<T: ComplexField> {
    base: Matrix6<T>,
    basis: [Matrix6<T>; 6],
    frame: Matrix6<T>,
}

impl<T: ComplexField<RealField = f64> + Copy> KernelChart<T> {
    fn new(base: Matrix6<T>, frame: Matrix6<T>) -> Self {
        let basis = std::array::from_fn(|k| kernel_matrix::<f64>(k).to_matrix().map(T::from_real));
        Self { base, basis, frame }
    }

    fn gram(&self, x: &DVector<T>) -> Matrix6<T> {
        let mut g = self.base;
        for k in 0..6 {
            g += self.basis[k] * x[k];
        }
        g
    }

    fn kernel_frame(&self, x: &DVector<T>) -> Matrix6x3<T> {
        let k = Matrix3::from_fn(|a, b| x[6 + 3 * a + b]);
        self.frame.fixed_view::<6, 3>(0, 0) * k + self.frame.fixed_view::<6, 3>(0, 3)
    }
}

impl<T: ComplexField<RealField = f64> + Copy> LeastSquaresSystem<T> for KernelChart<T> {
    fn evaluate(&self, x: &DVector<T>) -> (DVector<T>, DMatrix<T>) {
        let g = self.gram(x);
        let n = self.kernel_frame(x);
        let r = g * n;
        let residual = DVector::from_fn(18, |idx, _| r[(idx / 3, idx % 3)]);
        let mut jac = DMatrix::zeros(18, 15);
        for k in 0..6 {
            let d = self.basis[k] * n;
            for idx in 0..18 {
                jac[(idx, k)] = d[(idx / 3, idx % 3)];
            }
        }
        let gf = g * self.frame.fixed_view::<6, 3>(0, 0);
        for i in 0..6 {
            for a in 0..3 {
                for b in 0..3 {
                    jac[(3 * i + b, 6 + 3 * a + b)] = gf[(i, a)];
                }
            }
        }
        (residual, jac)
    }

    /// Residual relative to the size of the kernel frame, so that the
    /// measure does not depend on how the chart scales `K`.
    fn measure(&self, x: &DVector<T>, residual: &DVector<T>) -> f64 {
        residual.norm() / self.kernel_frame(x).norm().max(1.0)
    }
}

/// Three charts: the identity block sits on rows (3,4,5), (4,5,0), (5,0,1).
fn chart_permutation<T: ComplexField>(chart: usize) -> Matrix6<T> {
    let mut p = Matrix6::zeros();
    for col in 0..6 {
        p[((col + 3 + chart) % 6, col)] = T::one();
    }
    p
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for task `index` under `master_seed`.
pub fn task_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master_seed ^ splitmix64(index)))
}

#[derive(Clone, Debug)]
struct Accepted {
    restart: usize,
    lambda: [Complex64; 6],
    residual: f64,
}

/// Solver state shared by all restarts: the family scaled to unit max
/// coefficient, so tolerances are independent of the size of `f`.
struct Problem {
    scale: f64,
    base: Matrix6<Complex64>,
    base_real: Matrix6<f64>,
}

impl Problem {
    fn new(family: &GramFamily) -> Self {
        let scale = family.source().max_magnitude().max(f64::MIN_POSITIVE);
        let base_real = family.base().map(f64::from_rational).to_matrix() / scale;
        Self { scale, base: base_real.map(Complex64::from), base_real }
    }

    fn gram(&self, lambda: &[Complex64; 6]) -> Matrix6<Complex64> {
        let mut g = self.base;
        for (k, l) in lambda.iter().enumerate() {
            g += kernel_matrix::<f64>(k).to_matrix().map(Complex64::from) * *l;
        }
        g
    }

    fn restart(&self, index: usize, config: &SolveConfig) -> Option<Accepted> {
        let mut rng = task_rng(config.master_seed, index as u64);
        let lambda: [Complex64; 6] = std::array::from_fn(|_| complex_gaussian(&mut rng));
        let rotation = (index % 2 == 1).then(|| Matrix6::from_fn(|_, _| complex_gaussian(&mut rng)));
        let opts = NewtonOptions { max_iters: config.newton_max_iters, tol: config.convergence_tol, blowup: 1e8 };
        let first_chart = (index / 2) % 3;
        for attempt in 0..3 {
            let chart = (first_chart + attempt) % 3;
            let perm = chart_permutation::<Complex64>(chart);
            let frame = match &rotation {
                Some(r) => perm * r,
                None => perm,
            };
            let system = KernelChart::new(self.base, frame);
            let mut start = DVector::zeros(15);
            for k in 0..6 {
                start[k] = lambda[k];
            }
            for k in 6..15 {
                start[k] = complex_gaussian(&mut rng);
            }
            let run = gauss_newton(&system, start, &opts);
            if run.converged {
                let lambda: [Complex64; 6] = std::array::from_fn(|k| run.x[k]);
                if self.rank_ok(&self.gram(&lambda)) {
                    return Some(Accepted { restart: index, lambda, residual: run.residual });
                }
                return None;
            }
            let k_norm = run.x.rows(6, 9).norm();
            // only a blown-up K means this chart cannot see the kernel
            if run.residual.is_finite() && k_norm < CHART_BLOWUP {
                return None;
            }
        }
        None
    }

    fn rank_ok(&self, g: &Matrix6<Complex64>) -> bool {
        let sv = g.singular_values();
        let mut s: Vec<f64> = sv.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s[3] < RANK_TOL * s[0].max(1.0)
    }

    /// Re-solve in real arithmetic from the real part of a nearly real point.
    fn polish_real(&self, lambda: &[Complex64; 6], config: &SolveConfig) -> Option<[f64; 6]> {
        let re: [f64; 6] = lambda.map(|l| l.re);
        let mut g = self.base_real;
        for (k, l) in re.iter().enumerate() {
            g += kernel_matrix::<f64>(k).to_matrix() * *l;
        }
        // frame: approximate kernel in the last three columns, K starts at 0
        let eig = SymmetricEigen::new(g);
        let mut order: Vec<usize> = (0..6).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
        let frame = Matrix6::from_fn(|i, j| eig.eigenvectors[(i, order[j])]);
        let system = KernelChart::new(self.base_real, frame);
        let mut start = DVector::zeros(15);
        for k in 0..6 {
            start[k] = re[k];
        }
        let opts = NewtonOptions { max_iters: config.newton_max_iters, tol: config.convergence_tol, blowup: 1e8 };
        let run = gauss_newton(&system, start, &opts);
        if !run.converged {
            return None;
        }
        let polished: [f64; 6] = std::array::from_fn(|k| run.x[k]);
        let moved = polished.iter().zip(&re).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        (moved <= config.dedup_tol).then_some(polished)
    }
}

/// Single-linkage clusters of accepted points; each cluster is represented by
/// its member from the earliest restart.
fn cluster(mut accepted: Vec<Accepted>, tol: f64) -> Vec<Accepted> {
    let n = accepted.len();
    accepted.sort_by(|a, b| a.lambda[0].re.total_cmp(&b.lambda[0].re).then(a.restart.cmp(&b.restart)));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if accepted[j].lambda[0].re - accepted[i].lambda[0].re > tol {
                break;
            }
            if lambda_distance(&accepted[i].lambda, &accepted[j].lambda) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut reps: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        match reps[root] {
            Some(r) if accepted[r].restart <= accepted[i].restart => {}
            _ => reps[root] = Some(i),
        }
    }
    let mut out: Vec<Accepted> = reps.into_iter().flatten().map(|i| accepted[i].clone()).collect();
    out.sort_by_key(|a| a.restart);
    out
}

/// Find the rank-3 points of `family`.
pub fn solve_all(family: &GramFamily, config: &SolveConfig) -> SolutionSet {
    let problem = Problem::new(family);
    let accepted: Vec<Accepted> = (0..config.restarts)
        .into_par_iter()
        .filter_map(|i| problem.restart(i, config))
        .collect();
    let converged_restarts = accepted.len();
    let classes = cluster(accepted, config.dedup_tol);
    let late = config.restarts - config.restarts / 4;
    let budget_exhausted = classes.iter().any(|c| c.restart >= late);

    let mut points: Vec<GramPoint> = classes
        .par_iter()
        .map(|c| classify(family, &problem, c, config))
        .collect();
    points.sort_by(compare_points);

    let counts = Counts {
        complex_total: points.len(),
        real_total: points.iter().filter(|p| p.is_real()).count(),
        psd_total: points.iter().filter(|p| p.is_psd()).count(),
    };
    SolutionSet { points, counts, budget_exhausted, config: config.clone(), converged_restarts }
}

fn classify(family: &GramFamily, problem: &Problem, c: &Accepted, config: &SolveConfig) -> GramPoint {
    let near_real = c.lambda.iter().all(|l| l.im.abs() <= config.real_tol);
    let polished = if near_real { problem.polish_real(&c.lambda, config) } else { None };
    let (lambda_n, reality) = match polished {
        Some(re) => (re.map(Complex64::from), Reality::Real),
        None => (c.lambda, Reality::Complex),
    };
    let g_n = problem.gram(&lambda_n);
    let sv = g_n.singular_values();
    let top = sv.max().max(f64::MIN_POSITIVE);
    let numerical_rank = sv.iter().filter(|s| **s > RANK_TOL * top).count();
    let signature = (reality == Reality::Real).then(|| signature_of(&g_n.map(|v| v.re)));
    let lambda = lambda_n.map(|l| l * problem.scale);
    GramPoint {
        matrix: family.matrix_at(&lambda),
        lambda,
        numerical_rank,
        kernel_residual: c.residual,
        reality,
        signature,
    }
}

/// Eigenvalue signs of a real symmetric matrix, ignoring those below
/// [`RANK_TOL`] relative to the largest.
pub fn signature_of(g: &Matrix6<f64>) -> Signature {
    let eig = SymmetricEigen::new(*g);
    let top = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let positive = eig.eigenvalues.iter().filter(|e| **e > RANK_TOL * top).count();
    let negative = eig.eigenvalues.iter().filter(|e| **e < -RANK_TOL * top).count();
    Signature { positive, negative }
}

fn compare_points(a: &GramPoint, b: &GramPoint) -> std::cmp::Ordering {
    let sig = |p: &GramPoint| p.signature.map(|s| s.sort_key()).unwrap_or((usize::MAX, usize::MAX));
    a.reality
        .cmp(&b.reality)
        .then(sig(a).cmp(&sig(b)))
        .then_with(|| {
            let key = |p: &GramPoint| p.lambda.iter().map(|l| l.re).chain(p.lambda.iter().map(|l| l.im)).collect::<Vec<_>>();
            key(a).iter().zip(key(b).iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
}

/// Largest singular values of `G`, descending.
pub fn singular_values(g: &SymMatrix6<Complex64>) -> [f64; 6] {
    let sv = g.to_matrix().singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    std::array::from_fn(|i| s[i])
}

pub fn max_abs_imag(lambda: &[Complex64; 6]) -> f64 {
    lambda.iter().map(|l| l.im.abs()).fold(0.0, f64::max)
}

impl Magnitude for [Complex64; 6] {
    fn magnitude(&self) -> f64 {
        self.iter().map(|l| l.norm_sqr()).sum::<f64>().sqrt()
    }
}
