//! Hypotheses on the quartic: smoothness of the curve `f = 0`, non-negativity
//! of `f`, and basepoint-freeness of a triple of conics.

use nalgebra::{Cholesky, DMatrix, DVector, Matrix6, SMatrix, SVector, SymmetricEigen};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::form::{Form, QuadraticForm, TernaryQuartic};
use crate::gram::{kernel_matrix, GramFamily};
use crate::macaulay::{macaulay_quotient, perturbed_resultant};
use crate::newton::{gauss_newton, LeastSquaresSystem, NewtonOptions};
use crate::scalar::{rational_from_f64, FromRational};
use crate::solver::task_rng;
use crate::symmat::SymMatrix6;

/// Tolerance on eigenvalues and on `f` for the non-negativity decision,
/// applied to `f` scaled to unit max coefficient.
pub const PSD_TOL: f64 = 1e-8;

/// Residual below which a Newton point counts as a common zero.
pub const NEWTON_RESIDUAL_TOL: f64 = 1e-10;

const PRIORITIES: [[usize; 3]; 4] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothness {
    Smooth,
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscriminantSign {
    Zero,
    Nonzero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveStatus {
    pub smoothness: Smoothness,
    pub discriminant_sign: DiscriminantSign,
    /// Variable priority of the decisive Macaulay quotient.
    pub priority: [usize; 3],
    /// Whether the perturbed quotient was needed.
    pub perturbed: bool,
    /// Approximate singular point, for singular curves.
    pub witness: Option<[Complex64; 3]>,
}

impl CurveStatus {
    pub fn is_smooth(&self) -> bool {
        self.smoothness == Smoothness::Smooth
    }
}

/// Decide smoothness of `f = 0` from the exact resultant of its partials.
///
/// The plain Macaulay quotient is tried under four variable priorities; when
/// all of them are degenerate the perturbed quotient decides.
pub fn smoothness_test(f: &TernaryQuartic<BigRational>) -> CurveStatus {
    let gradient = f.gradient();
    let plain = PRIORITIES.iter().find_map(|&priority| {
        macaulay_quotient(&gradient, priority).resultant().map(|res| (res, priority, false))
    });
    let (res, priority, perturbed) =
        plain.unwrap_or_else(|| (perturbed_resultant(&gradient, PRIORITIES[0]), PRIORITIES[0], true));
    let (sign, smoothness) = if res.is_zero() {
        (DiscriminantSign::Zero, Smoothness::Singular)
    } else {
        (DiscriminantSign::Nonzero, Smoothness::Smooth)
    };
    let witness = (smoothness == Smoothness::Singular)
        .then(|| numeric_singularity_oracle(f, 200, 0).map(|w| w.point))
        .flatten();
    CurveStatus { smoothness, discriminant_sign: sign, priority, perturbed, witness }
}

/// A common zero found by Newton's method, with its residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonZero {
    pub point: [Complex64; 3],
    pub residual: f64,
}

/// Forms of equal degree that should vanish together, on a random affine chart.
struct CommonZeroSystem {
    forms: Vec<Form<Complex64>>,
    partials: Vec<[Form<Complex64>; 3]>,
    chart: [Complex64; 3],
}

impl CommonZeroSystem {
    fn new(forms: Vec<Form<Complex64>>, chart: [Complex64; 3]) -> Self {
        let partials = forms.iter().map(Form::gradient).collect();
        Self { forms, partials, chart }
    }
}

impl LeastSquaresSystem<Complex64> for CommonZeroSystem {
    fn evaluate(&self, x: &DVector<Complex64>) -> (DVector<Complex64>, DMatrix<Complex64>) {
        let p = [x[0], x[1], x[2]];
        let m = self.forms.len();
        let mut r = DVector::zeros(m + 1);
        let mut j = DMatrix::zeros(m + 1, 3);
        for (i, (form, grad)) in self.forms.iter().zip(&self.partials).enumerate() {
            r[i] = form.eval(&p);
            for v in 0..3 {
                j[(i, v)] = grad[v].eval(&p);
            }
        }
        r[m] = self.chart[0] * p[0] + self.chart[1] * p[1] + self.chart[2] * p[2] - Complex64::from(1.0);
        for v in 0..3 {
            j[(m, v)] = self.chart[v];
        }
        (r, j)
    }
}

fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Newton search for a common projective zero of `forms` (each scaled to unit
/// max coefficient) from `trials` random complex starts.
pub fn find_common_zero(forms: &[Form<Complex64>], trials: usize, seed: u64) -> Option<CommonZero> {
    let normalized: Vec<Form<Complex64>> = forms
        .iter()
        .filter(|f| !f.is_zero())
        .map(|f| f.scale(&Complex64::from(1.0 / f.max_magnitude())))
        .collect();
    if normalized.is_empty() {
        // every point is a common zero
        return Some(CommonZero { point: [Complex64::from(1.0), Complex64::zero(), Complex64::zero()], residual: 0.0 });
    }
    let opts = NewtonOptions { max_iters: 100, tol: NEWTON_RESIDUAL_TOL * 1e-2, blowup: 1e8 };
    (0..trials).find_map(|trial| {
        let mut rng = task_rng(seed, trial as u64);
        let start = [complex_normal(&mut rng), complex_normal(&mut rng), complex_normal(&mut rng)];
        let norm = start.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let start = start.map(|v| v / norm);
        // chart through the starting point: chart·start = 1
        let dir = [complex_normal(&mut rng), complex_normal(&mut rng), complex_normal(&mut rng)];
        let dot = dir[0] * start[0] + dir[1] * start[1] + dir[2] * start[2];
        let chart = dir.map(|d| d / dot);
        let system = CommonZeroSystem::new(normalized.clone(), chart);
        let run = gauss_newton(&system, DVector::from_row_slice(&start), &opts);
        let p = [run.x[0], run.x[1], run.x[2]];
        let scale = p.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !scale.is_finite() || scale == 0.0 {
            return None;
        }
        let unit = p.map(|v| v / scale);
        let residual = normalized.iter().map(|f| f.eval(&unit).norm()).fold(0.0, f64::max);
        (residual < NEWTON_RESIDUAL_TOL).then_some(CommonZero { point: unit, residual })
    })
}

/// Evidence of a singular point: a common zero of the three partials.
pub fn numeric_singularity_oracle(f: &TernaryQuartic<BigRational>, trials: usize, seed: u64) -> Option<CommonZero> {
    let gradient = f.gradient().map(|g| g.map(Complex64::from_rational));
    find_common_zero(&gradient, trials, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasepointStatus {
    pub basepoint_free: bool,
    pub witness: Option<CommonZero>,
}

/// Whether three conics have no common complex projective zero.
pub fn basepoint_check(forms: &[QuadraticForm<Complex64>; 3], seed: u64) -> BasepointStatus {
    let conics: Vec<Form<Complex64>> = forms.iter().map(QuadraticForm::to_form).collect();
    let witness = find_common_zero(&conics, 100, seed);
    BasepointStatus { basepoint_free: witness.is_none(), witness }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonnegativity {
    Nonnegative,
    NotNonnegative,
    Indeterminate,
}

/// A Gram matrix of `f` whose minimum eigenvalue is at least `-PSD_TOL`
/// (relative to the scale of `f`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdCertificate {
    pub lambda: [f64; 6],
    pub matrix: SymMatrix6<f64>,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub point: [f64; 3],
    /// `f(point)` for the unit-max-coefficient scaling of `f`, evaluated exactly.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityStatus {
    pub verdict: Nonnegativity,
    /// Best minimum eigenvalue over the family (scaled `f`).
    pub max_min_eigenvalue: f64,
    pub certificate: Option<PsdCertificate>,
    pub counterexample: Option<Counterexample>,
}

impl PositivityStatus {
    pub fn is_nonnegative(&self) -> bool {
        self.verdict == Nonnegativity::Nonnegative
    }
}

type Mat6 = Matrix6<f64>;

struct ScaledFamily {
    scale: f64,
    base: Mat6,
    basis: [Mat6; 6],
}

impl ScaledFamily {
    fn new(family: &GramFamily) -> Self {
        let scale = family.source().max_magnitude();
        Self {
            scale,
            base: family.base().map(f64::from_rational).to_matrix() / scale,
            basis: std::array::from_fn(|k| kernel_matrix::<f64>(k).to_matrix()),
        }
    }

    fn gram(&self, lambda: &[f64; 6]) -> Mat6 {
        let mut g = self.base;
        for k in 0..6 {
            g += self.basis[k] * lambda[k];
        }
        g
    }

    fn min_eig(&self, lambda: &[f64; 6]) -> (f64, SVector<f64, 6>) {
        let eig = SymmetricEigen::new(self.gram(lambda));
        let i = eig.eigenvalues.imin();
        (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned())
    }

    /// Supergradient ascent on `λ ↦ λ_min(G(λ))` with steps `step₀/√(k+1)`.
    fn supergradient_ascent(&self, start: [f64; 6], iters: usize) -> ([f64; 6], f64) {
        let mut lambda = start;
        let (mut best_val, _) = self.min_eig(&lambda);
        let mut best = lambda;
        for k in 0..iters {
            let (val, u) = self.min_eig(&lambda);
            if val > best_val {
                best_val = val;
                best = lambda;
            }
            let g: [f64; 6] = std::array::from_fn(|i| (u.transpose() * self.basis[i] * u)[(0, 0)]);
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-14 {
                break;
            }
            let step = 0.5 / ((k + 1) as f64).sqrt();
            for i in 0..6 {
                lambda[i] += step * g[i] / norm;
            }
        }
        (best, best_val)
    }

    /// Log-barrier refinement of `max t s.t. G(λ) − tI ⪰ 0`.
    fn barrier_refine(&self, start: [f64; 6]) -> [f64; 6] {
        let mut x = SVector::<f64, 7>::zeros();
        for i in 0..6 {
            x[i] = start[i];
        }
        x[6] = self.min_eig(&start).0 - 1.0;
        let slack = |x: &SVector<f64, 7>| {
            let lambda: [f64; 6] = std::array::from_fn(|i| x[i]);
            self.gram(&lambda) - Mat6::identity() * x[6]
        };
        let objective = |x: &SVector<f64, 7>, mu: f64| -> Option<f64> {
            let chol = Cholesky::new(slack(x))?;
            let logdet: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
            Some(x[6] + mu * logdet)
        };
        let mut mu = 1.0;
        while mu > 1e-14 {
            for _ in 0..50 {
                let Some(chol) = Cholesky::new(slack(&x)) else { break };
                let inv = chol.inverse();
                let dirs: [Mat6; 7] = std::array::from_fn(|i| if i < 6 { self.basis[i] } else { -Mat6::identity() });
                let prod: Vec<Mat6> = dirs.iter().map(|a| inv * a).collect();
                let mut grad = SVector::<f64, 7>::zeros();
                let mut hess = SMatrix::<f64, 7, 7>::zeros();
                for i in 0..7 {
                    grad[i] = mu * prod[i].trace();
                    for j in 0..=i {
                        let h = -mu * (prod[i] * prod[j]).trace();
                        hess[(i, j)] = h;
                        hess[(j, i)] = h;
                    }
                }
                grad[6] += 1.0;
                let Some(neg) = Cholesky::new(-hess) else { break };
                let step = neg.solve(&grad);
                let decrement = grad.dot(&step);
                if decrement < 1e-20 {
                    break;
                }
                let Some(f0) = objective(&x, mu) else { break };
                let mut alpha = 1.0;
                let mut moved = false;
                while alpha > 1e-12 {
                    let trial = x + step * alpha;
                    if objective(&trial, mu).is_some_and(|f1| f1 >= f0 + 0.25 * alpha * decrement) {
                        x = trial;
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            mu *= 0.1;
        }
        std::array::from_fn(|i| x[i])
    }
}

/// Minimize `f` over the unit sphere by projected gradient descent.
fn sphere_minimum(f: &Form<f64>, start: [f64; 3], iters: usize) -> ([f64; 3], f64) {
    let grad = f.gradient();
    let normalize = |v: [f64; 3]| {
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        v.map(|c| c / n)
    };
    let mut v = normalize(start);
    let mut val = f.eval(&v);
    let mut step = 0.1;
    for _ in 0..iters {
        let g = [grad[0].eval(&v), grad[1].eval(&v), grad[2].eval(&v)];
        let radial: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
        let tangent: [f64; 3] = std::array::from_fn(|i| g[i] - radial * v[i]);
        if tangent.iter().map(|t| t * t).sum::<f64>().sqrt() < 1e-14 {
            break;
        }
        loop {
            let trial = normalize(std::array::from_fn(|i| v[i] - step * tangent[i]));
            let tv = f.eval(&trial);
            if tv < val {
                v = trial;
                val = tv;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-16 {
                return (v, val);
            }
        }
    }
    (v, val)
}

pub const ASCENT_RESTARTS: usize = 10;
pub const ASCENT_ITERS: usize = 1500;
pub const SPHERE_STARTS: usize = 100;

/// Decide non-negativity of `f` by maximizing the minimum eigenvalue over the
/// Gram family, alongside a search for a point where `f` is negative.
pub fn nonnegativity_test(f: &TernaryQuartic<BigRational>, family: &GramFamily, seed: u64) -> PositivityStatus {
    let scaled = ScaledFamily::new(family);
    let mut best = ([0.0; 6], f64::NEG_INFINITY);
    for restart in 0..ASCENT_RESTARTS {
        let mut rng = task_rng(seed, restart as u64);
        let start: [f64; 6] =
            if restart == 0 { [0.0; 6] } else { std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal)) };
        let (lambda, val) = scaled.supergradient_ascent(start, ASCENT_ITERS);
        if val > best.1 {
            best = (lambda, val);
        }
    }
    let refined = scaled.barrier_refine(best.0);
    let refined_val = scaled.min_eig(&refined).0;
    if refined_val > best.1 {
        best = (refined, refined_val);
    }
    let (lambda_n, max_min_eigenvalue) = best;

    let f_scaled = f.form().map(|c| f64::from_rational(c) / scaled.scale);
    let mut worst: Option<([f64; 3], f64)> = None;
    for start_index in 0..SPHERE_STARTS {
        let mut rng = task_rng(seed ^ 0xf00d, start_index as u64);
        let start: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let (p, v) = sphere_minimum(&f_scaled, start, 200);
        if worst.is_none_or(|(_, w)| v < w) {
            worst = Some((p, v));
        }
    }
    let counterexample = worst.and_then(|(point, _)| {
        // exact evaluation of the double point on the exact form
        let exact = f.eval(&point.map(rational_from_f64));
        let value = f64::from_rational(&exact) / scaled.scale;
        let threshold = rational_from_f64(-PSD_TOL * scaled.scale);
        (exact < threshold && exact.is_negative()).then_some(Counterexample { point, value })
    });

    if counterexample.is_some() {
        return PositivityStatus {
            verdict: Nonnegativity::NotNonnegative,
            max_min_eigenvalue,
            certificate: None,
            counterexample,
        };
    }
    if max_min_eigenvalue >= -PSD_TOL {
        let lambda = lambda_n.map(|l| l * scaled.scale);
        let matrix = family.matrix_at(&lambda);
        return PositivityStatus {
            verdict: Nonnegativity::Nonnegative,
            max_min_eigenvalue,
            certificate: Some(PsdCertificate { lambda, matrix, min_eigenvalue: max_min_eigenvalue }),
            counterexample: None,
        };
    }
    PositivityStatus { verdict: Nonnegativity::Indeterminate, max_min_eigenvalue, certificate: None, counterexample: None }
}
