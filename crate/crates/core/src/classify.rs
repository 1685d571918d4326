//! Explicit representations from rank-3 Gram matrices, and their verification.

use nalgebra::SymmetricEigen;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::curve::{basepoint_check, nonnegativity_test, smoothness_test, CurveStatus, PositivityStatus, Nonnegativity};
use crate::error::{GramError, HypothesisFailure};
use crate::form::{signed_sum_of_squares, Form, QuadraticForm, TernaryQuartic};
use crate::gram::{gram_to_quartic, GramFamily, GramPoint};
use crate::scalar::{rational_from_f64, FromRational, Magnitude, Scalar};
use crate::solver::{solve_all, singular_values, Counts, SolutionSet, SolveConfig, RANK_TOL};
use crate::symmat::SymMatrix6;

/// Relative residual accepted for a representation.
pub const REPRESENTATION_TOL: f64 = 1e-8;

/// `f = Σ signs[i]·forms[i]²`, one equivalence class of representations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Representation<T> {
    pub signs: [i8; 3],
    pub forms: [QuadraticForm<T>; 3],
    pub class_lambda: [Complex64; 6],
    /// Coefficient max-norm of `f − Σ εᵢ·formᵢ²`, relative to that of `f`.
    pub residual: f64,
}

pub type RealRepresentation = Representation<f64>;
pub type ComplexRepresentation = Representation<Complex64>;

impl<T: Scalar> Representation<T> {
    pub fn is_all_plus(&self) -> bool {
        self.signs.iter().all(|s| *s > 0)
    }

    pub fn has_mixed_signs(&self) -> bool {
        self.signs.iter().any(|s| *s > 0) && self.signs.iter().any(|s| *s < 0)
    }

    pub fn gram(&self) -> SymMatrix6<T> {
        crate::gram::representation_to_gram(&self.signs, &self.forms)
    }

    pub fn with_lambda(mut self, lambda: [Complex64; 6]) -> Self {
        self.class_lambda = lambda;
        self
    }
}

impl RealRepresentation {
    pub fn to_complex(&self) -> ComplexRepresentation {
        Representation {
            signs: self.signs,
            forms: self.forms.each_ref().map(|q| q.map(|c| Complex64::new(*c, 0.0))),
            class_lambda: self.class_lambda,
            residual: self.residual,
        }
    }

    /// Sum of three squares of real forms.
    pub fn is_sos_certificate(&self) -> bool {
        self.is_all_plus()
    }
}

fn relative_residual<T: Scalar + Magnitude>(target: &Form<T>, signs: &[i8; 3], forms: &[QuadraticForm<T>; 3]) -> f64 {
    let diff = target.sub(&signed_sum_of_squares(signs, forms));
    diff.max_magnitude() / target.max_magnitude().max(f64::MIN_POSITIVE)
}

/// Flip each form so its leading coefficient is positive (real part first),
/// then sort the signed forms lexicographically.
fn normalize<T: Copy + Scalar>(
    mut pairs: Vec<(i8, QuadraticForm<T>)>,
    parts: impl Fn(&T) -> (f64, f64),
) -> ([i8; 3], [QuadraticForm<T>; 3]) {
    for (_, q) in pairs.iter_mut() {
        let scale = q.coeffs.iter().map(|c| parts(c).0.hypot(parts(c).1)).fold(0.0, f64::max);
        let lead = q.coeffs.iter().map(&parts).find(|(re, im)| re.hypot(*im) > 1e-12 * scale);
        if let Some((re, im)) = lead {
            let negative = if re.abs() > 1e-12 * scale { re < 0.0 } else { im < 0.0 };
            if negative {
                *q = q.map(|c| -*c);
            }
        }
    }
    let key = |q: &QuadraticForm<T>| q.coeffs.iter().flat_map(|c| { let (a, b) = parts(c); [a, b] }).collect::<Vec<f64>>();
    pairs.sort_by(|(sa, a), (sb, b)| {
        sb.cmp(sa).then_with(|| {
            key(b).iter().zip(key(a).iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let signs = std::array::from_fn(|i| pairs[i].0);
    let forms = std::array::from_fn(|i| pairs[i].1.clone());
    (signs, forms)
}

/// Sorted singular values of a real symmetric matrix are its |eigenvalues|.
fn check_rank(sigma: &[f64]) -> Result<(), GramError> {
    let top = sigma[0].max(f64::MIN_POSITIVE);
    if sigma[3] >= RANK_TOL * top {
        return Err(GramError::RankMismatch { sigma4: sigma[3] });
    }
    Ok(())
}

/// Factor a real rank-3 Gram matrix through its eigendecomposition.
pub fn factor_real(g: &SymMatrix6<f64>) -> Result<RealRepresentation, GramError> {
    let eig = SymmetricEigen::new(g.to_matrix());
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
    let sigma: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].abs()).collect();
    check_rank(&sigma)?;
    let pairs: Vec<(i8, QuadraticForm<f64>)> = order[..3]
        .iter()
        .map(|&i| {
            let mu = eig.eigenvalues[i];
            let root = mu.abs().sqrt();
            let u = eig.eigenvectors.column(i);
            (if mu < 0.0 { -1 } else { 1 }, QuadraticForm::new(std::array::from_fn(|k| root * u[k])))
        })
        .collect();
    let (signs, forms) = normalize(pairs, |c| (*c, 0.0));
    let residual = relative_residual(&gram_to_quartic(g), &signs, &forms);
    Ok(Representation { signs, forms, class_lambda: [Complex64::zero(); 6], residual })
}

/// Factor a complex symmetric rank-3 Gram matrix by pivoted completion of
/// squares. All signs are `+1`; complex squares absorb them.
pub fn factor_complex(g: &SymMatrix6<Complex64>) -> Result<ComplexRepresentation, GramError> {
    let sigma = singular_values(g);
    check_rank(&sigma)?;
    let squares = complete_squares(g, 3);
    let pairs: Vec<(i8, QuadraticForm<Complex64>)> = squares.into_iter().map(|q| (1, q)).collect();
    if pairs.len() != 3 {
        return Err(GramError::RankMismatch { sigma4: sigma[3] });
    }
    let (signs, forms) = normalize(pairs, |c| (c.re, c.im));
    let residual = relative_residual(&gram_to_quartic(g), &signs, &forms);
    Ok(Representation { signs, forms, class_lambda: [Complex64::zero(); 6], residual })
}

/// Lagrange reduction of a complex symmetric form to at most `max_terms`
/// squares. A diagonal pivot is used whenever some diagonal entry exceeds the
/// threshold, otherwise the largest off-diagonal entry `a = A[k][l]` is
/// eliminated through `2UV/a = uv = ((u+v)/2)² + (i(u−v)/2)²` with
/// `u = c·V`, `v = c·U`, `c² = 2/a`, where `U, V` are rows `k, l` of the form.
pub fn complete_squares(g: &SymMatrix6<Complex64>, max_terms: usize) -> Vec<QuadraticForm<Complex64>> {
    let mut a = g.clone();
    let scale = g.max_magnitude().max(f64::MIN_POSITIVE);
    let threshold = 1e-10 * scale;
    let mut out = Vec::new();
    let i = Complex64::i();
    while out.len() < max_terms {
        let (dk, dmax) = (0..6).map(|k| (k, a.get(k, k).norm())).fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if dmax > threshold {
            let pivot = *a.get(dk, dk);
            let root = pivot.sqrt();
            let row: [Complex64; 6] = std::array::from_fn(|j| *a.get(dk, j) / root);
            a = a.add_outer(&row, &Complex64::new(-1.0, 0.0));
            out.push(QuadraticForm::new(row));
            continue;
        }
        let mut best = (0, 1, 0.0);
        for k in 0..6 {
            for l in k + 1..6 {
                let m = a.get(k, l).norm();
                if m > best.2 {
                    best = (k, l, m);
                }
            }
        }
        let (k, l, m) = best;
        if m <= threshold || out.len() + 2 > max_terms {
            break;
        }
        let pivot = *a.get(k, l);
        let c = (Complex64::new(2.0, 0.0) / pivot).sqrt();
        let u_row: [Complex64; 6] = std::array::from_fn(|j| *a.get(l, j) * c);
        let v_row: [Complex64; 6] = std::array::from_fn(|j| *a.get(k, j) * c);
        let first: [Complex64; 6] = std::array::from_fn(|j| (u_row[j] + v_row[j]) / 2.0);
        let second: [Complex64; 6] = std::array::from_fn(|j| i * (u_row[j] - v_row[j]) / 2.0);
        a = a.add_outer(&first, &Complex64::new(-1.0, 0.0)).add_outer(&second, &Complex64::new(-1.0, 0.0));
        out.push(QuadraticForm::new(first));
        out.push(QuadraticForm::new(second));
    }
    out
}

type ExactComplex = Complex<BigRational>;

/// Coefficients that convert exactly into complex rationals.
pub trait ExactCoefficient: Scalar {
    fn to_exact(&self) -> ExactComplex;
}

impl ExactCoefficient for f64 {
    fn to_exact(&self) -> ExactComplex {
        Complex::new(rational_from_f64(*self), BigRational::zero())
    }
}

impl ExactCoefficient for Complex64 {
    fn to_exact(&self) -> ExactComplex {
        Complex::new(rational_from_f64(self.re), rational_from_f64(self.im))
    }
}

impl ExactCoefficient for BigRational {
    fn to_exact(&self) -> ExactComplex {
        Complex::new(self.clone(), BigRational::zero())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    /// Exact relative residual, rounded to a double.
    pub residual: f64,
    pub basepoint_free: bool,
}

/// Re-expand `Σ εᵢ·formᵢ²` exactly (every double is a dyadic rational) and
/// compare with `f` coefficientwise.
pub fn verify_representation<T: ExactCoefficient>(f: &TernaryQuartic<BigRational>, signs: &[i8; 3], forms: &[QuadraticForm<T>; 3]) -> Verdict {
    let exact_forms: [QuadraticForm<ExactComplex>; 3] = forms.each_ref().map(|q| q.map(ExactCoefficient::to_exact));
    let target = f.form().map(ExactComplex::from_rational);
    let residual = relative_residual(&target, signs, &exact_forms);
    let basepoints = basepoint_check(&forms.each_ref().map(|q| q.map(|c| {
        let e = c.to_exact();
        Complex64::new(f64::from_rational(&e.re), f64::from_rational(&e.im))
    })), 0);
    Verdict { pass: residual <= REPRESENTATION_TOL, residual, basepoint_free: basepoints.basepoint_free }
}

/// A class of representations in the form suited to its Gram point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassRepresentation {
    Real(RealRepresentation),
    Complex(ComplexRepresentation),
}

impl ClassRepresentation {
    pub fn residual(&self) -> f64 {
        match self {
            Self::Real(r) => r.residual,
            Self::Complex(r) => r.residual,
        }
    }

    pub fn signs(&self) -> [i8; 3] {
        match self {
            Self::Real(r) => r.signs,
            Self::Complex(r) => r.signs,
        }
    }

    pub fn class_lambda(&self) -> [Complex64; 6] {
        match self {
            Self::Real(r) => r.class_lambda,
            Self::Complex(r) => r.class_lambda,
        }
    }

    pub fn as_real(&self) -> Option<&RealRepresentation> {
        match self {
            Self::Real(r) => Some(r),
            Self::Complex(_) => None,
        }
    }

    pub fn to_complex(&self) -> ComplexRepresentation {
        match self {
            Self::Real(r) => r.to_complex(),
            Self::Complex(r) => r.clone(),
        }
    }
}

/// Factor a solver point: real points through their eigendecomposition,
/// the rest by completion of squares.
pub fn represent(point: &GramPoint) -> Result<ClassRepresentation, GramError> {
    if point.is_real() {
        Ok(ClassRepresentation::Real(factor_real(&point.real_matrix())?.with_lambda(point.lambda)))
    } else {
        Ok(ClassRepresentation::Complex(factor_complex(&point.matrix)?.with_lambda(point.lambda)))
    }
}

/// One line of a count comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountCheck {
    pub name: String,
    pub expected: usize,
    pub observed: usize,
    pub pass: bool,
}

impl CountCheck {
    fn new(name: &str, expected: usize, observed: usize) -> Self {
        Self { name: name.to_string(), expected, observed, pass: expected == observed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub checks: Vec<CountCheck>,
    pub conjugation_closed: bool,
}

impl CountReport {
    pub fn pass(&self) -> bool {
        self.conjugation_closed && self.checks.iter().all(|c| c.pass)
    }
}

/// Compare a solution set of a smooth non-negative quartic with the expected
/// 63 / 15 / 8 split.
pub fn certify_count(set: &SolutionSet) -> CountReport {
    let expected = Counts::SMOOTH_NONNEGATIVE;
    let nonreal = set.counts.complex_total - set.counts.real_total;
    let unpaired = set.unpaired_conjugates().len();
    let mixed = set
        .points
        .iter()
        .filter(|p| p.is_real() && !p.is_psd() && p.signature.is_some_and(|s| s.is_mixed() && s.positive + s.negative == 3))
        .count();
    CountReport {
        checks: vec![
            CountCheck::new("complex classes", expected.complex_total, set.counts.complex_total),
            CountCheck::new("real classes", expected.real_total, set.counts.real_total),
            CountCheck::new("psd classes", expected.psd_total, set.counts.psd_total),
            CountCheck::new("non-real classes", expected.complex_total - expected.real_total, nonreal),
            CountCheck::new(
                "conjugate pairs",
                (expected.complex_total - expected.real_total) / 2,
                (nonreal - unpaired) / 2,
            ),
            CountCheck::new("mixed-sign real classes", expected.real_total - expected.psd_total, mixed),
        ],
        conjugation_closed: unpaired == 0,
    }
}

/// Outcome of the full pipeline on one quartic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub curve: CurveStatus,
    pub positivity: PositivityStatus,
    pub solutions: SolutionSet,
    pub classes: Vec<ClassRepresentation>,
    pub verdicts: Vec<Verdict>,
    pub sum_of_squares: usize,
    pub signed: usize,
    pub complex: usize,
    pub counts: CountReport,
}

impl TheoremReport {
    pub fn pass(&self) -> bool {
        self.counts.pass()
            && self.sum_of_squares == 8
            && self.signed == 7
            && self.complex == 48
            && self.verdicts.iter().all(|v| v.pass)
    }

    /// The real representations, sums of squares first.
    pub fn real_certificates(&self) -> Vec<&RealRepresentation> {
        self.classes.iter().filter_map(ClassRepresentation::as_real).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TheoremError {
    HypothesisFailed { failure: HypothesisFailure, curve: CurveStatus, positivity: Option<PositivityStatus> },
    Factorization(GramError),
}

impl std::fmt::Display for TheoremError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::HypothesisFailed { failure, .. } => write!(f, "hypothesis failed: {failure}"),
            Self::Factorization(e) => write!(f, "factorization failed: {e}"),
        }
    }
}

impl std::error::Error for TheoremError {}

/// Smoothness, then non-negativity, then all rank-3 classes and their
/// representations, with the counts checked against 8 / 7 / 48.
pub fn theorem1_check(f: &TernaryQuartic<BigRational>, config: &SolveConfig) -> Result<TheoremReport, TheoremError> {
    let curve = smoothness_test(f);
    if !curve.is_smooth() {
        return Err(TheoremError::HypothesisFailed { failure: HypothesisFailure::Singular, curve, positivity: None });
    }
    let family = GramFamily::new(f);
    let positivity = nonnegativity_test(f, &family, config.master_seed);
    let failure = match positivity.verdict {
        Nonnegativity::Nonnegative => None,
        Nonnegativity::NotNonnegative => Some(HypothesisFailure::NotNonnegative),
        Nonnegativity::Indeterminate => Some(HypothesisFailure::NonnegativityIndeterminate),
    };
    if let Some(failure) = failure {
        return Err(TheoremError::HypothesisFailed { failure, curve, positivity: Some(positivity) });
    }
    let solutions = solve_all(&family, config);
    classify_solutions(f, curve, positivity, solutions)
}

/// Factor and verify every class of an existing solution set.
pub fn classify_solutions(
    f: &TernaryQuartic<BigRational>,
    curve: CurveStatus,
    positivity: PositivityStatus,
    solutions: SolutionSet,
) -> Result<TheoremReport, TheoremError> {
    let classes: Vec<ClassRepresentation> =
        solutions.points.iter().map(represent).collect::<Result<_, _>>().map_err(TheoremError::Factorization)?;
    let verdicts: Vec<Verdict> = classes
        .iter()
        .map(|c| match c {
            ClassRepresentation::Real(r) => verify_representation(f, &r.signs, &r.forms),
            ClassRepresentation::Complex(r) => verify_representation(f, &r.signs, &r.forms),
        })
        .collect();
    let sum_of_squares = classes.iter().filter(|c| c.as_real().is_some_and(|r| r.is_all_plus())).count();
    let signed = classes.iter().filter(|c| c.as_real().is_some_and(|r| r.has_mixed_signs())).count();
    let complex = classes.iter().filter(|c| c.as_real().is_none()).count();
    let counts = certify_count(&solutions);
    Ok(TheoremReport { curve, positivity, solutions, classes, verdicts, sum_of_squares, signed, complex, counts })
}

/// `true` when the three forms of a real representation are linearly
/// independent, as they are for every rank-3 class.
pub fn spans_three(forms: &[QuadraticForm<f64>; 3]) -> bool {
    let m = nalgebra::Matrix6x3::from_fn(|i, j| forms[j].coeffs[i]);
    let sv = m.singular_values();
    sv.min() > 1e-10 * sv.max().max(f64::MIN_POSITIVE)
}
