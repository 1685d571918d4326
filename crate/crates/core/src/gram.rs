//! The affine family of Gram matrices of a quartic.
//!
//! Every symmetric `G` with `mᵀ·G·m = f` has the form `G₀ + Σ λᵢ·Bᵢ`, where `G₀`
//! is a fixed canonical Gram matrix of `f` and `B₁..B₆` span the symmetric
//! matrices with `mᵀ·B·m = 0`. The coordinates `λ` are read off six
//! off-diagonal entries, each touched by exactly one `Bᵢ`.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::GramError;
use crate::form::{Form, QuadraticForm, TernaryQuartic, MONOMIAL_ORDER};
use crate::scalar::{FromRational, Magnitude, Scalar};
use crate::symmat::SymMatrix6;

/// Default absolute entrywise tolerance of [`GramFamily::lambda_of_gram`].
pub const FAMILY_TOL: f64 = 1e-9;

/// Entry of each `Bᵢ` that carries the `λᵢ` coordinate (value 1), followed by
/// the compensating entry and its value.
pub const KERNEL_BASIS: [((usize, usize), (usize, usize), i64); 6] = [
    ((0, 1), (5, 5), -2),
    ((0, 2), (4, 4), -2),
    ((1, 2), (3, 3), -2),
    ((0, 3), (4, 5), -1),
    ((1, 4), (3, 5), -1),
    ((2, 5), (3, 4), -1),
];

/// Canonical `G₀` slot of each quartic monomial, keyed by exponents. Diagonal
/// slots take the coefficient; off-diagonal slots take half of it on each side.
const CANONICAL_SLOTS: [([u32; 3], (usize, usize)); 15] = [
    ([4, 0, 0], (0, 0)),
    ([0, 4, 0], (1, 1)),
    ([0, 0, 4], (2, 2)),
    ([0, 2, 2], (3, 3)),
    ([2, 0, 2], (4, 4)),
    ([2, 2, 0], (5, 5)),
    ([3, 1, 0], (0, 5)),
    ([3, 0, 1], (0, 4)),
    ([1, 3, 0], (1, 5)),
    ([0, 3, 1], (1, 3)),
    ([1, 0, 3], (2, 4)),
    ([0, 1, 3], (2, 3)),
    ([2, 1, 1], (0, 3)),
    ([1, 2, 1], (1, 4)),
    ([1, 1, 2], (2, 5)),
];

/// `Bᵢ` (zero-based `index`) in any scalar type.
pub fn kernel_matrix<T: Scalar>(index: usize) -> SymMatrix6<T> {
    let ((a, b), (c, d), v) = KERNEL_BASIS[index];
    let mut m = SymMatrix6::zero();
    m.set(a, b, T::one());
    let mut w = T::zero();
    for _ in 0..v.unsigned_abs() {
        w = w - T::one();
    }
    m.set(c, d, w);
    m
}

/// Expansion of `mᵀ·G·m`.
pub fn gram_to_quartic<T: Scalar>(g: &SymMatrix6<T>) -> Form<T> {
    let mut terms = Vec::with_capacity(36);
    for i in 0..6 {
        for j in 0..6 {
            let (ei, ej) = (MONOMIAL_ORDER[i], MONOMIAL_ORDER[j]);
            terms.push(([ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2]], g.get(i, j).clone()));
        }
    }
    Form::from_terms(4, terms).expect("degree-4 monomials")
}

/// `Σ signsᵢ·vᵢvᵢᵀ` for the coefficient vectors of `forms`.
pub fn representation_to_gram<T: Scalar>(signs: &[i8; 3], forms: &[QuadraticForm<T>; 3]) -> SymMatrix6<T> {
    signs.iter().zip(forms).fold(SymMatrix6::zero(), |acc, (s, q)| {
        let w = if *s < 0 { -T::one() } else { T::one() };
        acc.add_outer(&q.coeffs, &w)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramFamily {
    source: TernaryQuartic<BigRational>,
    base: SymMatrix6<BigRational>,
}

impl GramFamily {
    pub fn new(f: &TernaryQuartic<BigRational>) -> Self {
        let two = BigRational::from_integer(2.into());
        let mut base = SymMatrix6::zero();
        for (exps, (i, j)) in CANONICAL_SLOTS {
            let c = f.coeff(exps).clone();
            base.set(i, j, if i == j { c } else { c / &two });
        }
        Self { source: f.clone(), base }
    }

    pub fn source(&self) -> &TernaryQuartic<BigRational> {
        &self.source
    }

    pub fn base(&self) -> &SymMatrix6<BigRational> {
        &self.base
    }

    pub fn kernel_basis<T: Scalar>(&self) -> [SymMatrix6<T>; 6] {
        std::array::from_fn(kernel_matrix)
    }

    /// `G(λ) = G₀ + Σ λᵢ·Bᵢ`.
    pub fn matrix_at<T: FromRational>(&self, lambda: &[T; 6]) -> SymMatrix6<T> {
        let mut g = self.base.map(T::from_rational);
        for (k, ((a, b), (c, d), v)) in KERNEL_BASIS.into_iter().enumerate() {
            let l = lambda[k].clone();
            let ab = g.get(a, b).clone() + l.clone();
            g.set(a, b, ab);
            let w = T::from_rational(&BigRational::from_integer(v.into()));
            let cd = g.get(c, d).clone() + w * l;
            g.set(c, d, cd);
        }
        g
    }

    /// Coordinates of `g` in the family, with the default tolerance.
    pub fn lambda_of_gram<T>(&self, g: &SymMatrix6<T>) -> Result<[T; 6], GramError>
    where
        T: FromRational + Magnitude,
    {
        self.lambda_of_gram_with_tol(g, FAMILY_TOL)
    }

    pub fn lambda_of_gram_with_tol<T>(&self, g: &SymMatrix6<T>, tol: f64) -> Result<[T; 6], GramError>
    where
        T: FromRational + Magnitude,
    {
        let lambda: [T; 6] = std::array::from_fn(|k| {
            let (a, b) = KERNEL_BASIS[k].0;
            g.get(a, b).clone() - T::from_rational(self.base.get(a, b))
        });
        let residual = self.matrix_at(&lambda).max_abs_diff(g);
        if residual > tol {
            return Err(GramError::NotInFamily { residual });
        }
        Ok(lambda)
    }
}

/// Whether a solution of the rank condition is real.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reality {
    Real,
    Complex,
}

/// Counts of positive and negative eigenvalues of a real Gram matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn is_psd(&self) -> bool {
        self.negative == 0
    }

    pub fn is_mixed(&self) -> bool {
        self.positive > 0 && self.negative > 0
    }

    /// PSD first, then decreasing number of positive eigenvalues.
    pub fn sort_key(&self) -> (usize, usize) {
        (usize::MAX - self.positive, self.negative)
    }
}

/// A point of the Gram family together with its classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramPoint {
    pub lambda: [Complex64; 6],
    pub matrix: SymMatrix6<Complex64>,
    pub numerical_rank: usize,
    /// Norm of the kernel-chart residual at acceptance.
    pub kernel_residual: f64,
    pub reality: Reality,
    pub signature: Option<Signature>,
}

impl GramPoint {
    pub fn is_real(&self) -> bool {
        self.reality == Reality::Real
    }

    pub fn is_psd(&self) -> bool {
        self.signature.is_some_and(|s| s.is_psd())
    }

    pub fn real_lambda(&self) -> [f64; 6] {
        self.lambda.map(|l| l.re)
    }

    pub fn real_matrix(&self) -> SymMatrix6<f64> {
        self.matrix.map(|v| v.re)
    }
}
