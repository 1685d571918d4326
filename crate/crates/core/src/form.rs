//! Homogeneous ternary forms.
//!
//! Coefficients of a degree-`d` form are stored densely in graded-lexicographic
//! order (x > y > z): `x^d, x^(d-1)y, x^(d-1)z, ..., z^d`. Quadratic forms use
//! their own fixed order, see [`MONOMIAL_ORDER`].

use std::fmt;
use std::ops::Deref;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::FormError;
use crate::scalar::{format_rational, FromRational, Magnitude, Scalar};

pub type Exponents = [u32; 3];

/// Monomial vector `m = (x², y², z², yz, xz, xy)` indexing quadratic forms and
/// the rows and columns of every Gram matrix.
pub const MONOMIAL_ORDER: [Exponents; 6] =
    [[2, 0, 0], [0, 2, 0], [0, 0, 2], [0, 1, 1], [1, 0, 1], [1, 1, 0]];

/// Exponent triples of degree `degree` in graded-lexicographic order.
pub fn monomials(degree: u32) -> Vec<Exponents> {
    let mut out = Vec::with_capacity(monomial_count(degree));
    for a in (0..=degree).rev() {
        for b in (0..=degree - a).rev() {
            out.push([a, b, degree - a - b]);
        }
    }
    out
}

pub fn monomial_count(degree: u32) -> usize {
    let d = degree as usize;
    (d + 1) * (d + 2) / 2
}

/// Position of `exps` in [`monomials`] of the matching degree.
pub fn monomial_index(exps: Exponents) -> usize {
    let degree = exps[0] + exps[1] + exps[2];
    // rows with a larger x-exponent come first; row for x^a has (degree - a + 1) entries
    let before: u32 = (exps[0] + 1..=degree).map(|a| degree - a + 1).sum();
    (before + (degree - exps[0] - exps[1])) as usize
}

/// Dense homogeneous form of a fixed degree in x, y, z.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Form<T> {
    degree: u32,
    coeffs: Vec<T>,
}

impl<T: Scalar> Form<T> {
    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            coeffs: vec![T::zero(); monomial_count(degree)],
        }
    }

    /// Coefficients must be given in graded-lexicographic order.
    pub fn from_coeffs(degree: u32, coeffs: Vec<T>) -> Result<Self, FormError> {
        if coeffs.len() != monomial_count(degree) {
            return Err(FormError::CoefficientCount {
                degree,
                expected: monomial_count(degree),
                found: coeffs.len(),
            });
        }
        Ok(Self { degree, coeffs })
    }

    pub fn from_terms<I>(degree: u32, terms: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Exponents, T)>,
    {
        let mut form = Self::zero(degree);
        for (exps, c) in terms {
            let d = exps.iter().sum::<u32>();
            if d != degree {
                return Err(FormError::NotHomogeneous { expected: degree, found: d });
            }
            let slot = &mut form.coeffs[monomial_index(exps)];
            *slot = slot.clone() + c;
        }
        Ok(form)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, exps: Exponents) -> &T {
        &self.coeffs[monomial_index(exps)]
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, &T)> + '_ {
        monomials(self.degree).into_iter().zip(self.coeffs.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Form<U> {
        Form {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "subtracting forms of different degree");
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, factor: &T) -> Self {
        self.map(|c| c.clone() * factor.clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        let mut out = Self::zero(degree);
        let rhs: Vec<_> = other.terms().filter(|(_, c)| !c.is_zero()).collect();
        for (ea, ca) in self.terms().filter(|(_, c)| !c.is_zero()) {
            for (eb, cb) in &rhs {
                let idx = monomial_index([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]]);
                out.coeffs[idx] = out.coeffs[idx].clone() + ca.clone() * (*cb).clone();
            }
        }
        out
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::constant(T::one());
        for _ in 0..exponent {
            out = out.mul(self);
        }
        out
    }

    pub fn constant(value: T) -> Self {
        Self { degree: 0, coeffs: vec![value] }
    }

    pub fn eval(&self, point: &[T; 3]) -> T {
        let powers: Vec<Vec<T>> = point
            .iter()
            .map(|v| {
                let mut p = vec![T::one()];
                for k in 0..self.degree as usize {
                    let next = p[k].clone() * v.clone();
                    p.push(next);
                }
                p
            })
            .collect();
        self.terms().fold(T::zero(), |acc, (e, c)| {
            if c.is_zero() {
                return acc;
            }
            acc + c.clone()
                * powers[0][e[0] as usize].clone()
                * powers[1][e[1] as usize].clone()
                * powers[2][e[2] as usize].clone()
        })
    }

    /// Formal partial derivative with respect to variable `var` (0 = x, 1 = y, 2 = z).
    pub fn partial(&self, var: usize) -> Self {
        if self.degree == 0 {
            return Self::zero(0);
        }
        let mut out = Self::zero(self.degree - 1);
        for (mut e, c) in self.terms() {
            if e[var] == 0 || c.is_zero() {
                continue;
            }
            let factor = small_int::<T>(e[var]);
            e[var] -= 1;
            let idx = monomial_index(e);
            out.coeffs[idx] = out.coeffs[idx].clone() + c.clone() * factor;
        }
        out
    }

    pub fn gradient(&self) -> [Self; 3] {
        [self.partial(0), self.partial(1), self.partial(2)]
    }

    /// Linear change of variables `x_i ↦ Σ_j rows[i][j]·x_j`.
    pub fn substitute(&self, rows: &[[T; 3]; 3]) -> Self {
        let images: Vec<Form<T>> = rows
            .iter()
            .map(|r| Form::from_coeffs(1, r.to_vec()).expect("three linear coefficients"))
            .collect();
        let powers: Vec<Vec<Form<T>>> = images
            .iter()
            .map(|l| (0..=self.degree).map(|k| l.pow(k)).collect())
            .collect();
        let mut out = Self::zero(self.degree);
        for (e, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            let term = powers[0][e[0] as usize]
                .mul(&powers[1][e[1] as usize])
                .mul(&powers[2][e[2] as usize]);
            out = out.add(&term.scale(c));
        }
        out
    }

    pub fn max_magnitude(&self) -> f64
    where
        T: Magnitude,
    {
        self.coeffs.iter().map(Magnitude::magnitude).fold(0.0, f64::max)
    }

    /// Render with a caller-supplied coefficient formatter. The formatter
    /// receives each nonzero coefficient and returns `(negative, text)`;
    /// `text == "1"` is elided in front of a monomial.
    pub fn render(&self, coeff: impl Fn(&T) -> (bool, String)) -> String {
        let mut out = String::new();
        for (e, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            let (negative, text) = coeff(c);
            let mono = monomial_text(e);
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            match (text.as_str(), mono.is_empty()) {
                (_, true) => out.push_str(&text),
                ("1", false) => out.push_str(&mono),
                (_, false) => {
                    out.push_str(&text);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

fn small_int<T: Scalar>(n: u32) -> T {
    (0..n).fold(T::zero(), |acc, _| acc + T::one())
}

fn monomial_text(e: Exponents) -> String {
    let parts: Vec<String> = ["x", "y", "z"]
        .iter()
        .zip(e)
        .filter(|(_, k)| *k > 0)
        .map(|(v, k)| if k == 1 { v.to_string() } else { format!("{v}^{k}") })
        .collect();
    parts.join("*")
}

impl fmt::Display for Form<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self.render(|c| (c.is_negative(), format_rational(&c.abs())));
        f.write_str(&text)
    }
}

/// A nonzero homogeneous quartic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Form<T>", into = "Form<T>", bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct TernaryQuartic<T>(Form<T>);

impl<T: Scalar> TernaryQuartic<T> {
    pub fn new(form: Form<T>) -> Result<Self, FormError> {
        if form.degree() != 4 {
            return Err(FormError::NotHomogeneous { expected: 4, found: form.degree() });
        }
        if form.is_zero() {
            return Err(FormError::ZeroForm);
        }
        Ok(Self(form))
    }

    pub fn from_terms<I>(terms: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Exponents, T)>,
    {
        Self::new(Form::from_terms(4, terms)?)
    }

    pub fn form(&self) -> &Form<T> {
        &self.0
    }

    pub fn into_form(self) -> Form<T> {
        self.0
    }

    pub fn scale(&self, factor: &T) -> Result<Self, FormError> {
        Self::new(self.0.scale(factor))
    }

    pub fn substitute(&self, rows: &[[T; 3]; 3]) -> Result<Self, FormError> {
        Self::new(self.0.substitute(rows))
    }
}

impl TernaryQuartic<BigRational> {
    pub fn to_complex(&self) -> TernaryQuartic<num_complex::Complex64> {
        TernaryQuartic(self.0.map(num_complex::Complex64::from_rational))
    }

    pub fn to_f64(&self) -> TernaryQuartic<f64> {
        TernaryQuartic(self.0.map(f64::from_rational))
    }

    /// The Fermat quartic `x⁴ + y⁴ + z⁴`.
    pub fn fermat() -> Self {
        Self::from_terms([
            ([4, 0, 0], BigRational::one()),
            ([0, 4, 0], BigRational::one()),
            ([0, 0, 4], BigRational::one()),
        ])
        .expect("nonzero quartic")
    }
}

impl<T> Deref for TernaryQuartic<T> {
    type Target = Form<T>;

    fn deref(&self) -> &Form<T> {
        &self.0
    }
}

impl<T: Scalar> TryFrom<Form<T>> for TernaryQuartic<T> {
    type Error = FormError;

    fn try_from(form: Form<T>) -> Result<Self, FormError> {
        Self::new(form)
    }
}

impl<T> From<TernaryQuartic<T>> for Form<T> {
    fn from(q: TernaryQuartic<T>) -> Form<T> {
        q.0
    }
}

impl fmt::Display for TernaryQuartic<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Quadratic form with coefficients indexed by [`MONOMIAL_ORDER`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticForm<T> {
    pub coeffs: [T; 6],
}

impl<T: Scalar> QuadraticForm<T> {
    pub fn new(coeffs: [T; 6]) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: std::array::from_fn(|_| T::zero()) }
    }

    /// Single monomial `m[index]` with coefficient one.
    pub fn unit(index: usize) -> Self {
        let mut q = Self::zero();
        q.coeffs[index] = T::one();
        q
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { coeffs: std::array::from_fn(|i| self.coeffs[i].clone() + other.coeffs[i].clone()) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { coeffs: std::array::from_fn(|i| self.coeffs[i].clone() - other.coeffs[i].clone()) }
    }

    pub fn scale(&self, factor: &T) -> Self {
        Self { coeffs: std::array::from_fn(|i| self.coeffs[i].clone() * factor.clone()) }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> QuadraticForm<U> {
        QuadraticForm { coeffs: std::array::from_fn(|i| f(&self.coeffs[i])) }
    }

    pub fn to_form(&self) -> Form<T> {
        Form::from_terms(2, MONOMIAL_ORDER.iter().copied().zip(self.coeffs.iter().cloned()))
            .expect("quadratic monomials")
    }

    pub fn eval(&self, point: &[T; 3]) -> T {
        let [x, y, z] = point.clone();
        let m = [
            x.clone() * x.clone(),
            y.clone() * y.clone(),
            z.clone() * z.clone(),
            y.clone() * z.clone(),
            x.clone() * z,
            x * y,
        ];
        self.coeffs.iter().zip(m).fold(T::zero(), |acc, (c, v)| acc + c.clone() * v)
    }
}

/// Exact product `u·v` as a quartic form.
pub fn quad_product<T: Scalar>(u: &QuadraticForm<T>, v: &QuadraticForm<T>) -> Form<T> {
    let mut out = Form::<T>::zero(4);
    for (i, a) in u.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in v.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let (ei, ej) = (MONOMIAL_ORDER[i], MONOMIAL_ORDER[j]);
            let idx = monomial_index([ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2]]);
            out.coeffs[idx] = out.coeffs[idx].clone() + a.clone() * b.clone();
        }
    }
    out
}

pub fn quad_square<T: Scalar>(u: &QuadraticForm<T>) -> Form<T> {
    quad_product(u, u)
}

/// `Σ signs[i]·forms[i]²`.
pub fn signed_sum_of_squares<T: Scalar>(signs: &[i8; 3], forms: &[QuadraticForm<T>; 3]) -> Form<T> {
    signs.iter().zip(forms).fold(Form::zero(4), |acc, (s, q)| {
        let sq = quad_square(q);
        if *s < 0 {
            acc.sub(&sq)
        } else {
            acc.add(&sq)
        }
    })
}
