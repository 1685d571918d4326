//! Scalar abstraction shared by the exact and floating-point layers.
//!
//! Forms and matrices are generic over [`Scalar`], which is implemented for
//! every `num_traits::Num` type with negation. In practice the crate uses
//! [`BigRational`] for exact work, `f64` for real numerics and
//! [`Complex64`] for the solver.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + Clone + Neg<Output = Self> + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Num + Clone + Neg<Output = Self> + Debug + Send + Sync + 'static {}

/// Conversion out of exact rationals, the input layer of every form.
pub trait FromRational: Scalar {
    fn from_rational(value: &BigRational) -> Self;
}

impl FromRational for BigRational {
    fn from_rational(value: &BigRational) -> Self {
        value.clone()
    }
}

impl FromRational for f64 {
    fn from_rational(value: &BigRational) -> Self {
        value.to_f64().unwrap_or(f64::NAN)
    }
}

impl FromRational for Complex64 {
    fn from_rational(value: &BigRational) -> Self {
        Complex64::new(f64::from_rational(value), 0.0)
    }
}

impl FromRational for Complex<BigRational> {
    fn from_rational(value: &BigRational) -> Self {
        Complex::new(value.clone(), BigRational::zero())
    }
}

/// Absolute value as a double, used for residuals and tolerances.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Magnitude for BigRational {
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Magnitude for Complex<BigRational> {
    fn magnitude(&self) -> f64 {
        self.re.magnitude().hypot(self.im.magnitude())
    }
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(value: f64) -> BigRational {
    BigRational::from_float(value).unwrap_or_else(BigRational::zero)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical text for a rational: `n` for integers, `n/d` otherwise.
pub fn format_rational(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_convert_exactly() {
        assert_eq!(rational_from_f64(0.5), rational(1, 2));
        assert_eq!(rational_from_f64(-3.0), rational(-3, 1));
        let tenth = rational_from_f64(0.1);
        assert_ne!(tenth, rational(1, 10));
        assert_eq!(f64::from_rational(&tenth), 0.1);
        assert_eq!(rational_from_f64(f64::NAN), rational(0, 1));
    }

    #[test]
    fn rational_text() {
        assert_eq!(format_rational(&rational(6, 3)), "2");
        assert_eq!(format_rational(&rational(-2, 4)), "-1/2");
    }

    #[test]
    fn magnitudes() {
        assert_eq!(rational(-3, 4).magnitude(), 0.75);
        assert_eq!(Complex64::new(3.0, 4.0).magnitude(), 5.0);
        assert_eq!(Complex::new(rational(3, 1), rational(-4, 1)).magnitude(), 5.0);
    }
}
