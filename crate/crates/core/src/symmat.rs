use nalgebra::Matrix6;
use serde::{Deserialize, Serialize};

use crate::scalar::{Magnitude, Scalar};

/// Position of `(i, j)` in the row-major upper triangle.
const fn packed_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    6 * i - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Symmetric 6×6 matrix stored as its 21 upper-triangle entries in row-major
/// order. Serializes as that flat list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymMatrix6<T> {
    entries: Vec<T>,
}

impl<T: Scalar> SymMatrix6<T> {
    pub fn zero() -> Self {
        Self { entries: vec![T::zero(); 21] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..6 {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn diagonal(values: [T; 6]) -> Self {
        let mut m = Self::zero();
        for (i, v) in values.into_iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zero();
        for i in 0..6 {
            for j in i..6 {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_upper(entries: Vec<T>) -> Option<Self> {
        (entries.len() == 21).then_some(Self { entries })
    }

    pub fn upper(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[packed_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[packed_index(i, j)] = value;
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, factor: &T) -> Self {
        self.map(|v| v.clone() * factor.clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SymMatrix6<U> {
        SymMatrix6 { entries: self.entries.iter().map(f).collect() }
    }

    /// `self + factor·vvᵀ`.
    pub fn add_outer(&self, v: &[T; 6], factor: &T) -> Self {
        Self::from_fn(|i, j| self.get(i, j).clone() + factor.clone() * v[i].clone() * v[j].clone())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64
    where
        T: Magnitude,
    {
        self.sub(other).entries.iter().map(Magnitude::magnitude).fold(0.0, f64::max)
    }

    pub fn max_magnitude(&self) -> f64
    where
        T: Magnitude,
    {
        self.entries.iter().map(Magnitude::magnitude).fold(0.0, f64::max)
    }

    pub fn to_matrix(&self) -> Matrix6<T>
    where
        T: nalgebra::Scalar,
    {
        Matrix6::from_fn(|i, j| self.get(i, j).clone())
    }

    /// Symmetric part of a dense matrix.
    pub fn from_matrix(m: &Matrix6<T>) -> Self
    where
        T: nalgebra::Scalar,
    {
        Self::from_fn(|i, j| m[(i, j)].clone())
    }
}
