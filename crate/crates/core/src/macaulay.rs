//! Exact Macaulay resultant of three ternary forms.
//!
//! For forms of degrees `d₁, d₂, d₃` the Macaulay matrix has one column per
//! monomial of degree `D = d₁ + d₂ + d₃ − 2`. A monomial divisible by
//! `x_{i}^{d_i}` for the first such `i` in the chosen variable priority
//! contributes the row `(monomial / x_i^{d_i})·F_i`. The resultant is
//! `det M / det M'`, where `M'` keeps the rows and columns of monomials
//! divisible by at least two of the `x_i^{d_i}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::form::{monomial_count, monomial_index, monomials, Exponents, Form};

/// Determinants of the Macaulay matrix and its extraneous minor.
#[derive(Clone, Debug, PartialEq)]
pub struct MacaulayQuotient {
    pub numerator: BigRational,
    pub denominator: BigRational,
    /// Variable priority used to assign monomials to forms.
    pub priority: [usize; 3],
}

impl MacaulayQuotient {
    /// `None` when the extraneous minor vanishes and the quotient is undefined.
    pub fn resultant(&self) -> Option<BigRational> {
        (!self.denominator.is_zero()).then(|| &self.numerator / &self.denominator)
    }
}

/// Macaulay quotient for `forms` under the given variable priority.
pub fn macaulay_quotient(forms: &[Form<BigRational>; 3], priority: [usize; 3]) -> MacaulayQuotient {
    let degrees = forms.each_ref().map(|f| f.degree());
    let big_d = degrees.iter().sum::<u32>().saturating_sub(2);
    let columns = monomials(big_d);
    let n = columns.len();

    let divisible = |e: &Exponents, var: usize| e[var] >= degrees[var];
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    for e in &columns {
        let var = priority
            .iter()
            .copied()
            .find(|&v| divisible(e, v))
            .expect("every degree-D monomial is divisible by some x_i^d_i");
        let mut shift = *e;
        shift[var] -= degrees[var];
        let mut row = vec![BigRational::zero(); n];
        for (fe, c) in forms[var].terms() {
            if c.is_zero() {
                continue;
            }
            row[monomial_index([fe[0] + shift[0], fe[1] + shift[1], fe[2] + shift[2]])] = c.clone();
        }
        rows.push(row);
    }

    let extraneous: Vec<usize> = columns
        .iter()
        .enumerate()
        .filter(|(_, e)| (0..3).filter(|&v| divisible(e, v)).count() >= 2)
        .map(|(i, _)| i)
        .collect();
    let minor: Vec<Vec<BigRational>> = extraneous
        .iter()
        .map(|&r| extraneous.iter().map(|&c| rows[r][c].clone()).collect())
        .collect();

    MacaulayQuotient {
        numerator: rational_determinant(&rows),
        denominator: rational_determinant(&minor),
        priority,
    }
}

/// Resultant through the perturbation `F_i + t·x_i^{d_i}`.
///
/// Numerator and denominator of the perturbed quotient are polynomials in `t`
/// (recovered by exact interpolation). Their quotient is a polynomial whose
/// value at `t = 0` is the resultant, i.e. the ratio of the lowest-order
/// coefficients. Defined even when the unperturbed minor vanishes.
pub fn perturbed_resultant(forms: &[Form<BigRational>; 3], priority: [usize; 3]) -> BigRational {
    let degrees = forms.each_ref().map(|f| f.degree());
    let columns = monomial_count(degrees.iter().sum::<u32>().saturating_sub(2));
    let samples: Vec<(BigRational, MacaulayQuotient)> = (0..=columns as i64)
        .map(|t| {
            let t = BigRational::from_integer(t.into());
            let shifted: [Form<BigRational>; 3] = std::array::from_fn(|i| {
                let mut power = [0u32; 3];
                power[i] = degrees[i];
                forms[i].add(&Form::from_terms(degrees[i], [(power, t.clone())]).expect("pure power"))
            });
            (t, macaulay_quotient(&shifted, priority))
        })
        .collect();
    let xs: Vec<BigRational> = samples.iter().map(|(t, _)| t.clone()).collect();
    let num = interpolate(&xs, &samples.iter().map(|(_, q)| q.numerator.clone()).collect::<Vec<_>>());
    let den = interpolate(&xs, &samples.iter().map(|(_, q)| q.denominator.clone()).collect::<Vec<_>>());
    let order = den.iter().position(|c| !c.is_zero()).expect("perturbed minor is a nonzero polynomial");
    &num[order] / &den[order]
}

/// Coefficients (ascending) of the polynomial through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Vec<BigRational> {
    let n = xs.len();
    // Newton divided differences, then expand the Newton form
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    let mut coeffs = vec![BigRational::zero(); n];
    for k in (0..n).rev() {
        // coeffs = coeffs·(t − xs[k]) + dd[k]
        let mut next = vec![BigRational::zero(); n];
        for j in 0..n {
            if coeffs[j].is_zero() {
                continue;
            }
            if j + 1 < n {
                next[j + 1] += &coeffs[j];
            }
            next[j] -= &coeffs[j] * &xs[k];
        }
        next[0] += &dd[k];
        coeffs = next;
    }
    coeffs
}

/// Determinant of a square rational matrix, exact.
pub fn rational_determinant(rows: &[Vec<BigRational>]) -> BigRational {
    if rows.is_empty() {
        return BigRational::one();
    }
    // clear denominators row by row, then run Bareiss over the integers
    let mut scale = BigInt::one();
    let mut ints: Vec<Vec<BigInt>> = Vec::with_capacity(rows.len());
    for row in rows {
        let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        ints.push(row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect());
        scale *= lcm;
    }
    BigRational::new(bareiss_determinant(ints), scale)
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Rank of a rational matrix by exact elimination.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for i in 0..a.len() {
            if i != rank && !a[i][col].is_zero() {
                let factor = &a[i][col] / &pivot;
                for j in col..ncols {
                    let v = &a[rank][j] * &factor;
                    a[i][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}
