//! Seeded smooth non-negative test quartics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::curve::smoothness_test;
use crate::form::{quad_square, QuadraticForm, TernaryQuartic};
use crate::macaulay::rational_determinant;
use crate::scalar::rational;

/// Weight of the `(x²+y²+z²)²` bump.
pub fn epsilon() -> BigRational {
    rational(1, 100)
}

/// Coefficient range of the random quadratics.
pub const COEFF_RANGE: i64 = 3;

fn random_quadratic(rng: &mut ChaCha8Rng) -> QuadraticForm<BigRational> {
    QuadraticForm::new(std::array::from_fn(|_| {
        let num = rng.random_range(-COEFF_RANGE..=COEFF_RANGE);
        let den = rng.random_range(1..=2);
        rational(num, den)
    }))
}

/// `p² + q² + r² + ε·(x²+y²+z²)²` for random rational `p, q, r`.
pub fn random_candidate(rng: &mut ChaCha8Rng) -> TernaryQuartic<BigRational> {
    let bump = quad_square(&QuadraticForm::new([1, 1, 1, 0, 0, 0].map(|v| rational(v, 1)))).scale(&epsilon());
    let form = (0..3).fold(bump, |acc, _| acc.add(&quad_square(&random_quadratic(rng))));
    TernaryQuartic::new(form).expect("the bump keeps the form nonzero")
}

/// The `index`-th corpus quartic for `seed`, regenerated until smooth.
pub fn random_smooth_quartic(seed: u64, index: u64) -> TernaryQuartic<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    loop {
        let f = random_candidate(&mut rng);
        if smoothness_test(&f).is_smooth() {
            return f;
        }
    }
}

/// Fermat quartic followed by `count` seeded random quartics.
pub fn corpus(seed: u64, count: usize) -> Vec<TernaryQuartic<BigRational>> {
    std::iter::once(TernaryQuartic::fermat())
        .chain((0..count as u64).map(|i| random_smooth_quartic(seed, i)))
        .collect()
}

/// Random invertible 3×3 matrix with small integer entries.
pub fn random_change_of_variables(rng: &mut ChaCha8Rng) -> [[BigRational; 3]; 3] {
    loop {
        let m: [[BigRational; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| BigRational::from_integer(BigInt::from(rng.random_range(-2i64..=2)))));
        let rows: Vec<Vec<BigRational>> = m.iter().map(|r| r.to_vec()).collect();
        if !rational_determinant(&rows).is_zero() {
            return m;
        }
    }
}
