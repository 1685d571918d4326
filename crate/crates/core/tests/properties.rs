use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use quartic_sos::curve::numeric_singularity_oracle;
use quartic_sos::form::{monomial_index, monomials, MONOMIAL_ORDER};
use quartic_sos::gram::kernel_matrix;
use quartic_sos::macaulay::rational_rank;
use quartic_sos::{
    factor_complex, factor_real, gram_to_quartic, parse_quartic, quad_product, representation_to_gram,
    smoothness_test, Complex64, Form, GramFamily, Quartic, QuadraticForm, SymMatrix6, TernaryQuartic,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-30i64..=30, 1i64..=7).prop_map(|(n, d)| q(n, d))
}

fn quartic() -> impl Strategy<Value = Quartic> {
    proptest::collection::vec(rational(), 15)
        .prop_filter_map("nonzero", |c| TernaryQuartic::new(Form::from_coeffs(4, c).ok()?).ok())
}

fn lambda() -> impl Strategy<Value = [BigRational; 6]> {
    proptest::collection::vec(rational(), 6).prop_map(|v| std::array::from_fn(|i| v[i].clone()))
}

fn quadratic() -> impl Strategy<Value = QuadraticForm<BigRational>> {
    proptest::collection::vec(rational(), 6).prop_map(|v| QuadraticForm::new(std::array::from_fn(|i| v[i].clone())))
}

fn monomial_values(p: &[BigRational; 3]) -> [BigRational; 6] {
    MONOMIAL_ORDER.map(|e| (0..3).fold(BigRational::one(), |acc, k| acc * p[k].pow(e[k] as i32)))
}

/// `mᵀ G m` at a point, without going through the coefficient map.
fn quadratic_form_value(g: &SymMatrix6<BigRational>, p: &[BigRational; 3]) -> BigRational {
    let m = monomial_values(p);
    let mut total = BigRational::zero();
    for i in 0..6 {
        for j in 0..6 {
            total += g.get(i, j) * &m[i] * &m[j];
        }
    }
    total
}

/// Quartic coefficients of `m_i·m_j`, built from exponent addition alone.
fn product_column(i: usize, j: usize) -> Vec<BigRational> {
    let mut col = vec![BigRational::zero(); 15];
    let (a, b) = (MONOMIAL_ORDER[i], MONOMIAL_ORDER[j]);
    col[monomial_index([a[0] + b[0], a[1] + b[1], a[2] + b[2]])] += q(if i == j { 1 } else { 2 }, 1);
    col
}

fn coefficient_map_rows(columns: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    (0..15).map(|r| columns.iter().map(|c| c[r].clone()).collect()).collect()
}

#[test]
fn gram_map_has_six_dimensional_kernel() {
    let mut columns = Vec::new();
    for i in 0..6 {
        for j in i..6 {
            columns.push(product_column(i, j));
        }
    }
    assert_eq!(columns.len(), 21);
    assert_eq!(rational_rank(&coefficient_map_rows(&columns)), 15);

    // the six basis matrices lie in the kernel and are independent
    let mut flattened = Vec::new();
    for k in 0..6 {
        let b = kernel_matrix::<BigRational>(k);
        let mut image = vec![BigRational::zero(); 15];
        let mut col = 0;
        for i in 0..6 {
            for j in i..6 {
                for (r, v) in columns[col].iter().enumerate() {
                    image[r] += v * b.get(i, j);
                }
                col += 1;
            }
        }
        assert!(image.iter().all(Zero::is_zero), "basis matrix {k} is not in the kernel");
        flattened.push(b.upper().to_vec());
    }
    assert_eq!(rational_rank(&flattened), 6);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn family_reproduces_the_quartic(f in quartic(), l in lambda(), p in proptest::collection::vec(rational(), 3)) {
        let family = GramFamily::new(&f);
        let g = family.matrix_at(&l);
        prop_assert_eq!(&gram_to_quartic(&g), f.form());
        let point = [p[0].clone(), p[1].clone(), p[2].clone()];
        prop_assert_eq!(quadratic_form_value(&g, &point), f.eval(&point));
        prop_assert_eq!(family.lambda_of_gram(&g).unwrap(), l);
    }

    #[test]
    fn euler_relation(f in quartic()) {
        let parsed = parse_quartic(&f.form().to_string()).unwrap();
        prop_assert_eq!(&parsed, &f);
        let vars: [Form<BigRational>; 3] = std::array::from_fn(|i| {
            let mut e = [0u32; 3];
            e[i] = 1;
            Form::from_terms(1, [(e, BigRational::one())]).unwrap()
        });
        let grad = f.gradient();
        let lhs = (0..3).fold(Form::zero(4), |acc, i| acc.add(&vars[i].mul(&grad[i])));
        prop_assert_eq!(lhs, f.form().scale(&q(4, 1)));
    }

    #[test]
    fn quad_product_is_symmetric_and_bilinear(u in quadratic(), v in quadratic(), w in quadratic(), a in rational(), b in rational()) {
        prop_assert_eq!(quad_product(&u, &v), quad_product(&v, &u));
        let mixed = u.scale(&a).add(&w.scale(&b));
        let lhs = quad_product(&mixed, &v);
        let rhs = quad_product(&u, &v).scale(&a).add(&quad_product(&w, &v).scale(&b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn orthogonal_mixing_keeps_the_gram_matrix(forms in proptest::collection::vec(quadratic(), 3), s in proptest::collection::vec(rational(), 3)) {
        let forms: [QuadraticForm<BigRational>; 3] = std::array::from_fn(|i| forms[i].clone());
        let o = cayley(&[s[0].clone(), s[1].clone(), s[2].clone()]);
        let mixed: [QuadraticForm<BigRational>; 3] = std::array::from_fn(|i| {
            (0..3).fold(QuadraticForm::zero(), |acc, j| acc.add(&forms[j].scale(&o[i][j])))
        });
        let signs = [1, 1, 1];
        prop_assert_eq!(representation_to_gram(&signs, &mixed), representation_to_gram(&signs, &forms));
    }

    #[test]
    fn factorizations_reproduce_the_matrix(
        coeffs in proptest::collection::vec(-3.0f64..3.0, 18),
        signs in proptest::array::uniform3(prop_oneof![Just(1i8), Just(-1i8)]),
    ) {
        let forms: [QuadraticForm<f64>; 3] = std::array::from_fn(|i| QuadraticForm::new(std::array::from_fn(|k| coeffs[6 * i + k])));
        let g = representation_to_gram(&signs, &forms);
        let sv = g.to_matrix().singular_values();
        let mut sorted: Vec<f64> = sv.iter().copied().collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        prop_assume!(sorted[2] > 1e-3 * sorted[0]);
        let scale = g.max_magnitude();

        let real = factor_real(&g).unwrap();
        prop_assert!(real.gram().max_abs_diff(&g) <= 1e-9 * scale.max(1.0));
        let mut expected = signs;
        expected.sort_by(|a, b| b.cmp(a));
        prop_assert_eq!(real.signs, expected);

        let gc = g.map(|v| Complex64::new(*v, 0.0));
        let complex = factor_complex(&gc).unwrap();
        prop_assert!(complex.gram().max_abs_diff(&gc) <= 1e-9 * scale.max(1.0));
    }
}

/// `(I − S)(I + S)⁻¹` for the skew matrix with entries `s`, exact.
fn cayley(s: &[BigRational; 3]) -> [[BigRational; 3]; 3] {
    let (a, b, c) = (&s[0], &s[1], &s[2]);
    let zero = BigRational::zero();
    let skew = [[zero.clone(), a.clone(), b.clone()], [-a.clone(), zero.clone(), c.clone()], [-b.clone(), -c.clone(), zero]];
    let id = |i: usize, j: usize| if i == j { BigRational::one() } else { BigRational::zero() };
    let plus: [[BigRational; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| id(i, j) + &skew[i][j]));
    let minus: [[BigRational; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| id(i, j) - &skew[i][j]));
    let inv = inverse3(&plus);
    let o: [[BigRational; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| (0..3).fold(BigRational::zero(), |acc, k| acc + &minus[i][k] * &inv[k][j])));
    for i in 0..3 {
        for j in 0..3 {
            let dot = (0..3).fold(BigRational::zero(), |acc, k| acc + &o[i][k] * &o[j][k]);
            assert_eq!(dot, id(i, j));
        }
    }
    o
}

fn inverse3(m: &[[BigRational; 3]; 3]) -> [[BigRational; 3]; 3] {
    let cof = |i: usize, j: usize| {
        let r = [(i + 1) % 3, (i + 2) % 3];
        let c = [(j + 1) % 3, (j + 2) % 3];
        &m[r[0]][c[0]] * &m[r[1]][c[1]] - &m[r[0]][c[1]] * &m[r[1]][c[0]]
    };
    let det = (0..3).fold(BigRational::zero(), |acc, j| acc + &m[0][j] * cof(0, j));
    std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i) / &det))
}

fn random_small(rng: &mut ChaCha8Rng) -> BigRational {
    q(rng.random_range(-5..=5), rng.random_range(1..=3))
}

/// Random quartic, or one singular at a random rational point when `singular`.
fn seeded_quartic(rng: &mut ChaCha8Rng, singular: bool) -> Quartic {
    loop {
        let coeffs: Vec<BigRational> = monomials(4)
            .iter()
            .map(|e| {
                // no z^4, x z^3, y z^3 terms: singular at (0 : 0 : 1)
                if singular && e[2] >= 3 {
                    BigRational::zero()
                } else {
                    random_small(rng)
                }
            })
            .collect();
        let Ok(f) = TernaryQuartic::new(Form::from_coeffs(4, coeffs).unwrap()) else { continue };
        if !singular {
            return f;
        }
        let m: [[BigRational; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| random_small(rng)));
        let det = (0..3).fold(BigRational::zero(), |acc, j| {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            acc + &m[0][j] * (&m[1][a] * &m[2][b] - &m[1][b] * &m[2][a])
        });
        if det.is_zero() {
            continue;
        }
        if let Ok(g) = f.substitute(&m) {
            return g;
        }
    }
}

#[test]
fn resultant_agrees_with_numeric_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut singular_seen = 0;
    for i in 0..50 {
        let forced = i % 2 == 1;
        let f = seeded_quartic(&mut rng, forced);
        let exact = smoothness_test(&f);
        let witness = numeric_singularity_oracle(&f, 200, i);
        assert_eq!(exact.is_smooth(), witness.is_none(), "disagreement on {f}");
        if forced {
            assert!(!exact.is_smooth(), "forced singular quartic reported smooth: {f}");
            singular_seen += 1;
        }
    }
    assert_eq!(singular_seen, 25);
}

#[test]
fn positive_scaling_keeps_the_verdicts() {
    let cases = ["x^4 + y^4 + z^4", "x^4 + y^4 - z^4", "x^2y^2 + y^2z^2 + z^2x^2 + 1/10 x^4", "(x^2+y^2+z^2)^2"];
    for text in cases {
        let f = parse_quartic(text).unwrap();
        let family = GramFamily::new(&f);
        let base = quartic_sos::nonnegativity_test(&f, &family, 1).verdict;
        for factor in [q(1, 1000), q(1000, 1), q(7, 3)] {
            let g = f.scale(&factor).unwrap();
            assert_eq!(smoothness_test(&g).is_smooth(), smoothness_test(&f).is_smooth(), "{text}");
            let verdict = quartic_sos::nonnegativity_test(&g, &GramFamily::new(&g), 1).verdict;
            assert_eq!(verdict, base, "{text} scaled by {factor}");
        }
    }
}
