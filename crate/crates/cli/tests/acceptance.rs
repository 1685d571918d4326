//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any of them fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use quartic_sos::classify::complete_squares;
use quartic_sos::curve::numeric_singularity_oracle;
use quartic_sos::form::{monomials, MONOMIAL_ORDER};
use quartic_sos::scalar::{rational, rational_from_f64};
use quartic_sos::{
    factor_complex, factor_real, gram_to_quartic, nonnegativity_test, parse_quartic, representation_to_gram,
    smoothness_test, solve_all, BigRational, Complex64, Form, GramFamily, Quartic, QuadraticForm, SolveConfig,
    SymMatrix6, TernaryQuartic,
};
use quartic_sos::FromRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Run {
    stdout: String,
    code: i32,
}

fn binary(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_quartic-sos"))
        .args(args)
        .env_remove("QUARTIC_SOS_SEED")
        .output()
        .expect("binary runs");
    Run { stdout: String::from_utf8_lossy(&out.stdout).into_owned(), code: out.status.code().unwrap_or(-1) }
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

fn read_json(path: &PathBuf) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))
}

fn counts_of(report: &Value) -> Option<(u64, u64, u64)> {
    let c = &report["solutions"]["counts"];
    Some((c["complex_total"].as_u64()?, c["real_total"].as_u64()?, c["psd_total"].as_u64()?))
}

fn complex(v: &Value) -> Complex64 {
    Complex64::new(v[0].as_f64().unwrap_or(f64::NAN), v[1].as_f64().unwrap_or(f64::NAN))
}

fn decompose_json(form: &str, name: &str, extra: &[&str]) -> Result<(Run, Value), String> {
    let path = scratch(name);
    let path_text = path.to_string_lossy().into_owned();
    let mut args = vec!["decompose", form, "--json", &path_text];
    args.extend_from_slice(extra);
    let run = binary(&args);
    let report = read_json(&path)?;
    Ok((run, report))
}

/// `Σ εᵢ·formᵢ(p)²` against `f(p)` at random complex points, in doubles.
fn evaluation_oracle(f: &Quartic, cert: &Value, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let fc = f.to_complex();
    let signs: Vec<f64> = cert["signs"].as_array().ok_or("signs")?.iter().map(|s| s.as_f64().unwrap_or(0.0)).collect();
    let forms: Vec<Vec<Complex64>> = cert["forms"]
        .as_array()
        .ok_or("forms")?
        .iter()
        .map(|row| row.as_array().map(|r| r.iter().map(complex).collect()).unwrap_or_default())
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let p: [Complex64; 3] = std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m: Vec<Complex64> = MONOMIAL_ORDER.iter().map(|e| p[0].powu(e[0]) * p[1].powu(e[1]) * p[2].powu(e[2])).collect();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut size = 0.0;
        for (s, form) in signs.iter().zip(&forms) {
            let v: Complex64 = form.iter().zip(&m).map(|(c, x)| c * x).sum();
            sum += v * v * *s;
            size += form.iter().zip(&m).map(|(c, x)| (c * x).norm()).sum::<f64>().powi(2);
        }
        let target = fc.eval(&p);
        worst = worst.max((sum - target).norm() / size.max(target.norm()).max(1e-300));
    }
    Ok(worst)
}

fn criterion_1_and_2() -> (Check, Check) {
    let start = Instant::now();
    let result = decompose_json("x^4+y^4+z^4", "fermat.json", &[]);
    let elapsed = start.elapsed();
    let (run, report) = match result {
        Ok(v) => v,
        Err(e) => return (Err(e.clone()), Err(e)),
    };
    let first = (|| {
        ensure!(run.code == 0, "exit code {}", run.code);
        let counts = counts_of(&report).ok_or("no counts")?;
        ensure!(counts == (63, 15, 8), "counts {counts:?}");
        ensure!(report["config"]["restarts"] == 20000, "restarts {}", report["config"]["restarts"]);
        ensure!(report["config"]["dedup_tol"].as_f64() == Some(1e-6), "dedup tolerance");
        ensure!(elapsed <= Duration::from_secs(300), "took {elapsed:?}");
        Ok(format!("(63, 15, 8) in {:.1} s", elapsed.as_secs_f64()))
    })();
    let second = (|| {
        let f = Quartic::fermat();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let certs = report["certificates"].as_array().ok_or("no certificates")?;
        let (mut sos, mut mixed, mut nonreal) = (0, 0, 0);
        for cert in certs {
            let residual = cert["residual"].as_f64().unwrap_or(f64::INFINITY);
            ensure!(residual <= 1e-8, "certificate residual {residual}");
            ensure!(cert["basepoint_free"] == true, "certificate with basepoints");
            let oracle = evaluation_oracle(&f, cert, &mut rng)?;
            ensure!(oracle <= 1e-9, "evaluation oracle disagrees by {oracle}");
            let coefficients = cert["forms"].as_array().ok_or("forms")?.iter().filter_map(Value::as_array).flatten();
            let real = coefficients.map(|c| c[1].as_f64()).all(|im| im == Some(0.0));
            let signs: Vec<i64> = cert["signs"].as_array().unwrap().iter().filter_map(Value::as_i64).collect();
            match (real, signs.iter().all(|s| *s > 0), signs.iter().any(|s| *s > 0) && signs.iter().any(|s| *s < 0)) {
                (true, true, _) => sos += 1,
                (true, false, true) => mixed += 1,
                (false, _, _) => nonreal += 1,
                _ => return Err(format!("real certificate with signs {signs:?}")),
            }
        }
        ensure!((sos, mixed, nonreal) == (8, 7, 48), "split {sos} / {mixed} / {nonreal}");

        let points = report["solutions"]["points"].as_array().ok_or("no points")?;
        let lambdas: Vec<Vec<Complex64>> = points
            .iter()
            .filter(|p| p["reality"] == "complex")
            .map(|p| p["lambda"].as_array().unwrap().iter().map(complex).collect())
            .collect();
        let mut used = vec![false; lambdas.len()];
        let mut pairs = 0;
        for i in 0..lambdas.len() {
            if used[i] {
                continue;
            }
            let partner = (0..lambdas.len()).find(|&j| {
                j != i
                    && !used[j]
                    && lambdas[i].iter().zip(&lambdas[j]).map(|(a, b)| (a.conj() - b).norm_sqr()).sum::<f64>().sqrt() <= 1e-6
            });
            let j = partner.ok_or("non-real class without conjugate")?;
            used[i] = true;
            used[j] = true;
            pairs += 1;
        }
        ensure!(pairs == 24, "{pairs} conjugate pairs");

        let path = scratch("fermat.json");
        let verify = binary(&["verify", "x^4+y^4+z^4", "--cert", &path.to_string_lossy()]);
        ensure!(verify.code == 0, "verify round trip failed");
        Ok("8 sums of squares, 7 mixed-sign, 24 conjugate pairs; all certificates re-verify".into())
    })();
    (first, second)
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let path = scratch("corpus.json");
    let run = binary(&["corpus", "--count", "5", "--seed", "5", "--json", &path.to_string_lossy()]);
    let elapsed = start.elapsed();
    let rows = read_json(&path)?;
    let rows = rows.as_array().ok_or("rows")?;
    ensure!(rows.len() == 6, "{} rows", rows.len());
    for row in rows {
        let c = &row["counts"];
        let counts = (c["complex_total"].as_u64(), c["real_total"].as_u64(), c["psd_total"].as_u64());
        ensure!(counts == (Some(63), Some(15), Some(8)), "row {} counts {counts:?}", row["index"]);
        ensure!(row["pass"] == true, "row {} failed", row["index"]);
        let f = parse_quartic(row["input"].as_str().unwrap_or("")).map_err(|e| e.to_string())?;
        ensure!(smoothness_test(&f).is_smooth(), "row {} not smooth", row["index"]);
    }
    ensure!(run.code == 0, "exit code {}", run.code);
    ensure!(elapsed <= Duration::from_secs(1800), "took {elapsed:?}");
    Ok(format!("Fermat + 5 random rows all (63, 15, 8) in {:.1} s", elapsed.as_secs_f64()))
}

fn criterion_4() -> Check {
    let text = "x^4+y^4-z^4";
    let run = binary(&["check", text]);
    ensure!(run.stdout.contains("smooth: yes"), "not reported smooth");
    ensure!(run.stdout.contains("nonnegative: no"), "not reported indefinite");
    let line = run.stdout.lines().find(|l| l.starts_with("counterexample:")).ok_or("no counterexample")?;
    let inside = line.split('(').nth(1).and_then(|s| s.split(')').next()).ok_or("malformed counterexample")?;
    let coords: Vec<f64> = inside.split(',').filter_map(|s| s.trim().parse().ok()).collect();
    ensure!(coords.len() == 3, "counterexample coordinates {inside}");
    let f = parse_quartic(text).map_err(|e| e.to_string())?;
    let exact = f.eval(&[coords[0], coords[1], coords[2]].map(rational_from_f64));
    ensure!(exact < rational(0, 1), "counterexample evaluates to {exact}");

    let family = GramFamily::new(&f);
    let solutions = solve_all(&family, &SolveConfig::default());
    ensure!(solutions.counts.psd_total == 0, "psd_total {}", solutions.counts.psd_total);
    let positivity = nonnegativity_test(&f, &family, 0);
    ensure!(positivity.max_min_eigenvalue < 0.0, "a Gram matrix looks PSD");
    let run = binary(&["decompose", text]);
    ensure!(run.code == 4, "decompose exit {}", run.code);
    Ok(format!(
        "smooth, f = {:.6e} at the counterexample, psd_total 0 ({} complex, {} real)",
        f64::from_rational(&exact), solutions.counts.complex_total, solutions.counts.real_total
    ))
}

fn criterion_5() -> Check {
    let text = "(x^2+y^2+z^2)^2";
    let f = parse_quartic(text).map_err(|e| e.to_string())?;
    ensure!(!smoothness_test(&f).is_smooth(), "resultant reports smooth");
    let check = binary(&["check", text]);
    ensure!(check.stdout.contains("smooth: no"), "check does not report singular");
    let (run, report) = decompose_json(text, "singular.json", &[])?;
    ensure!(run.code == 4, "exit code {}", run.code);
    ensure!(run.stdout.contains("singular"), "failure not named");
    ensure!(!run.stdout.contains("classes:"), "counts printed");
    ensure!(report["solutions"].is_null() && report["expected"].is_null(), "counts recorded");
    Ok("singular, exit 4, no counts".into())
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    rational(rng.random_range(-20..=20), rng.random_range(1..=6))
}

fn random_quartic(rng: &mut ChaCha8Rng) -> Quartic {
    loop {
        let coeffs = (0..15).map(|_| random_rational(rng)).collect();
        if let Ok(f) = TernaryQuartic::new(Form::from_coeffs(4, coeffs).expect("15 coefficients")) {
            return f;
        }
    }
}

fn monomial_values(p: &[BigRational; 3]) -> Vec<BigRational> {
    MONOMIAL_ORDER.iter().map(|e| (0..3).fold(rational(1, 1), |acc, k| acc * p[k].pow(e[k] as i32))).collect()
}

fn family_identity(rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..100 {
        let f = random_quartic(rng);
        let lambda: [BigRational; 6] = std::array::from_fn(|_| random_rational(rng));
        let g = GramFamily::new(&f).matrix_at(&lambda);
        ensure!(&gram_to_quartic(&g) == f.form(), "family identity fails for {f}");
        let p: [BigRational; 3] = std::array::from_fn(|_| random_rational(rng));
        let m = monomial_values(&p);
        let mut value = rational(0, 1);
        for i in 0..6 {
            for j in 0..6 {
                value += g.get(i, j) * &m[i] * &m[j];
            }
        }
        ensure!(value == f.eval(&p), "mᵀGm differs from f at a point");
    }
    Ok("100".into())
}

fn euler_relation(rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..100 {
        let f = parse_quartic(&random_quartic(rng).form().to_string()).map_err(|e| e.to_string())?;
        let grad = f.gradient();
        let mut lhs = Form::zero(4);
        for (i, d) in grad.iter().enumerate() {
            let mut e = [0u32; 3];
            e[i] = 1;
            let var = Form::from_terms(1, [(e, rational(1, 1))]).map_err(|e| e.to_string())?;
            lhs = lhs.add(&var.mul(d));
        }
        ensure!(lhs == f.form().scale(&rational(4, 1)), "Euler relation fails for {f}");
    }
    Ok("100".into())
}

fn factor_round_trips(rng: &mut ChaCha8Rng) -> Check {
    let mut tested = 0;
    while tested < 50 {
        let forms: [QuadraticForm<f64>; 3] = std::array::from_fn(|_| QuadraticForm::new(std::array::from_fn(|_| rng.random_range(-2.0..2.0))));
        let signs: [i8; 3] = std::array::from_fn(|_| if rng.random_bool(0.5) { 1 } else { -1 });
        let g = representation_to_gram(&signs, &forms);
        let scale = g.max_magnitude().max(1.0);
        let real = factor_real(&g).map_err(|e| e.to_string())?;
        ensure!(real.gram().max_abs_diff(&g) <= 1e-9 * scale, "factor_real round trip");
        let gc = g.map(|v| Complex64::new(*v, 0.0));
        let cx = factor_complex(&gc).map_err(|e| e.to_string())?;
        ensure!(cx.gram().max_abs_diff(&gc) <= 1e-9 * scale, "factor_complex round trip");
        tested += 1;
    }
    let mut g = SymMatrix6::<Complex64>::zero();
    g.set(0, 1, Complex64::new(0.5, 0.0));
    g.set(2, 2, Complex64::new(-1.0, 0.0));
    let rebuilt = complete_squares(&g, 3).iter().fold(SymMatrix6::zero(), |acc, q| acc.add_outer(&q.coeffs, &Complex64::new(1.0, 0.0)));
    ensure!(rebuilt.max_abs_diff(&g) == 0.0, "q0 q1 - q2^2 split");
    Ok("50".into())
}

/// Rational rotation by the angle with `tan(θ/2) = a` in the `(i, j)` plane.
fn givens(a: &BigRational, i: usize, j: usize) -> [[BigRational; 3]; 3] {
    let n = rational(1, 1) + a * a;
    let c = (rational(1, 1) - a * a) / &n;
    let s = rational(2, 1) * a / &n;
    let mut r: [[BigRational; 3]; 3] = std::array::from_fn(|k| std::array::from_fn(|l| rational(i64::from(k == l), 1)));
    r[i][i] = c.clone();
    r[j][j] = c;
    r[i][j] = -s.clone();
    r[j][i] = s;
    r
}

fn orthogonal_mixing(rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..20 {
        let forms: [QuadraticForm<BigRational>; 3] = std::array::from_fn(|_| QuadraticForm::new(std::array::from_fn(|_| random_rational(rng))));
        let r1 = givens(&random_rational(rng), 0, 1);
        let r2 = givens(&random_rational(rng), 1, 2);
        let o: [[BigRational; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| (0..3).fold(rational(0, 1), |acc, k| acc + &r1[i][k] * &r2[k][j])));
        let mixed: [QuadraticForm<BigRational>; 3] =
            std::array::from_fn(|i| (0..3).fold(QuadraticForm::zero(), |acc, j| acc.add(&forms[j].scale(&o[i][j]))));
        ensure!(
            representation_to_gram(&[1, 1, 1], &mixed) == representation_to_gram(&[1, 1, 1], &forms),
            "orthogonal mixing changed the Gram matrix"
        );
    }
    Ok("20".into())
}

fn determinism() -> Check {
    let mut outputs = Vec::new();
    for (name, threads) in [("det_a.json", "1"), ("det_b.json", "1"), ("det_c.json", "2")] {
        let (run, report) = decompose_json("x^4+y^4+z^4", name, &["--restarts", "3000", "--seed", "9", "--threads", threads])?;
        outputs.push((run.stdout, report["solutions"].to_string(), report["certificates"].to_string()));
    }
    ensure!(outputs[0] == outputs[1], "two runs differ");
    ensure!(outputs[0] == outputs[2], "thread count changes the output");
    let a = binary(&["corpus", "--count", "1", "--restarts", "2000", "--seed", "3"]);
    let b = binary(&["corpus", "--count", "1", "--restarts", "2000", "--seed", "3", "--threads", "2"]);
    ensure!(a.stdout == b.stdout && !a.stdout.is_empty(), "corpus tables differ");
    Ok("byte-identical".into())
}

fn oracle_agreement(rng: &mut ChaCha8Rng) -> Check {
    let mut singular = 0;
    for i in 0..50 {
        let forced = i % 2 == 0;
        let f = loop {
            let coeffs: Vec<BigRational> = monomials(4)
                .iter()
                .map(|e| if forced && e[2] >= 3 { rational(0, 1) } else { rational(rng.random_range(-4..=4), rng.random_range(1..=3)) })
                .collect();
            let Ok(f) = TernaryQuartic::new(Form::from_coeffs(4, coeffs).expect("15 coefficients")) else { continue };
            // move the singular point away from a coordinate vertex
            let m = [[1, 1, 0], [0, 1, 1], [1, 0, 2]].map(|r| r.map(|v| rational(v, 1)));
            break f.substitute(&m).map_err(|e| e.to_string())?;
        };
        let exact = smoothness_test(&f).is_smooth();
        let numeric = numeric_singularity_oracle(&f, 200, i).is_none();
        ensure!(exact == numeric, "disagreement on {f}");
        ensure!(!forced || !exact, "forced singular quartic reported smooth");
        singular += usize::from(!exact);
    }
    Ok(format!("50 ({singular} singular)"))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let parts = [
        ("family identity", family_identity(&mut rng)),
        ("Euler relation", euler_relation(&mut rng)),
        ("factor round trips", factor_round_trips(&mut rng)),
        ("orthogonal mixing", orthogonal_mixing(&mut rng)),
        ("determinism", determinism()),
        ("oracle agreement", oracle_agreement(&mut rng)),
    ];
    let mut summary = Vec::new();
    for (name, result) in parts {
        match result {
            Ok(detail) => summary.push(format!("{name} {detail}")),
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    Ok(summary.join(", "))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    let mut summary = Vec::new();
    while done < 3 {
        let m: [[BigRational; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rational(rng.random_range(-2..=2), rng.random_range(1..=2))));
        let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
        if det == rational(0, 1) {
            continue;
        }
        let f = Quartic::fermat().substitute(&m).map_err(|e| e.to_string())?;
        let text = f.form().to_string();
        let (run, report) = decompose_json(&text, &format!("change{done}.json"), &[])?;
        let counts = counts_of(&report).ok_or("no counts")?;
        ensure!(counts == (63, 15, 8), "counts {counts:?} for {text}");
        ensure!(run.code == 0, "exit code {} for {text}", run.code);
        summary.push(format!("det {det}"));
        done += 1;
    }
    Ok(format!("(63, 15, 8) under three changes of variables ({})", summary.join(", ")))
}

fn main() {
    // tolerate the harness flags cargo passes to test binaries
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |id: usize| args.is_empty() || args.iter().any(|a| a == &id.to_string());

    let mut results: Vec<(usize, &str, Check)> = Vec::new();
    if wanted(1) || wanted(2) {
        let (one, two) = criterion_1_and_2();
        results.push((1, "Fermat counts", one));
        results.push((2, "Fermat certificates", two));
    }
    let rest: [(usize, &str, fn() -> Check); 5] = [
        (3, "random corpus", criterion_3),
        (4, "indefinite control", criterion_4),
        (5, "singular control", criterion_5),
        (6, "property suite", criterion_6),
        (7, "change of variables", criterion_7),
    ];
    for (id, name, f) in rest {
        if wanted(id) {
            results.push((id, name, f()));
        }
    }

    let mut failed = false;
    for (id, name, result) in &results {
        match result {
            Ok(detail) => println!("criterion {id} PASS {name}: {detail}"),
            Err(e) => {
                failed = true;
                println!("criterion {id} FAIL {name}: {e}");
            }
        }
    }
    if failed {
        std::process::exit(1);
    }
}
