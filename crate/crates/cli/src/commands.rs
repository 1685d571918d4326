use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use quartic_sos::classify::{classify_solutions, verify_representation};
use quartic_sos::corpus::corpus;
use quartic_sos::curve::numeric_singularity_oracle;
use quartic_sos::{
    nonnegativity_test, parse_quartic, smoothness_test, solve_all, Counts, GramFamily,
    HypothesisFailure, Nonnegativity, Quartic, SolveConfig,
};
use serde::Serialize;

use crate::args::{CorpusArgs, DecomposeArgs, InputArgs, VerifyArgs};
use crate::format;
use crate::report::{certificates, Certificate, Expectation, RunReport, SolutionSetJson};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_COUNTS: u8 = 3;
pub const EXIT_HYPOTHESIS: u8 = 4;
pub const EXIT_VERIFY: u8 = 5;

/// Input that could not be read as a quartic.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

pub fn read_input(args: &InputArgs) -> Result<Quartic> {
    let text = match (&args.form, &args.json_in) {
        (Some(form), _) => form.clone(),
        (None, Some(path)) => {
            let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            coefficient_map_expression(&raw)?
        }
        (None, None) => return Err(InputError("no quartic given".into()).into()),
    };
    parse_quartic(&text).map_err(|e| InputError(format!("cannot parse {text:?}: {e}")).into())
}

/// `{"x^4": 1, "x^2*y^2": "-1/2"}` as a sum of products.
pub fn coefficient_map_expression(raw: &str) -> Result<String> {
    let map: BTreeMap<String, serde_json::Value> =
        serde_json::from_str(raw).map_err(|e| InputError(format!("invalid coefficient map: {e}")))?;
    let mut terms = Vec::new();
    for (monomial, value) in map {
        let coefficient = match value {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s,
            other => return Err(InputError(format!("coefficient of {monomial} is not a number: {other}")).into()),
        };
        terms.push(format!("({coefficient})*({monomial})"));
    }
    if terms.is_empty() {
        return Err(InputError("empty coefficient map".into()).into());
    }
    Ok(terms.join(" + "))
}

fn solve_config(seed: u64, restarts: usize) -> SolveConfig {
    SolveConfig { restarts, master_seed: seed, ..SolveConfig::default() }
}

pub fn cmd_check(args: &InputArgs, seed: u64) -> Result<Outcome> {
    let f = read_input(args)?;
    let mut out = String::new();
    writeln!(out, "input: {}", f.form())?;
    let curve = smoothness_test(&f);
    writeln!(out, "smooth: {}", format::yes_no(curve.is_smooth()))?;
    match numeric_singularity_oracle(&f, 200, seed) {
        Some(zero) => writeln!(out, "singular point (numeric): {}", format::vector(&zero.point))?,
        None => writeln!(out, "singular point (numeric): none found")?,
    }
    let positivity = nonnegativity_test(&f, &GramFamily::new(&f), seed);
    let verdict = match positivity.verdict {
        Nonnegativity::Nonnegative => "yes",
        Nonnegativity::NotNonnegative => "no",
        Nonnegativity::Indeterminate => "indeterminate",
    };
    writeln!(out, "nonnegative: {verdict}")?;
    writeln!(out, "max min eigenvalue: {}", format::real(positivity.max_min_eigenvalue))?;
    if let Some(c) = &positivity.counterexample {
        let p = c.point.map(format::real);
        writeln!(out, "counterexample: f({}, {}, {}) = {} (unit-scaled)", p[0], p[1], p[2], format::real(c.value))?;
    }
    Ok(Outcome { stdout: out, code: EXIT_OK })
}

fn failure_message(failure: &HypothesisFailure) -> &'static str {
    match failure {
        HypothesisFailure::Singular => "curve is singular; counts not asserted",
        HypothesisFailure::NotNonnegative => "quartic is not non-negative; counts not asserted",
        HypothesisFailure::NonnegativityIndeterminate => "non-negativity undecided; counts not asserted",
    }
}

/// The full pipeline, returning the report and its exit code.
pub fn decompose_report(f: &Quartic, config: &SolveConfig) -> Result<(RunReport, u8)> {
    let mut timings = BTreeMap::new();
    let mut report = RunReport {
        input: f.form().to_string(),
        seed: config.master_seed,
        config: config.clone(),
        curve: {
            let t = Instant::now();
            let curve = smoothness_test(f);
            timings.insert("smoothness".to_string(), t.elapsed().as_secs_f64());
            curve
        },
        positivity: None,
        hypothesis_failure: None,
        solutions: None,
        expected: None,
        certificates: Vec::new(),
        timings: BTreeMap::new(),
    };
    if !report.curve.is_smooth() {
        report.hypothesis_failure = Some(failure_message(&HypothesisFailure::Singular).into());
        report.timings = timings;
        return Ok((report, EXIT_HYPOTHESIS));
    }
    let family = GramFamily::new(f);
    let t = Instant::now();
    let positivity = nonnegativity_test(f, &family, config.master_seed);
    timings.insert("nonnegativity".into(), t.elapsed().as_secs_f64());
    report.positivity = Some(positivity.clone());
    let failure = match positivity.verdict {
        Nonnegativity::Nonnegative => None,
        Nonnegativity::NotNonnegative => Some(HypothesisFailure::NotNonnegative),
        Nonnegativity::Indeterminate => Some(HypothesisFailure::NonnegativityIndeterminate),
    };
    if let Some(failure) = failure {
        report.hypothesis_failure = Some(failure_message(&failure).into());
        report.timings = timings;
        return Ok((report, EXIT_HYPOTHESIS));
    }
    let t = Instant::now();
    let solutions = solve_all(&family, config);
    timings.insert("solve".into(), t.elapsed().as_secs_f64());
    report.solutions = Some(SolutionSetJson::from(&solutions));

    let t = Instant::now();
    let classified = classify_solutions(f, report.curve.clone(), positivity, solutions);
    timings.insert("classify".into(), t.elapsed().as_secs_f64());
    report.timings = timings;
    let code = match classified {
        Ok(theorem) => {
            report.certificates = certificates(&theorem.classes, &theorem.verdicts);
            let pass = theorem.pass();
            report.expected = Some(Expectation {
                counts: Counts::SMOOTH_NONNEGATIVE,
                checks: theorem.counts.clone(),
                sum_of_squares: theorem.sum_of_squares,
                signed: theorem.signed,
                complex: theorem.complex,
                all_verified: theorem.verdicts.iter().all(|v| v.pass),
                pass,
            });
            if pass { EXIT_OK } else { EXIT_COUNTS }
        }
        Err(e) => {
            eprintln!("warning: {e}");
            EXIT_COUNTS
        }
    };
    Ok((report, code))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Listing {
    Real,
    SosOnly,
    All,
}

pub fn cmd_decompose(args: &DecomposeArgs, seed: u64) -> Result<Outcome> {
    let f = read_input(&args.input)?;
    let config = solve_config(seed, args.restarts);
    let (report, code) = decompose_report(&f, &config)?;
    if let Some(path) = &args.json {
        write_json(path, &report)?;
    }
    for (stage, secs) in &report.timings {
        eprintln!("time {stage}: {secs:.3} s");
    }
    let listing = if args.all {
        Listing::All
    } else if args.sos_only {
        Listing::SosOnly
    } else {
        Listing::Real
    };
    Ok(Outcome { stdout: render_decompose(&report, listing)?, code })
}

fn render_decompose(report: &RunReport, listing: Listing) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "input: {}", report.input)?;
    writeln!(out, "smooth: {}", format::yes_no(report.curve.is_smooth()))?;
    if let Some(p) = &report.positivity {
        writeln!(out, "nonnegative: {}", format::yes_no(p.is_nonnegative()))?;
    }
    if let Some(msg) = &report.hypothesis_failure {
        writeln!(out, "hypothesis failed: {msg}")?;
        return Ok(out);
    }
    let Some(solutions) = &report.solutions else { return Ok(out) };
    writeln!(
        out,
        "restarts: {} converged: {} seed: {}{}",
        solutions.config.restarts,
        solutions.converged_restarts,
        solutions.seed,
        if solutions.budget_exhausted { " (budget exhausted)" } else { "" }
    )?;
    let c = solutions.counts;
    writeln!(out, "classes: {} complex, {} real, {} psd", c.complex_total, c.real_total, c.psd_total)?;
    if let Some(e) = &report.expected {
        writeln!(out, "split: {} sums of squares, {} signed, {} complex", e.sum_of_squares, e.signed, e.complex)?;
        for check in &e.checks.checks {
            let mark = if check.pass { "ok" } else { "MISS" };
            writeln!(out, "  {:<24} {:>3} / {:>3} {mark}", check.name, check.observed, check.expected)?;
        }
        writeln!(out, "conjugation closed: {}", format::yes_no(e.checks.conjugation_closed))?;
        writeln!(out, "expected 63 / 15 / 8: {}", if e.pass { "pass" } else { "fail" })?;
    }
    let shown: Vec<&Certificate> = report
        .certificates
        .iter()
        .filter(|cert| {
            let real = cert.quadratic_forms().iter().all(|q| q.coeffs.iter().all(|z| z.im == 0.0));
            match listing {
                Listing::All => true,
                Listing::Real => real,
                Listing::SosOnly => real && cert.signs.iter().all(|s| *s > 0),
            }
        })
        .collect();
    writeln!(out, "certificates: {}", shown.len())?;
    for cert in shown {
        writeln!(
            out,
            "{} residual {} basepoint-free {} lambda {}",
            format::signs(&cert.signs),
            format::real(cert.residual.unwrap_or(f64::NAN)),
            format::yes_no(cert.basepoint_free.unwrap_or(false)),
            format::vector(&cert.class_lambda.unwrap_or_default()),
        )?;
        for q in cert.quadratic_forms() {
            writeln!(out, "    {}", format::quadratic(&q))?;
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct CorpusRow {
    pub index: usize,
    pub input: String,
    pub counts: Option<Counts>,
    pub pass: bool,
    pub note: Option<String>,
}

pub fn cmd_corpus(args: &CorpusArgs, seed: u64) -> Result<Outcome> {
    let config = solve_config(seed, args.restarts);
    let mut rows = Vec::new();
    for (index, f) in corpus(seed, args.count).iter().enumerate() {
        let t = Instant::now();
        let (report, code) = decompose_report(f, &config)?;
        eprintln!("time row {index}: {:.3} s", t.elapsed().as_secs_f64());
        rows.push(CorpusRow {
            index,
            input: report.input.clone(),
            counts: report.solutions.as_ref().map(|s| s.counts),
            pass: code == EXIT_OK,
            note: report.hypothesis_failure.clone(),
        });
    }
    if let Some(path) = &args.json {
        write_json(path, &rows)?;
    }
    let mut out = String::new();
    writeln!(out, "{:>3}  {:>7} {:>4} {:>3}  result  quartic", "#", "complex", "real", "psd")?;
    for row in &rows {
        let (c, r, p) = row.counts.map_or(("-".into(), "-".into(), "-".into()), |c| {
            (c.complex_total.to_string(), c.real_total.to_string(), c.psd_total.to_string())
        });
        let result = if row.pass { "pass" } else { "FAIL" };
        writeln!(out, "{:>3}  {c:>7} {r:>4} {p:>3}  {result:<6}  {}", row.index, row.input)?;
    }
    let code = if rows.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_COUNTS };
    Ok(Outcome { stdout: out, code })
}

/// Certificates from a single object, a list, or a `decompose` report.
pub fn read_certificates(path: &Path) -> Result<Vec<Certificate>> {
    let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&raw).map_err(|e| InputError(format!("invalid certificate JSON: {e}")))?;
    let value = match value {
        serde_json::Value::Object(mut map) if map.contains_key("certificates") => map.remove("certificates").unwrap_or_default(),
        other => other,
    };
    let certs = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|c| vec![c])
    };
    let certs: Vec<Certificate> = certs.map_err(|e| InputError(format!("invalid certificate: {e}")))?;
    if certs.is_empty() {
        return Err(InputError("no certificates in file".into()).into());
    }
    Ok(certs)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let f = read_input(&args.input)?;
    let certs = read_certificates(&args.cert)?;
    let mut out = String::new();
    writeln!(out, "input: {}", f.form())?;
    let mut all = true;
    for (i, cert) in certs.iter().enumerate() {
        let verdict = verify_representation(&f, &cert.signs, &cert.quadratic_forms());
        all &= verdict.pass;
        writeln!(
            out,
            "certificate {i}: {} residual {} basepoint-free {}",
            if verdict.pass { "pass" } else { "fail" },
            format::real(verdict.residual),
            format::yes_no(verdict.basepoint_free)
        )?;
    }
    writeln!(out, "verdict: {}", if all { "pass" } else { "fail" })?;
    Ok(Outcome { stdout: out, code: if all { EXIT_OK } else { EXIT_VERIFY } })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
