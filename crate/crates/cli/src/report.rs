use std::collections::BTreeMap;

use quartic_sos::classify::{ClassRepresentation, CountReport, Verdict};
use quartic_sos::{
    Complex64, ComplexRepresentation, Counts, CurveStatus, GramPoint, PositivityStatus, QuadraticForm, Reality,
    Signature, SolutionSet, SolveConfig,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub lambda: [Complex64; 6],
    pub rank: usize,
    pub reality: Reality,
    pub signature: Option<Signature>,
    pub residual: f64,
}

impl From<&GramPoint> for PointJson {
    fn from(p: &GramPoint) -> Self {
        Self {
            lambda: p.lambda,
            rank: p.numerical_rank,
            reality: p.reality,
            signature: p.signature,
            residual: p.kernel_residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSetJson {
    pub seed: u64,
    pub config: SolveConfig,
    pub counts: Counts,
    pub budget_exhausted: bool,
    pub converged_restarts: usize,
    pub points: Vec<PointJson>,
}

impl From<&SolutionSet> for SolutionSetJson {
    fn from(s: &SolutionSet) -> Self {
        Self {
            seed: s.config.master_seed,
            config: s.config.clone(),
            counts: s.counts,
            budget_exhausted: s.budget_exhausted,
            converged_restarts: s.converged_restarts,
            points: s.points.iter().map(PointJson::from).collect(),
        }
    }
}

/// A coefficient given either as a plain number or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Complex([f64; 2]),
    Real(f64),
}

impl Coefficient {
    pub fn value(self) -> Complex64 {
        match self {
            Self::Complex([re, im]) => Complex64::new(re, im),
            Self::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub signs: [i8; 3],
    pub forms: [[Coefficient; 6]; 3],
    #[serde(default)]
    pub class_lambda: Option<[Complex64; 6]>,
    #[serde(default)]
    pub residual: Option<f64>,
    #[serde(default)]
    pub basepoint_free: Option<bool>,
}

impl Certificate {
    pub fn new(rep: &ComplexRepresentation, verdict: &Verdict) -> Self {
        Self {
            signs: rep.signs,
            forms: rep.forms.each_ref().map(|q| q.coeffs.map(|c| Coefficient::Complex([c.re, c.im]))),
            class_lambda: Some(rep.class_lambda),
            residual: Some(verdict.residual),
            basepoint_free: Some(verdict.basepoint_free),
        }
    }

    pub fn quadratic_forms(&self) -> [QuadraticForm<Complex64>; 3] {
        self.forms.map(|row| QuadraticForm::new(row.map(Coefficient::value)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub counts: Counts,
    pub checks: CountReport,
    pub sum_of_squares: usize,
    pub signed: usize,
    pub complex: usize,
    pub all_verified: bool,
    pub pass: bool,
}

/// Everything one `decompose` run produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input: String,
    pub seed: u64,
    pub config: SolveConfig,
    pub curve: CurveStatus,
    pub positivity: Option<PositivityStatus>,
    pub hypothesis_failure: Option<String>,
    pub solutions: Option<SolutionSetJson>,
    pub expected: Option<Expectation>,
    pub certificates: Vec<Certificate>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
}

pub fn certificates(classes: &[ClassRepresentation], verdicts: &[Verdict]) -> Vec<Certificate> {
    classes.iter().zip(verdicts).map(|(c, v)| Certificate::new(&c.to_complex(), v)).collect()
}
