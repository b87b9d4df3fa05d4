//! Seeded verification suites and their reports.

pub mod algebra;
pub mod counterexamples;
pub mod def21;
pub mod forms;
pub mod gen;
pub mod psi;
pub mod tds;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub const SUITES: &[&str] = &["algebra", "forms", "def21", "tds", "psi", "counterexamples"];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    /// Tolerance for black-box comparisons.
    pub tolerance: f64,
    pub timing: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, samples: 64, tolerance: 1e-9, timing: false }
    }
}

impl VerifyConfig {
    /// A generator for one suite, so suites do not share random streams.
    pub fn rng(&self, suite: &str) -> ChaCha8Rng {
        let salt = suite.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
        ChaCha8Rng::seed_from_u64(self.seed ^ salt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub id: String,
    pub status: Status,
    pub witness: Option<Value>,
    pub timing_ms: Option<f64>,
}

impl Case {
    pub fn to_json(&self) -> Value {
        let mut v = json!({"id": self.id, "status": self.status.name()});
        if let Some(w) = &self.witness {
            v["witness"] = w.clone();
        }
        if let Some(t) = self.timing_ms {
            v["timing_ms"] = json!(t);
        }
        v
    }
}

/// Outcome of one case: `Ok(None)` passes, `Ok(Some(w))` fails with witness `w`, `Err`
/// is an error.
pub type Outcome = Result<Option<Value>, String>;

pub fn pass() -> Outcome {
    Ok(None)
}

pub fn fail(witness: Value) -> Outcome {
    Ok(Some(witness))
}

/// Passes when `cond` holds, otherwise fails with the lazily built witness.
pub fn check(cond: bool, witness: impl FnOnce() -> Value) -> Outcome {
    if cond {
        pass()
    } else {
        fail(witness())
    }
}

pub trait OrError<T> {
    fn or_error(self) -> Result<T, String>;
}

impl<T, E: std::fmt::Display> OrError<T> for Result<T, E> {
    fn or_error(self) -> Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

/// Collects cases for one suite.
pub struct Recorder {
    timing: bool,
    cases: Vec<Case>,
}

impl Recorder {
    pub fn new(cfg: &VerifyConfig) -> Self {
        Recorder { timing: cfg.timing, cases: Vec::new() }
    }

    pub fn case(&mut self, id: impl Into<String>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = f();
        let timing_ms = self.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
        let (status, witness) = match out {
            Ok(None) => (Status::Pass, None),
            Ok(Some(w)) => (Status::Fail, Some(w)),
            Err(e) => (Status::Error, Some(json!({"error": e}))),
        };
        self.cases.push(Case { id: id.into(), status, witness, timing_ms });
    }

    pub fn finish(self) -> Vec<Case> {
        self.cases
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub cases: Vec<Case>,
}

impl Report {
    pub fn new(suite: &str, cfg: &VerifyConfig, mut cases: Vec<Case>) -> Self {
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        Report { suite: suite.to_string(), seed: cfg.seed, samples: cfg.samples, cases }
    }

    pub fn count(&self, status: Status) -> usize {
        self.cases.iter().filter(|c| c.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Pass) == self.cases.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.status != Status::Pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "seed": self.seed,
            "samples": self.samples,
            "summary": {
                "total": self.cases.len(),
                "pass": self.count(Status::Pass),
                "fail": self.count(Status::Fail),
                "error": self.count(Status::Error),
            },
            "cases": self.cases.iter().map(Case::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown suite {0:?}; expected one of {SUITES:?} or \"all\"")]
pub struct UnknownSuite(pub String);

fn run_one(suite: &str, cfg: &VerifyConfig) -> Result<Vec<Case>, UnknownSuite> {
    let mut rec = Recorder::new(cfg);
    match suite {
        "algebra" => algebra::run(cfg, &mut rec),
        "forms" => forms::run(cfg, &mut rec),
        "def21" => def21::run(cfg, &mut rec),
        "tds" => tds::run(cfg, &mut rec),
        "psi" => psi::run(cfg, &mut rec),
        "counterexamples" => counterexamples::run(cfg, &mut rec),
        _ => return Err(UnknownSuite(suite.to_string())),
    }
    Ok(rec.finish())
}

/// Runs a suite, or every suite with case ids prefixed by the suite name.
pub fn run(suite: &str, cfg: &VerifyConfig) -> Result<Report, UnknownSuite> {
    if suite == "all" {
        let mut cases = Vec::new();
        for s in SUITES {
            for mut c in run_one(s, cfg)? {
                c.id = format!("{s}/{}", c.id);
                cases.push(c);
            }
        }
        return Ok(Report::new("all", cfg, cases));
    }
    Ok(Report::new(suite, cfg, run_one(suite, cfg)?))
}
