//! The `tdsform` command line: verification suites, form evaluation and plaque probes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand};
use serde_json::{json, Value};

use crate::diffeology::{DiffError, JoinMode};
use crate::expr::{ExprError, SmoothMap};
use crate::exterior::{ExteriorError, ExteriorForm};
use crate::forms::{pullback_smooth, DifferentialForm, FormsError};
use crate::plaque_forms::{psi, PlaqueFormError, PointwiseForm};
use crate::scalar::{self, Rational};
use crate::spaces::{self, SpacesError};
use crate::verify::{self, VerifyConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tdsform", version, about = "Exact exterior calculus on R^n and on tangent-diffeological spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and print its report.
    Verify {
        /// algebra, forms, def21, tds, psi, counterexamples or all.
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Print the JSON report; `--json false` prints one line per case.
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        json: bool,
        /// Tolerance for black-box comparisons.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Record the running time of each case.
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate a form on the data in an input file.
    Eval { form: PathBuf, input: PathBuf },
    /// Search for a joint plaque of two plaques of a fixture space.
    Probe {
        space: String,
        #[arg(num_args = 2, required = true)]
        plaques: Vec<PathBuf>,
        /// strong (pointwise) or weak (classwise).
        #[arg(long, default_value = "strong")]
        mode: String,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable files or malformed JSON.
    Usage(String),
    /// Well-formed input rejected by a module; carries the error name.
    Domain { name: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain { .. } => EXIT_DOMAIN,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Domain { name, message } => write!(f, "error: {name}: {message}"),
        }
    }
}

/// The variant name of an error, as in `DimensionMismatch`.
fn variant_name(e: &impl std::fmt::Debug) -> String {
    let d = format!("{e:?}");
    // Transparent wrappers print as `Outer(Inner(..))`; report the innermost variant.
    let mut name = d.as_str();
    loop {
        let end = name.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(name.len());
        let rest = &name[end..];
        let head = &name[..end];
        match rest.strip_prefix('(') {
            Some(inner) if inner.starts_with(|c: char| c.is_ascii_uppercase()) && !matches!(head, "Some") => {
                if ["Expr", "Forms", "Exterior", "Diff", "Spaces"].contains(&head) {
                    name = inner;
                    continue;
                }
                return head.to_string();
            }
            _ => return head.to_string(),
        }
    }
}

fn is_json_error(message: &str) -> bool {
    message.starts_with("malformed JSON") || message.starts_with("syntax error") || message.contains(" is out of range for ")
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                let message = e.to_string();
                if is_json_error(&message) {
                    CliError::Usage(message)
                } else {
                    CliError::Domain { name: variant_name(&e), message }
                }
            }
        }
    )*};
}

domain_from!(ExprError, ExteriorError, FormsError, DiffError, SpacesError, PlaqueFormError);

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("malformed JSON in {}: {e}", path.display())))
}

fn rational_list(v: &Value, what: &str) -> Result<Vec<Rational>, CliError> {
    v.as_array()
        .ok_or_else(|| usage(format!("{what} must be an array")))?
        .iter()
        .map(|x| scalar::rational_from_json(x).ok_or_else(|| usage(format!("{what} entries must be rationals"))))
        .collect()
}

fn vector_list(input: &Value) -> Result<Option<Vec<Vec<Rational>>>, CliError> {
    match input.get("vectors") {
        None => Ok(None),
        Some(v) => Ok(Some(
            v.as_array().ok_or_else(|| usage("\"vectors\" must be an array"))?.iter().map(|x| rational_list(x, "vector")).collect::<Result<_, _>>()?,
        )),
    }
}

fn form_kind(form: &Value) -> Result<&str, CliError> {
    match form.get("kind").and_then(Value::as_str) {
        Some(k) => Ok(k),
        None if form.get("domain").is_some() => Ok("differential"),
        None if form.get("space").is_some() => Ok("pointwise"),
        None if form.get("dim").is_some() => Ok("exterior"),
        None => Err(usage("form needs a \"kind\" of exterior, differential or pointwise")),
    }
}

fn pointwise_from_json(form: &Value) -> Result<(spaces::Fixture, PointwiseForm), CliError> {
    let name = form.get("space").and_then(Value::as_str).ok_or_else(|| usage("pointwise form needs \"space\""))?;
    let fixture = spaces::by_name(name).map_err(|e| usage(e.to_string()))?;
    let space = fixture.space.as_ref().ok_or_else(|| usage(format!("{name} has no plaque structure")))?;
    let degree = form.get("degree").and_then(Value::as_u64).ok_or_else(|| usage("pointwise form needs \"degree\""))? as usize;
    let n = space.ambient_dim();
    let mut terms = Vec::new();
    for c in form.get("coeffs").and_then(Value::as_array).ok_or_else(|| usage("pointwise form needs \"coeffs\""))? {
        let idx = c
            .get("idx")
            .and_then(Value::as_array)
            .and_then(|a| a.iter().map(|i| i.as_u64().map(|i| i as usize)).collect::<Option<Vec<_>>>())
            .ok_or_else(|| usage("coefficient needs an integer \"idx\" array"))?;
        let expr = c.get("expr").and_then(Value::as_str).ok_or_else(|| usage("coefficient needs \"expr\""))?;
        terms.push((idx, crate::expr::parse_expr(expr, n)?));
    }
    let omega = PointwiseForm::new(n, space.generators().len(), degree, terms)?;
    Ok((fixture, omega))
}

/// Evaluates a form file on an input file.
pub fn eval(form: &Value, input: &Value) -> Result<Value, CliError> {
    match form_kind(form)? {
        "exterior" => {
            let w = ExteriorForm::from_json(form)?;
            let vs = vector_list(input)?.ok_or_else(|| usage("input needs \"vectors\""))?;
            Ok(json!({"value": scalar::rational_to_json(&w.evaluate(&vs)?)}))
        }
        "differential" => {
            let w = DifferentialForm::from_json(form)?;
            if let Some(m) = input.get("map") {
                let f = SmoothMap::from_json(m)?;
                return Ok(json!({"pullback": pullback_smooth(&f, &w)?.to_json()}));
            }
            if input.get("d").and_then(Value::as_bool) == Some(true) {
                return Ok(json!({"derivative": w.exterior_derivative().to_json()}));
            }
            let x = rational_list(input.get("point").ok_or_else(|| usage("input needs \"point\", \"map\" or \"d\""))?, "point")?;
            if !w.domain().contains(&x) {
                return Err(CliError::Domain { name: "OutsideDomain".into(), message: "point lies outside the form's box".into() });
            }
            let at = w.eval_at(&x)?;
            match vector_list(input)? {
                Some(vs) => Ok(json!({"value": scalar::rational_to_json(&at.evaluate(&vs)?)})),
                None => Ok(json!({"form": at.to_json()})),
            }
        }
        "pointwise" => {
            let (fixture, omega) = pointwise_from_json(form)?;
            let space = fixture.space.expect("checked");
            let p = SmoothMap::from_json(input.get("plaque").ok_or_else(|| usage("input needs \"plaque\""))?)?;
            let big = psi(&space, &omega)?;
            Ok(json!({"space": space.name(), "plaque_form": big.eval(&p)?.to_json()}))
        }
        other => Err(usage(format!("unknown form kind {other:?}"))),
    }
}

/// Runs a joint-plaque probe on a named fixture.
pub fn probe(space: &str, plaques: &[Value], mode: &str) -> Result<Value, CliError> {
    let mode = JoinMode::parse(mode).ok_or_else(|| usage(format!("unknown mode {mode:?}; expected strong or weak")))?;
    let fixture = spaces::by_name(space).map_err(|e| usage(e.to_string()))?;
    let x = fixture.space.ok_or_else(|| usage(format!("{space} has no plaque structure")))?;
    let [p1, p2] = plaques else {
        return Err(usage("probe needs exactly two plaque files"));
    };
    let (p1, p2) = (SmoothMap::from_json(p1)?, SmoothMap::from_json(p2)?);
    let out = x.joint_plaque_probe(&p1, &p2, mode)?;
    Ok(json!({"space": x.name(), "mode": mode.name(), "outcome": out.to_json()}))
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify { suite, seed, samples, json, tolerance, timing } => {
            let cfg = VerifyConfig { seed, samples, tolerance, timing };
            let report = verify::run(&suite, &cfg).map_err(|e| usage(e.to_string()))?;
            if json {
                emit(&report.to_json());
            } else {
                for c in &report.cases {
                    println!("{} {}", c.status.name().to_uppercase(), c.id);
                }
                let total = report.cases.len();
                println!("{}: {}/{} passed", report.suite, report.count(verify::Status::Pass), total);
            }
            Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Eval { form, input } => {
            emit(&eval(&read_json(&form)?, &read_json(&input)?)?);
            Ok(EXIT_PASS)
        }
        Command::Probe { space, plaques, mode } => {
            let values = plaques.iter().map(|p| read_json(p)).collect::<Result<Vec<_>, _>>()?;
            emit(&probe(&space, &values, &mode)?);
            Ok(EXIT_PASS)
        }
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names() {
        let e = PlaqueFormError::Diff(DiffError::NotAPlaque("x".into()));
        assert_eq!(variant_name(&e), "NotAPlaque");
        assert_eq!(variant_name(&ExteriorError::Arity { expected: 1, found: 2 }), "Arity");
        let e = FormsError::Exterior(ExteriorError::InvalidIndex(vec![1, 0]));
        assert_eq!(variant_name(&e), "InvalidIndex");
    }

    #[test]
    fn eval_of_the_area_form() {
        let form = json!({"kind": "exterior", "dim": 2, "degree": 2, "coeffs": [{"idx": [0, 1], "num": 1, "den": 1}]});
        let input = json!({"vectors": [[1, 0], [0, 1]]});
        assert_eq!(eval(&form, &input).unwrap(), json!({"value": {"num": 1, "den": 1}}));
    }
}
