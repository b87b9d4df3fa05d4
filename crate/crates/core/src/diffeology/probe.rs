//! Outcomes of joint-plaque, weaker-condition and integrability probes.

use serde_json::{json, Value};

use crate::expr::SmoothMap;

/// How a joint plaque must match its two inputs.
///
/// `Pointwise` (CLI name `strong`) asks for `q(r, 0) = p1(r)` and `q(0, s) = p2(s)`.
/// `Classwise` (CLI name `weak`) only asks the slices to be equivalent to the inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JoinMode {
    Pointwise,
    Classwise,
}

impl JoinMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "strong" | "pointwise" => Some(JoinMode::Pointwise),
            "weak" | "classwise" => Some(JoinMode::Classwise),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            JoinMode::Pointwise => "strong",
            JoinMode::Classwise => "weak",
        }
    }
}

/// Transversality established at a point by a failed joint-plaque search.
///
/// A point is weakly transverse when two plaques admit no pointwise joint plaque,
/// and strongly transverse when they admit not even a classwise one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transversality {
    Weak,
    Strong,
}

impl Transversality {
    pub fn name(self) -> &'static str {
        match self {
            Transversality::Weak => "weakly transverse",
            Transversality::Strong => "strongly transverse",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub obstruction: String,
    pub transversality: Option<Transversality>,
    /// Dimensions `(n, m)` of the two plaques when the probe was a join.
    pub degree: Option<(usize, usize)>,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        json!({
            "obstruction": self.obstruction,
            "transversality": self.transversality.map(Transversality::name),
            "degree": self.degree.map(|(n, m)| vec![n, m]),
        })
    }
}

#[derive(Clone, Debug)]
pub enum ProbeOutcome {
    Found { plaque: SmoothMap, construction: String },
    NotFound(Certificate),
}

impl ProbeOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, ProbeOutcome::Found { .. })
    }

    pub fn plaque(&self) -> Option<&SmoothMap> {
        match self {
            ProbeOutcome::Found { plaque, .. } => Some(plaque),
            ProbeOutcome::NotFound(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            ProbeOutcome::Found { .. } => None,
            ProbeOutcome::NotFound(c) => Some(c),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ProbeOutcome::Found { plaque, construction } => json!({
                "result": "found",
                "construction": construction,
                "plaque": plaque.to_json().unwrap_or_else(|_| json!({"black_box": true, "in_dim": plaque.in_dim(), "out_dim": plaque.out_dim()})),
            }),
            ProbeOutcome::NotFound(c) => json!({"result": "not_found", "certificate": c.to_json()}),
        }
    }
}
