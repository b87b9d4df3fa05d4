//! Sampled checks of the linear and continuous structure and of smooth maps.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::expr::{compose, PolyExpr, SmoothMap};
use crate::scalar::{self, Rational};

use super::sampling::random_rational;
use super::{Coords, DiffError, DiffSpace, APPROX_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckCase {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub cases: Vec<CheckCase>,
}

impl CheckReport {
    pub fn push(&mut self, id: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.cases.push(CheckCase { id: id.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckCase> {
        self.cases.iter().filter(|c| !c.passed)
    }

    pub fn passed_matching(&self, tag: &str) -> bool {
        self.cases.iter().filter(|c| c.id.ends_with(tag)).all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "cases": self.cases.iter().map(|c| json!({"id": c.id, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

/// `t -> c t + d t^2`.
fn random_reparam(rng: &mut ChaCha8Rng) -> SmoothMap {
    let mut c = random_rational(rng, 2, 3);
    if c == scalar::zero() {
        c = scalar::one();
    }
    let d = random_rational(rng, 1, 3);
    let t = PolyExpr::var(1, 0);
    SmoothMap::polynomial_global(1, vec![&t.scale(&c) + &t.pow(2).scale(&d)]).expect("dims")
}

fn sig_col(space: &DiffSpace, p: &SmoothMap) -> Result<Coords, DiffError> {
    Ok(space.signature(p)?.column(0))
}

fn points(space: &DiffSpace, rng: &mut ChaCha8Rng, samples: usize) -> Vec<Coords> {
    let mut pts = space.special_points();
    while pts.len() < samples {
        pts.push(space.sample_point(rng));
    }
    pts.truncate(samples.max(1));
    pts
}

/// `(r, s) -> c(r s)`.
fn product_family(c: &SmoothMap) -> Result<SmoothMap, DiffError> {
    let rs = SmoothMap::polynomial_global(2, vec![&PolyExpr::var(2, 0) * &PolyExpr::var(2, 1)])?;
    Ok(compose(c, &rs)?)
}

/// `(r, s) -> c(s)`.
fn second_variable(c: &SmoothMap) -> Result<SmoothMap, DiffError> {
    let s = SmoothMap::polynomial_global(2, vec![PolyExpr::var(2, 1)])?;
    Ok(compose(c, &s)?)
}

/// `(r, s) -> a(r + k s, m s)`.
fn sheared(a: &SmoothMap, k: &Rational, m: &Rational) -> Result<SmoothMap, DiffError> {
    let (r, s) = (PolyExpr::var(2, 0), PolyExpr::var(2, 1));
    let map = SmoothMap::polynomial_global(2, vec![&r + &s.scale(k), s.scale(m)])?;
    Ok(compose(a, &map)?)
}

/// Linearity (sums and multiples of tangent classes, stable under reparameterization) and
/// continuity (sums of families of tangent vectors along a plaque are realized by a plaque).
pub fn check_linear_continuous(space: &DiffSpace, rng: &mut ChaCha8Rng, samples: usize) -> Result<CheckReport, DiffError> {
    let mut report = CheckReport::default();
    for (i, f) in points(space, rng, samples).into_iter().enumerate() {
        let p1 = space.sample_plaque(rng, &f, 1);
        let p2 = space.sample_plaque(rng, &f, 1);
        let (v1, v2) = (space.tangent_class(&p1)?, space.tangent_class(&p2)?);

        let id = format!("point{i:03}:additivity");
        match space.add(&v1, &v2) {
            Ok(v12) => {
                let phi = random_reparam(rng);
                let lhs = sig_col(space, &compose(&v12.witness, &phi)?)?;
                let rhs = sig_col(space, &compose(&p1, &phi)?)?.add(&sig_col(space, &compose(&p2, &phi)?)?);
                let ok = lhs.approx_eq(&rhs, APPROX_TOL);
                report.push(id, ok, if ok { "sum class is stable under reparameterization" } else { "signatures differ" });
            }
            Err(e) => {
                let branches = space.membership(&f).branches;
                let detail = format!("sum of two tangent vectors is not a tangent vector ({e})");
                // at a branch point the tangent set is a union of lines and is not expected to be closed
                report.push(id, branches.len() > 1, detail);
            }
        }

        let id = format!("point{i:03}:scaling");
        let c = if i == 0 { scalar::zero() } else { random_rational(rng, 3, 3) };
        match space.scale(&v1, &c) {
            Ok(w) => {
                let ok = w.signature.approx_eq(&v1.signature.scale(&c), APPROX_TOL);
                report.push(id, ok, format!("scaled by {}", scalar::fmt_rational(&c)));
            }
            Err(e) => report.push(id, false, e.to_string()),
        }

        let id = format!("point{i:03}:continuity");
        let c1 = space.sample_plaque(rng, &f, 1);
        let c2 = space.sample_plaque(rng, &f, 1);
        let a = space.sample_plaque(rng, &f, 2);
        let (k, m) = (random_rational(rng, 2, 2), random_rational(rng, 2, 2));
        let families = [(product_family(&c1)?, second_variable(&c2)?), (a.clone(), sheared(&a, &k, &m)?)];
        let mut failure = None;
        for (q1, q2) in &families {
            match space.continuity_probe(q1, q2)? {
                super::ProbeOutcome::Found { .. } => {}
                super::ProbeOutcome::NotFound(cert) => {
                    failure = Some(format!(
                        "no plaque realizes the sum of the families {} and {}: {}",
                        describe(q1),
                        describe(q2),
                        cert.obstruction
                    ));
                    break;
                }
            }
        }
        match failure {
            None => report.push(id, true, "sums of families realized"),
            Some(w) => report.push(id, false, w),
        }
    }
    Ok(report)
}

fn describe(m: &SmoothMap) -> String {
    match m.components() {
        Some(c) => {
            let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
            format!("({})", parts.join(", "))
        }
        None => "<black box>".into(),
    }
}

fn image(h: &SmoothMap, x: &Coords) -> Result<Coords, DiffError> {
    Ok(match x {
        Coords::Exact(v) if h.is_polynomial() => Coords::Exact(h.eval(v)?),
        _ => Coords::Approx(h.eval_f64(&x.to_f64())?),
    })
}

/// Plaques go to plaques, equivalent plaques to equivalent plaques, and the induced map
/// on signatures is additive.
pub fn check_smooth_map(
    h: &SmoothMap,
    source: &DiffSpace,
    target: &DiffSpace,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<CheckReport, DiffError> {
    if h.in_dim() != source.ambient_dim() || h.out_dim() != target.ambient_dim() {
        return Err(DiffError::DimensionMismatch { expected: source.ambient_dim(), found: h.in_dim() });
    }
    let mut report = CheckReport::default();
    let phi = SmoothMap::polynomial_global(1, vec![&PolyExpr::var(1, 0) + &PolyExpr::var(1, 0).pow(2)])?;
    for (i, f) in points(source, rng, samples).into_iter().enumerate() {
        let hf = image(h, &f)?;
        report.push(format!("point{i:03}:member"), target.membership(&hf).member, "image of a member point");

        let dim = 1 + rng.gen_range(0..2);
        let p = source.sample_plaque(rng, &f, dim);
        let hp = compose(h, &p)?;
        let d = target.is_plaque(&hp)?;
        report.push(format!("point{i:03}:plaques"), d.accepted, d.reason.unwrap_or_else(|| "h o p is a plaque".into()));

        let p = source.sample_plaque(rng, &f, 1);
        let pphi = compose(&p, &phi)?;
        let ok = !source.equivalent(&p, &pphi, 1)?
            || target.equivalent(&compose(h, &p)?, &compose(h, &pphi)?, 1)?;
        report.push(format!("point{i:03}:equivalence"), ok, "p ~ p o (t + t^2) is preserved");

        let p1 = source.sample_plaque(rng, &f, 1);
        let p2 = source.sample_plaque(rng, &f, 1);
        let (v1, v2) = (source.tangent_class(&p1)?, source.tangent_class(&p2)?);
        let id = format!("point{i:03}:linearity");
        match source.add(&v1, &v2) {
            Ok(v12) => {
                let s = |p: &SmoothMap| -> Result<Coords, DiffError> { sig_col(target, &compose(h, p)?) };
                let lhs = s(&v12.witness)?;
                let rhs = s(&p1)?.add(&s(&p2)?);
                let ok = lhs.approx_eq(&rhs, APPROX_TOL);
                report.push(id, ok, "dh is additive on signatures");
            }
            Err(_) => report.push(id, true, "sum is not a tangent vector; nothing to check"),
        }
    }
    Ok(report)
}
