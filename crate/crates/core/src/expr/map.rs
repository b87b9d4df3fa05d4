//! Maps between open boxes: exact polynomial maps and opaque black-box maps.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use super::{parse_expr, ExprError, PolyExpr};
use crate::linalg::Matrix;
use crate::scalar::{self, Rational, Scalar};

/// Default finite-difference step for black-box maps.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Open axis-aligned box; `None` bounds are infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxDomain {
    lo: Vec<Option<Rational>>,
    hi: Vec<Option<Rational>>,
}

impl BoxDomain {
    pub fn new(lo: Vec<Option<Rational>>, hi: Vec<Option<Rational>>) -> Result<Self, ExprError> {
        if lo.len() != hi.len() {
            return Err(ExprError::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        for (l, h) in lo.iter().zip(&hi) {
            if let (Some(l), Some(h)) = (l, h) {
                if l >= h {
                    return Err(ExprError::EmptyDomain);
                }
            }
        }
        Ok(BoxDomain { lo, hi })
    }

    /// All of `R^n`.
    pub fn whole(n: usize) -> Self {
        BoxDomain { lo: vec![None; n], hi: vec![None; n] }
    }

    /// The cube `(-r, r)^n`.
    pub fn cube(n: usize, r: Rational) -> Self {
        BoxDomain { lo: vec![Some(-r.clone()); n], hi: vec![Some(r); n] }
    }

    pub fn centered(center: &[Rational], r: &Rational) -> Self {
        BoxDomain {
            lo: center.iter().map(|c| Some(c - r)).collect(),
            hi: center.iter().map(|c| Some(c + r)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Option<Rational>] {
        &self.lo
    }

    pub fn hi(&self) -> &[Option<Rational>] {
        &self.hi
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| {
                l.as_ref().is_none_or(|l| v > l) && h.as_ref().is_none_or(|h| v < h)
            })
    }

    pub fn contains_f64(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| {
                l.as_ref().is_none_or(|l| *v > l.to_f64()) && h.as_ref().is_none_or(|h| *v < h.to_f64())
            })
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&vec![scalar::zero(); self.dim()])
    }

    /// Intersection with the cube `(-r, r)^n`.
    pub fn shrink_to(&self, r: &Rational) -> Self {
        let lo = self
            .lo
            .iter()
            .map(|l| Some(match l { Some(l) if *l > -r.clone() => l.clone(), _ => -r.clone() }))
            .collect();
        let hi = self
            .hi
            .iter()
            .map(|h| Some(match h { Some(h) if h < r => h.clone(), _ => r.clone() }))
            .collect();
        BoxDomain { lo, hi }
    }

    /// Product box `self x other`.
    pub fn product(&self, other: &BoxDomain) -> Self {
        let mut lo = self.lo.clone();
        lo.extend(other.lo.iter().cloned());
        let mut hi = self.hi.clone();
        hi.extend(other.hi.iter().cloned());
        BoxDomain { lo, hi }
    }

    /// Half-width available around the origin along every axis, capped at `cap`.
    pub fn inner_radius(&self, cap: &Rational) -> Rational {
        let mut r = cap.clone();
        for (l, h) in self.lo.iter().zip(&self.hi) {
            if let Some(l) = l {
                let d = -l.clone();
                if d < r {
                    r = d;
                }
            }
            if let Some(h) = h {
                if *h < r {
                    r = h.clone();
                }
            }
        }
        r
    }

    pub fn to_json(&self) -> Value {
        let enc = |v: &[Option<Rational>]| -> Vec<Value> {
            v.iter()
                .map(|b| b.as_ref().map_or(Value::Null, scalar::rational_to_compact_json))
                .collect()
        };
        json!({ "lo": enc(&self.lo), "hi": enc(&self.hi) })
    }

    pub fn from_json(v: &Value) -> Result<Self, ExprError> {
        let dec = |key: &str| -> Result<Vec<Option<Rational>>, ExprError> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| ExprError::Json(format!("domain missing \"{key}\"")))?
                .iter()
                .map(|b| {
                    if b.is_null() {
                        Ok(None)
                    } else {
                        scalar::rational_from_json(b)
                            .map(Some)
                            .ok_or_else(|| ExprError::Json(format!("bad bound {b}")))
                    }
                })
                .collect()
        };
        BoxDomain::new(dec("lo")?, dec("hi")?)
    }
}

type BlackBoxFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// An opaque evaluation rule with a finite-difference step.
#[derive(Clone)]
pub struct BlackBox {
    func: Arc<BlackBoxFn>,
    step: f64,
}

#[derive(Clone)]
enum MapRepr {
    Poly(Vec<PolyExpr>),
    BlackBox(BlackBox),
}

/// A deferred domain check: `inner(x)` must lie in `domain`.
#[derive(Clone)]
struct Guard {
    inner: Arc<SmoothMap>,
    domain: BoxDomain,
}

/// A smooth map from an open box in `R^m` to `R^n`.
///
/// Polynomial maps are exact; black-box maps evaluate in `f64` and
/// differentiate with five-point central differences.
#[derive(Clone)]
pub struct SmoothMap {
    domain: BoxDomain,
    out_dim: usize,
    repr: MapRepr,
    guards: Vec<Guard>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            MapRepr::Poly(c) => {
                let comps: Vec<String> = c.iter().map(ToString::to_string).collect();
                write!(f, "SmoothMap[R^{} -> R^{}]({})", self.in_dim(), self.out_dim, comps.join(", "))
            }
            MapRepr::BlackBox(b) => write!(
                f,
                "SmoothMap[R^{} -> R^{}](black-box, h={})",
                self.in_dim(),
                self.out_dim,
                b.step
            ),
        }
    }
}

impl SmoothMap {
    pub fn polynomial(domain: BoxDomain, components: Vec<PolyExpr>) -> Result<Self, ExprError> {
        let m = domain.dim();
        if let Some(bad) = components.iter().find(|c| c.num_vars() != m) {
            return Err(ExprError::DimensionMismatch { expected: m, found: bad.num_vars() });
        }
        Ok(SmoothMap { domain, out_dim: components.len(), repr: MapRepr::Poly(components), guards: vec![] })
    }

    /// Polynomial map on all of `R^m`.
    pub fn polynomial_global(in_dim: usize, components: Vec<PolyExpr>) -> Result<Self, ExprError> {
        Self::polynomial(BoxDomain::whole(in_dim), components)
    }

    /// Parses each component string in `x0..x{m-1}`.
    pub fn parse(domain: BoxDomain, components: &[&str]) -> Result<Self, ExprError> {
        let m = domain.dim();
        let comps = components.iter().map(|s| parse_expr(s, m)).collect::<Result<Vec<_>, _>>()?;
        Self::polynomial(domain, comps)
    }

    pub fn black_box<F>(domain: BoxDomain, out_dim: usize, step: f64, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        SmoothMap {
            domain,
            out_dim,
            repr: MapRepr::BlackBox(BlackBox { func: Arc::new(f), step }),
            guards: vec![],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::polynomial_global(n, (0..n).map(|i| PolyExpr::var(n, i)).collect()).expect("consistent dims")
    }

    pub fn constant(domain: BoxDomain, value: &[Rational]) -> Self {
        let m = domain.dim();
        let comps = value.iter().map(|v| PolyExpr::constant(m, v.clone())).collect();
        Self::polynomial(domain, comps).expect("consistent dims")
    }

    /// `x -> a x + b` for an `n x m` matrix `a`.
    pub fn affine(a: &Matrix<Rational>, b: &[Rational]) -> Result<Self, ExprError> {
        let m = a.first().map_or(0, Vec::len);
        if a.len() != b.len() {
            return Err(ExprError::DimensionMismatch { expected: a.len(), found: b.len() });
        }
        let comps = a
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let mut terms: Vec<(Vec<u32>, Rational)> = row
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let mut e = vec![0; m];
                        e[j] = 1;
                        (e, c.clone())
                    })
                    .collect();
                terms.push((vec![0; m], bi.clone()));
                PolyExpr::from_terms(m, terms)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::polynomial_global(m, comps)
    }

    pub fn linear(a: &Matrix<Rational>) -> Result<Self, ExprError> {
        Self::affine(a, &vec![scalar::zero(); a.len()])
    }

    pub fn in_dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.repr, MapRepr::Poly(_))
    }

    pub fn components(&self) -> Option<&[PolyExpr]> {
        match &self.repr {
            MapRepr::Poly(c) => Some(c),
            MapRepr::BlackBox(_) => None,
        }
    }

    pub fn step(&self) -> f64 {
        match &self.repr {
            MapRepr::Poly(_) => DEFAULT_STEP,
            MapRepr::BlackBox(b) => b.step,
        }
    }

    /// Same rule on a smaller (or different) box.
    pub fn with_domain(&self, domain: BoxDomain) -> Result<Self, ExprError> {
        if domain.dim() != self.in_dim() {
            return Err(ExprError::DimensionMismatch { expected: self.in_dim(), found: domain.dim() });
        }
        let mut m = self.clone();
        m.domain = domain;
        Ok(m)
    }

    fn check_guards_exact(&self, x: &[Rational]) -> Result<(), ExprError> {
        for g in &self.guards {
            let y = g.inner.eval(x)?;
            if !g.domain.contains(&y) {
                return Err(ExprError::OutsideDomain { point: fmt_point(&y) });
            }
        }
        Ok(())
    }

    fn check_guards_f64(&self, x: &[f64]) -> Result<(), ExprError> {
        for g in &self.guards {
            let y = g.inner.eval_f64(x)?;
            if !g.domain.contains_f64(&y) {
                return Err(ExprError::OutsideDomain { point: format!("{y:?}") });
            }
        }
        Ok(())
    }

    /// Exact evaluation; black-box maps are rejected.
    pub fn eval(&self, x: &[Rational]) -> Result<Vec<Rational>, ExprError> {
        if x.len() != self.in_dim() {
            return Err(ExprError::DimensionMismatch { expected: self.in_dim(), found: x.len() });
        }
        let MapRepr::Poly(comps) = &self.repr else {
            return Err(ExprError::BlackBoxNotExact);
        };
        if !self.domain.contains(x) {
            return Err(ExprError::OutsideDomain { point: fmt_point(x) });
        }
        self.check_guards_exact(x)?;
        comps.iter().map(|c| c.eval(x)).collect()
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<Vec<f64>, ExprError> {
        if x.len() != self.in_dim() {
            return Err(ExprError::DimensionMismatch { expected: self.in_dim(), found: x.len() });
        }
        if !self.domain.contains_f64(x) {
            return Err(ExprError::OutsideDomain { point: format!("{x:?}") });
        }
        self.check_guards_f64(x)?;
        Ok(self.raw_f64(x))
    }

    /// Evaluation without domain checks (used inside finite-difference stencils).
    pub(crate) fn raw_f64(&self, x: &[f64]) -> Vec<f64> {
        match &self.repr {
            MapRepr::Poly(c) => c.iter().map(|p| p.eval_f64(x).unwrap_or(f64::NAN)).collect(),
            MapRepr::BlackBox(b) => (b.func)(x),
        }
    }

    /// Jacobian as a matrix of polynomials (polynomial maps only).
    pub fn jacobian_poly(&self) -> Option<Vec<Vec<PolyExpr>>> {
        self.components().map(|c| c.iter().map(PolyExpr::gradient).collect())
    }

    /// Exact Jacobian, entry `(i, j) = d f_i / d x_j`.
    pub fn jacobian(&self, x: &[Rational]) -> Result<Matrix<Rational>, ExprError> {
        self.eval(x)?;
        let jac = self.jacobian_poly().ok_or(ExprError::BlackBoxNotExact)?;
        jac.iter()
            .map(|row| row.iter().map(|d| d.eval(x)).collect())
            .collect()
    }

    /// Jacobian in floating point; five-point stencil for black-box maps.
    pub fn jacobian_f64(&self, x: &[f64]) -> Result<Matrix<f64>, ExprError> {
        self.eval_f64(x)?;
        if let Some(jac) = self.jacobian_poly() {
            return jac
                .iter()
                .map(|row| row.iter().map(|d| d.eval_f64(x)).collect())
                .collect();
        }
        let m = self.in_dim();
        let h = self.step();
        let mut out = vec![vec![0.0; m]; self.out_dim];
        for j in 0..m {
            let col = stencil(|t| {
                let mut y = x.to_vec();
                y[j] += t;
                self.raw_f64(&y)
            }, h);
            for i in 0..self.out_dim {
                out[i][j] = col[i];
            }
        }
        Ok(out)
    }

    /// Restriction to the cube `(-r, r)^m` intersected with the current box.
    pub fn restrict(&self, r: &Rational) -> Self {
        let mut m = self.clone();
        m.domain = self.domain.shrink_to(r);
        m
    }

    pub fn to_json(&self) -> Result<Value, ExprError> {
        let comps = self.components().ok_or(ExprError::BlackBoxNotExact)?;
        Ok(json!({
            "domain": self.domain.to_json(),
            "components": comps.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }))
    }

    pub fn from_json(v: &Value) -> Result<Self, ExprError> {
        let domain = BoxDomain::from_json(v.get("domain").ok_or_else(|| ExprError::Json("map missing \"domain\"".into()))?)?;
        let comps = v
            .get("components")
            .and_then(Value::as_array)
            .ok_or_else(|| ExprError::Json("map missing \"components\"".into()))?;
        let m = domain.dim();
        let comps = comps
            .iter()
            .map(|c| {
                let s = c.as_str().ok_or_else(|| ExprError::Json("component must be a string".into()))?;
                parse_expr(s, m)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::polynomial(domain, comps)
    }
}

impl SmoothMap {
    fn zip_with(
        &self,
        other: &SmoothMap,
        poly: impl Fn(&PolyExpr, &PolyExpr) -> PolyExpr,
        float: fn(f64, f64) -> f64,
    ) -> Result<SmoothMap, ExprError> {
        if self.in_dim() != other.in_dim() {
            return Err(ExprError::DimensionMismatch { expected: self.in_dim(), found: other.in_dim() });
        }
        if self.out_dim != other.out_dim {
            return Err(ExprError::DimensionMismatch { expected: self.out_dim, found: other.out_dim });
        }
        let mut guards = self.guards.clone();
        guards.extend(other.guards.iter().cloned());
        guards.push(Guard { inner: Arc::new(SmoothMap::identity(self.in_dim())), domain: other.domain.clone() });
        let repr = match (&self.repr, &other.repr) {
            (MapRepr::Poly(a), MapRepr::Poly(b)) => MapRepr::Poly(a.iter().zip(b).map(|(x, y)| poly(x, y)).collect()),
            _ => {
                let (a, b) = (self.clone(), other.clone());
                let step = self.step().min(other.step());
                MapRepr::BlackBox(BlackBox {
                    func: Arc::new(move |x: &[f64]| {
                        a.raw_f64(x).into_iter().zip(b.raw_f64(x)).map(|(u, v)| float(u, v)).collect()
                    }),
                    step,
                })
            }
        };
        Ok(SmoothMap { domain: self.domain.clone(), out_dim: self.out_dim, repr, guards })
    }

    /// Pointwise sum; evaluation also requires the point to lie in `other`'s box.
    pub fn add(&self, other: &SmoothMap) -> Result<SmoothMap, ExprError> {
        self.zip_with(other, |a, b| a + b, |u, v| u + v)
    }

    pub fn sub(&self, other: &SmoothMap) -> Result<SmoothMap, ExprError> {
        self.zip_with(other, |a, b| a - b, |u, v| u - v)
    }

    /// `x -> f(x) + c`.
    pub fn translate(&self, c: &[Rational]) -> Result<SmoothMap, ExprError> {
        let k = SmoothMap::constant(self.domain.clone(), c);
        self.add(&k)
    }

    /// `x -> c f(x)`.
    pub fn scale(&self, c: &Rational) -> SmoothMap {
        let mut out = self.clone();
        out.repr = match &self.repr {
            MapRepr::Poly(p) => MapRepr::Poly(p.iter().map(|q| q.scale(c)).collect()),
            MapRepr::BlackBox(b) => {
                let (f, cf) = (self.clone(), c.to_f64());
                MapRepr::BlackBox(BlackBox {
                    func: Arc::new(move |x: &[f64]| f.raw_f64(x).into_iter().map(|v| cf * v).collect()),
                    step: b.step,
                })
            }
        };
        out
    }

    /// `x -> (f(x), g(x))`.
    pub fn stack(&self, other: &SmoothMap) -> Result<SmoothMap, ExprError> {
        if self.in_dim() != other.in_dim() {
            return Err(ExprError::DimensionMismatch { expected: self.in_dim(), found: other.in_dim() });
        }
        let mut guards = self.guards.clone();
        guards.extend(other.guards.iter().cloned());
        let repr = match (&self.repr, &other.repr) {
            (MapRepr::Poly(a), MapRepr::Poly(b)) => MapRepr::Poly(a.iter().chain(b).cloned().collect()),
            _ => {
                let (a, b) = (self.clone(), other.clone());
                let step = self.step().min(other.step());
                MapRepr::BlackBox(BlackBox {
                    func: Arc::new(move |x: &[f64]| {
                        let mut v = a.raw_f64(x);
                        v.extend(b.raw_f64(x));
                        v
                    }),
                    step,
                })
            }
        };
        Ok(SmoothMap { domain: self.domain.clone(), out_dim: self.out_dim + other.out_dim, repr, guards })
    }
}

/// Coordinate projection `x -> (x_from, ..., x_{from+count-1})` on `domain`.
pub fn projection(domain: BoxDomain, from: usize, count: usize) -> SmoothMap {
    let n = domain.dim();
    let comps = (from..from + count).map(|i| PolyExpr::var(n, i)).collect();
    SmoothMap::polynomial(domain, comps).expect("consistent dims")
}

/// `x -> c + A x` in floating point, as a black-box map.
pub fn affine_f64(domain: BoxDomain, c: Vec<f64>, a: Matrix<f64>) -> SmoothMap {
    let out = c.len();
    SmoothMap::black_box(domain, out, DEFAULT_STEP, move |x| {
        c.iter()
            .zip(&a)
            .map(|(ci, row)| ci + row.iter().zip(x).map(|(u, v)| u * v).sum::<f64>())
            .collect()
    })
}

/// Equality of two maps: formal for polynomial maps, on a sample grid otherwise.
pub fn maps_agree(a: &SmoothMap, b: &SmoothMap, tol: f64) -> bool {
    if a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim() {
        return false;
    }
    if let (Some(x), Some(y)) = (a.components(), b.components()) {
        return x == y;
    }
    sample_grid(a.domain(), 3)
        .iter()
        .all(|x| match (a.eval_f64(x), b.eval_f64(x)) {
            (Ok(u), Ok(v)) => u.iter().zip(&v).all(|(s, t)| (s - t).abs() <= tol),
            _ => false,
        })
}

/// Deterministic grid in the box, inside the cube of half-width 1/2.
pub fn sample_grid(domain: &BoxDomain, per_axis: usize) -> Vec<Vec<f64>> {
    let n = domain.dim();
    let r = domain.inner_radius(&scalar::rat(1, 2)).to_f64();
    let ticks: Vec<f64> = (0..per_axis)
        .map(|i| if per_axis == 1 { 0.0 } else { r * 0.9 * (2.0 * i as f64 / (per_axis - 1) as f64 - 1.0) })
        .collect();
    let mut pts = vec![vec![]];
    for _ in 0..n {
        pts = pts
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                ticks.iter().map(move |t| {
                    let mut q = p.clone();
                    q.push(*t);
                    q
                })
            })
            .collect();
    }
    pts
}

/// Five-point central difference of a vector-valued function of one step parameter.
pub(crate) fn stencil<F: Fn(f64) -> Vec<f64>>(f: F, h: f64) -> Vec<f64> {
    let m2 = f(-2.0 * h);
    let m1 = f(-h);
    let p1 = f(h);
    let p2 = f(2.0 * h);
    (0..m1.len())
        .map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h))
        .collect()
}

fn fmt_point(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(scalar::fmt_rational).collect();
    format!("({})", parts.join(", "))
}

/// `f o g`, defined on `g`'s box; that `g(x)` lands in `f`'s box is checked at evaluation.
pub fn compose(f: &SmoothMap, g: &SmoothMap) -> Result<SmoothMap, ExprError> {
    if g.out_dim != f.in_dim() {
        return Err(ExprError::DimensionMismatch { expected: f.in_dim(), found: g.out_dim });
    }
    let mut guards = vec![Guard { inner: Arc::new(g.clone()), domain: f.domain.clone() }];
    for fg in &f.guards {
        guards.push(Guard { inner: Arc::new(compose(&fg.inner, g)?), domain: fg.domain.clone() });
    }
    guards.extend(g.guards.iter().cloned());
    let repr = match (&f.repr, &g.repr) {
        (MapRepr::Poly(fc), MapRepr::Poly(gc)) => MapRepr::Poly(
            fc.iter()
                .map(|c| {
                    if gc.is_empty() {
                        Ok(PolyExpr::constant(g.in_dim(), c.constant_term()))
                    } else {
                        c.substitute(gc)
                    }
                })
                .collect::<Result<_, _>>()?,
        ),
        _ => {
            let (f2, g2) = (f.clone(), g.clone());
            let step = f.step().min(g.step());
            MapRepr::BlackBox(BlackBox { func: Arc::new(move |x: &[f64]| f2.raw_f64(&g2.raw_f64(x))), step })
        }
    };
    Ok(SmoothMap { domain: g.domain.clone(), out_dim: f.out_dim, repr, guards })
}
