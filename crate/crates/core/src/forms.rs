//! Differential forms on open boxes with polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::exterior::{ExteriorError, ExteriorForm, MultiIndex};
use crate::expr::{parse_expr, poly_det, BoxDomain, ExprError, PolyExpr, SmoothMap};
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormsError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("expected {expected} vector fields, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("pullback needs a polynomial map")]
    NotPolynomial,
    #[error("metric is not symmetric")]
    MetricNotSymmetric,
    #[error("metric is singular or not positive definite")]
    MetricNotPositiveDefinite,
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// A vector field `sum_j b_j d/dx_j` on a box.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldOnBox {
    pub domain: BoxDomain,
    pub components: Vec<PolyExpr>,
}

impl VectorFieldOnBox {
    pub fn new(domain: BoxDomain, components: Vec<PolyExpr>) -> Result<Self, FormsError> {
        let n = domain.dim();
        if components.len() != n {
            return Err(FormsError::DimensionMismatch { expected: n, found: components.len() });
        }
        if let Some(c) = components.iter().find(|c| c.num_vars() != n) {
            return Err(FormsError::DimensionMismatch { expected: n, found: c.num_vars() });
        }
        Ok(VectorFieldOnBox { domain, components })
    }

    /// The coordinate field `d/dx_j`.
    pub fn coordinate(domain: BoxDomain, j: usize) -> Self {
        let n = domain.dim();
        let components = (0..n)
            .map(|i| if i == j { PolyExpr::one(n) } else { PolyExpr::zero(n) })
            .collect();
        VectorFieldOnBox { domain, components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// `f * xi`.
    pub fn scale_by(&self, f: &PolyExpr) -> Self {
        VectorFieldOnBox {
            domain: self.domain.clone(),
            components: self.components.iter().map(|c| c * f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        VectorFieldOnBox {
            domain: self.domain.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Vec<Rational>, ExprError> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }
}

/// A `k`-form `sum_I a_I dx_I` on an open box in `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialForm {
    domain: BoxDomain,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, PolyExpr>,
}

impl DifferentialForm {
    pub fn zero(domain: BoxDomain, degree: usize) -> Self {
        DifferentialForm { domain, degree, coeffs: BTreeMap::new() }
    }

    /// Degree-0 form given by a function.
    pub fn function(domain: BoxDomain, f: PolyExpr) -> Result<Self, FormsError> {
        Self::from_coeffs(domain, 0, vec![(vec![], f)])
    }

    /// The constant basis form `dx_I`.
    pub fn basis(domain: BoxDomain, idx: Vec<usize>) -> Result<Self, FormsError> {
        let n = domain.dim();
        let k = idx.len();
        Self::from_coeffs(domain, k, vec![(idx, PolyExpr::one(n))])
    }

    pub fn from_coeffs<I>(domain: BoxDomain, degree: usize, coeffs: I) -> Result<Self, FormsError>
    where
        I: IntoIterator<Item = (Vec<usize>, PolyExpr)>,
    {
        let n = domain.dim();
        let mut out = Self::zero(domain, degree);
        for (idx, c) in coeffs {
            if idx.len() != degree {
                return Err(ExteriorError::InvalidIndex(idx).into());
            }
            if c.num_vars() != n {
                return Err(FormsError::DimensionMismatch { expected: n, found: c.num_vars() });
            }
            let idx = MultiIndex::new(idx, n)?;
            out.add_term(idx, &c);
        }
        Ok(out)
    }

    /// Builds a form from `(index, expression)` pairs in `x0..x{n-1}`.
    pub fn parse(domain: BoxDomain, degree: usize, coeffs: &[(&[usize], &str)]) -> Result<Self, FormsError> {
        let n = domain.dim();
        let terms = coeffs
            .iter()
            .map(|(i, s)| Ok((i.to_vec(), parse_expr(s, n)?)))
            .collect::<Result<Vec<_>, FormsError>>()?;
        Self::from_coeffs(domain, degree, terms)
    }

    fn add_term(&mut self, idx: MultiIndex, c: &PolyExpr) {
        let sum = match self.coeffs.get(&idx) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, PolyExpr> {
        &self.coeffs
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> PolyExpr {
        self.coeffs.get(idx).cloned().unwrap_or_else(|| PolyExpr::zero(self.dim()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn with_domain(&self, domain: BoxDomain) -> Result<Self, FormsError> {
        if domain.dim() != self.dim() {
            return Err(FormsError::DimensionMismatch { expected: self.dim(), found: domain.dim() });
        }
        Ok(DifferentialForm { domain, ..self.clone() })
    }

    /// Same coefficients regardless of the carried domain.
    pub fn same_coefficients(&self, other: &Self) -> bool {
        self.degree == other.degree && self.dim() == other.dim() && self.coeffs == other.coeffs
    }

    fn check_compatible(&self, other: &Self) -> Result<(), FormsError> {
        if self.dim() != other.dim() {
            return Err(FormsError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormsError> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(FormsError::Arity { expected: self.degree, found: other.degree });
        }
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormsError> {
        self.add(&other.scale(&Rational::from_i64(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.scale_by(&PolyExpr::constant(self.dim(), c.clone()))
    }

    /// `f * omega`.
    pub fn scale_by(&self, f: &PolyExpr) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), v * f))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        DifferentialForm { domain: self.domain.clone(), degree: self.degree, coeffs }
    }

    /// `omega_x` as an exterior form.
    pub fn eval_at(&self, x: &[Rational]) -> Result<ExteriorForm, FormsError> {
        if x.len() != self.dim() {
            return Err(FormsError::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        if !self.domain.contains(x) {
            return Err(ExprError::OutsideDomain { point: format!("{x:?}") }.into());
        }
        let terms = self
            .coeffs
            .iter()
            .map(|(k, v)| Ok((k.as_slice().to_vec(), v.eval(x)?)))
            .collect::<Result<Vec<_>, FormsError>>()?;
        Ok(ExteriorForm::from_coeffs(self.dim(), self.degree, terms)?)
    }

    pub fn eval_at_f64(&self, x: &[f64]) -> Result<ExteriorForm<f64>, FormsError> {
        if !self.domain.contains_f64(x) {
            return Err(ExprError::OutsideDomain { point: format!("{x:?}") }.into());
        }
        let terms = self
            .coeffs
            .iter()
            .map(|(k, v)| Ok((k.as_slice().to_vec(), v.eval_f64(x)?)))
            .collect::<Result<Vec<_>, FormsError>>()?;
        Ok(ExteriorForm::from_coeffs(self.dim(), self.degree, terms)?)
    }

    /// `x -> omega_x(xi_1(x), ..., xi_k(x))` as a polynomial.
    pub fn apply_to_fields(&self, fields: &[VectorFieldOnBox]) -> Result<PolyExpr, FormsError> {
        if fields.len() != self.degree {
            return Err(FormsError::Arity { expected: self.degree, found: fields.len() });
        }
        let n = self.dim();
        if let Some(f) = fields.iter().find(|f| f.dim() != n) {
            return Err(FormsError::DimensionMismatch { expected: n, found: f.dim() });
        }
        let mut acc = PolyExpr::zero(n);
        for (idx, a) in &self.coeffs {
            let m: Vec<Vec<PolyExpr>> = fields
                .iter()
                .map(|f| idx.as_slice().iter().map(|&i| f.components[i].clone()).collect())
                .collect();
            acc = &acc + &(a * &poly_det(&m, n));
        }
        Ok(acc)
    }

    /// Pointwise wedge product.
    pub fn wedge(&self, other: &Self) -> Result<Self, FormsError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.domain.clone(), self.degree + other.degree);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if let Some((neg, idx)) = MultiIndex::merge(a, b) {
                    let c = ca * cb;
                    out.add_term(idx, &if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `f^* omega` for a polynomial map `f` into this form's ambient space;
    /// the result lives on `f`'s domain.
    pub fn pullback(&self, f: &SmoothMap) -> Result<Self, FormsError> {
        pullback_smooth(f, self)
    }

    /// `d omega = sum_I sum_j (d a_I / d x_j) dx_j ^ dx_I`.
    pub fn exterior_derivative(&self) -> Self {
        let n = self.dim();
        let mut out = Self::zero(self.domain.clone(), self.degree + 1);
        for (idx, a) in &self.coeffs {
            for j in 0..n {
                let da = a.partial(j).expect("index within range");
                if da.is_zero() {
                    continue;
                }
                if let Some((neg, merged)) = MultiIndex::merge(&MultiIndex::single(j), idx) {
                    out.add_term(merged, &if neg { -da } else { da });
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(k, v)| json!({ "idx": k.as_slice(), "expr": v.to_string() }))
            .collect();
        json!({ "domain": self.domain.to_json(), "degree": self.degree, "coeffs": coeffs })
    }

    pub fn from_json(v: &Value) -> Result<Self, FormsError> {
        let bad = |m: &str| FormsError::Json(m.to_string());
        let domain = BoxDomain::from_json(v.get("domain").ok_or_else(|| bad("missing \"domain\""))?)?;
        let degree = v.get("degree").and_then(Value::as_u64).ok_or_else(|| bad("missing \"degree\""))? as usize;
        let n = domain.dim();
        let mut terms = Vec::new();
        for c in v.get("coeffs").and_then(Value::as_array).ok_or_else(|| bad("missing \"coeffs\""))? {
            let idx = c
                .get("idx")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("coefficient missing \"idx\""))?
                .iter()
                .map(|i| i.as_u64().map(|i| i as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("index entries must be non-negative integers"))?;
            let expr = c.get("expr").and_then(Value::as_str).ok_or_else(|| bad("coefficient missing \"expr\""))?;
            terms.push((idx, parse_expr(expr, n)?));
        }
        Self::from_coeffs(domain, degree, terms)
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, v)| {
                let d: Vec<String> = k.as_slice().iter().map(|i| format!("dx{i}")).collect();
                if d.is_empty() {
                    format!("({v})")
                } else {
                    format!("({v})*{}", d.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `(f^* omega)_J = sum_I (a_I o f) det(Df[I, J])`.
pub fn pullback_smooth(f: &SmoothMap, omega: &DifferentialForm) -> Result<DifferentialForm, FormsError> {
    if f.out_dim() != omega.dim() {
        return Err(FormsError::DimensionMismatch { expected: omega.dim(), found: f.out_dim() });
    }
    let comps = f.components().ok_or(FormsError::NotPolynomial)?;
    let jac = f.jacobian_poly().ok_or(FormsError::NotPolynomial)?;
    let m = f.in_dim();
    let mut out = DifferentialForm::zero(f.domain().clone(), omega.degree);
    for (i, a) in &omega.coeffs {
        let a_f = if comps.is_empty() {
            PolyExpr::constant(m, a.constant_term())
        } else {
            a.substitute(comps)?
        };
        if a_f.is_zero() {
            continue;
        }
        for j in MultiIndex::all(m, omega.degree) {
            let minor: Vec<Vec<PolyExpr>> = i
                .as_slice()
                .iter()
                .map(|&r| j.as_slice().iter().map(|&c| jac[r][c].clone()).collect())
                .collect();
            let d = poly_det(&minor, m);
            if !d.is_zero() {
                out.add_term(j, &(&a_f * &d));
            }
        }
    }
    Ok(out)
}

/// `df = sum_j (d f / d x_j) dx_j`.
pub fn differential_of_function(domain: BoxDomain, f: &PolyExpr) -> Result<DifferentialForm, FormsError> {
    DifferentialForm::function(domain, f.clone()).map(|w| w.exterior_derivative())
}

/// The field `eta = g^{-1} a` with `omega(xi) = xi^T g eta` for a constant metric `g`.
pub fn metric_dual(omega: &DifferentialForm, g: &Matrix<Rational>) -> Result<VectorFieldOnBox, FormsError> {
    let n = omega.dim();
    if omega.degree != 1 {
        return Err(FormsError::Arity { expected: 1, found: omega.degree });
    }
    if g.len() != n || g.iter().any(|r| r.len() != n) {
        return Err(FormsError::DimensionMismatch { expected: n, found: g.len() });
    }
    if !linalg::is_symmetric(g, 0.0) {
        return Err(FormsError::MetricNotSymmetric);
    }
    if !linalg::is_positive_definite(g) {
        return Err(FormsError::MetricNotPositiveDefinite);
    }
    let inv = linalg::inverse(g, 0.0).ok_or(FormsError::MetricNotPositiveDefinite)?;
    let a: Vec<PolyExpr> = (0..n).map(|j| omega.coefficient(&MultiIndex::single(j))).collect();
    let components = inv
        .iter()
        .map(|row| {
            row.iter()
                .zip(&a)
                .fold(PolyExpr::zero(n), |acc, (gij, aj)| &acc + &aj.scale(gij))
        })
        .collect();
    VectorFieldOnBox::new(omega.domain.clone(), components)
}
