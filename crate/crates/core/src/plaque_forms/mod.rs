//! Forms on a diffeological space in three representations: pointwise exterior forms on
//! the signature spaces, algebraic maps on vector fields, and plaque-indexed families of
//! differential forms. Conversion from the first to the third and back is [`psi`] and
//! [`psi_inverse_at`].

pub mod algebraic;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::diffeology::checks::check_smooth_map;
use crate::diffeology::maps::{constant, leading_domain};
use crate::diffeology::{Coords, DiffError, DiffSpace, JoinMode, Num, ProbeOutcome, SpaceVectorField, TangentVector};
use crate::expr::{compose, poly_det, sample_grid, BoxDomain, ExprError, PolyExpr, SmoothMap};
use crate::exterior::{ExteriorError, ExteriorForm, MultiIndex};
use crate::forms::{pullback_smooth, DifferentialForm, FormsError};
use crate::scalar::{self, Rational};
use crate::spaces::{FormValue, SpacesError};

pub use algebraic::{counterexample_e2, pointwise_to_algebraic, pullback_eps2, AlgebraicForm, Decomposer, E2Evidence};

#[derive(Debug, Error)]
pub enum PlaqueFormError {
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Spaces(#[from] SpacesError),
    #[error("space {0} does not attest the absence of transverse points")]
    TransversePoints(String),
    #[error("plaque-indexed forms are evaluated on polynomial plaques only")]
    NotPolynomial,
    #[error("the reparameterization leaves the plaque's box at {0}")]
    DomainEscape(String),
    #[error("plaques are not tangent along the given directions: {0}")]
    NotTangent(String),
    #[error("no spanning plaque: {0}")]
    NoSpanningPlaque(String),
    #[error("value depends on the spanning plaque: {0} vs {1}")]
    PlaqueDependent(String, String),
    #[error("map is not smooth: {0}")]
    NotSmooth(String),
    #[error("surjectivity not witnessed: {0}")]
    SurjectivityNotWitnessed(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("field cannot be decomposed: {0}")]
    NotDivisible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

type Result<T> = std::result::Result<T, PlaqueFormError>;

/// `sum_I (a_I o point) det(jac[I, J]) dr_J` on `domain`.
///
/// `point` gives ambient coordinates as polynomials in the `m` variables of `domain`,
/// and `jac` is the `G x m` Jacobian of the signature coordinates.
fn pull(
    coeffs: &BTreeMap<MultiIndex, PolyExpr>,
    degree: usize,
    point: &[PolyExpr],
    jac: &[Vec<PolyExpr>],
    domain: BoxDomain,
) -> Result<DifferentialForm> {
    let m = domain.dim();
    let mut terms: BTreeMap<Vec<usize>, PolyExpr> = BTreeMap::new();
    for (i, a) in coeffs {
        let a_p = a.substitute(point)?;
        if a_p.is_zero() {
            continue;
        }
        for j in MultiIndex::all(m, degree) {
            let minor: Vec<Vec<PolyExpr>> =
                i.as_slice().iter().map(|&r| j.as_slice().iter().map(|&c| jac[r][c].clone()).collect()).collect();
            let d = poly_det(&minor, m);
            if !d.is_zero() {
                let e = terms.entry(j.as_slice().to_vec()).or_insert_with(|| PolyExpr::zero(m));
                *e = &*e + &(&a_p * &d);
            }
        }
    }
    Ok(DifferentialForm::from_coeffs(domain, degree, terms)?)
}

fn poly_jacobian(comps: &[PolyExpr]) -> Vec<Vec<PolyExpr>> {
    comps.iter().map(PolyExpr::gradient).collect()
}

/// Generators composed with a polynomial map.
fn generators_along(space: &DiffSpace, comps: &[PolyExpr]) -> Result<Vec<PolyExpr>> {
    Ok(space.generators().iter().map(|g| g.substitute(comps)).collect::<std::result::Result<_, _>>()?)
}

/// A pointwise form: at each point `F` an exterior form on the signature space `R^G`,
/// with coefficients polynomial in the ambient coordinates of `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointwiseForm {
    ambient: usize,
    sig_dim: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, PolyExpr>,
}

impl PointwiseForm {
    pub fn new<I>(ambient: usize, sig_dim: usize, degree: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, PolyExpr)>,
    {
        let mut out = PointwiseForm { ambient, sig_dim, degree, coeffs: BTreeMap::new() };
        for (idx, c) in coeffs {
            if idx.len() != degree {
                return Err(ExteriorError::InvalidIndex(idx).into());
            }
            if c.num_vars() != ambient {
                return Err(PlaqueFormError::DimensionMismatch { expected: ambient, found: c.num_vars() });
            }
            let idx = MultiIndex::new(idx, sig_dim)?;
            out.add_term(idx, &c);
        }
        Ok(out)
    }

    fn add_term(&mut self, idx: MultiIndex, c: &PolyExpr) {
        let e = self.coeffs.entry(idx.clone()).or_insert_with(|| PolyExpr::zero(self.ambient));
        *e = &*e + c;
        if e.is_zero() {
            self.coeffs.remove(&idx);
        }
    }

    pub fn zero(ambient: usize, sig_dim: usize, degree: usize) -> Self {
        PointwiseForm { ambient, sig_dim, degree, coeffs: BTreeMap::new() }
    }

    /// A differential form on `R^N` read as a pointwise form for coordinate generators.
    pub fn from_differential(omega: &DifferentialForm) -> Self {
        let n = omega.dim();
        PointwiseForm { ambient: n, sig_dim: n, degree: omega.degree(), coeffs: omega.coeffs().clone() }
    }

    /// The same coefficients as a differential form on `R^N`, when `G = N`.
    pub fn to_differential(&self) -> Result<DifferentialForm> {
        if self.sig_dim != self.ambient {
            return Err(PlaqueFormError::DimensionMismatch { expected: self.ambient, found: self.sig_dim });
        }
        let terms = self.coeffs.iter().map(|(k, c)| (k.as_slice().to_vec(), c.clone()));
        Ok(DifferentialForm::from_coeffs(BoxDomain::whole(self.ambient), self.degree, terms)?)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn sig_dim(&self) -> usize {
        self.sig_dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, PolyExpr> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.ambient, self.sig_dim, self.degree) != (other.ambient, other.sig_dim, other.degree) {
            return Err(PlaqueFormError::DimensionMismatch { expected: self.degree, found: other.degree });
        }
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(k.clone(), c);
        }
        Ok(out)
    }

    /// `f omega` for a function `f` of the ambient coordinates.
    pub fn scale_by(&self, f: &PolyExpr) -> Self {
        let mut out = Self::zero(self.ambient, self.sig_dim, self.degree);
        for (k, c) in &self.coeffs {
            out.add_term(k.clone(), &(c * f));
        }
        out
    }

    pub fn value_at(&self, x: &Coords) -> Result<FormValue> {
        Ok(match x {
            Coords::Exact(v) => FormValue::Exact(ExteriorForm::from_coeffs(
                self.sig_dim,
                self.degree,
                self.coeffs.iter().map(|(k, c)| c.eval(v).map(|y| (k.as_slice().to_vec(), y))).collect::<std::result::Result<Vec<_>, _>>()?,
            )?),
            Coords::Approx(v) => FormValue::Approx(ExteriorForm::from_coeffs(
                self.sig_dim,
                self.degree,
                self.coeffs
                    .iter()
                    .map(|(k, c)| c.eval_f64(v).map(|y| (k.as_slice().to_vec(), y)))
                    .collect::<std::result::Result<Vec<_>, _>>()?,
            )?),
        })
    }

    /// `omega_F(v_1, .., v_k)` on tangent vectors at `F`.
    pub fn evaluate(&self, base: &Coords, vectors: &[TangentVector]) -> Result<Num> {
        if vectors.len() != self.degree {
            return Err(PlaqueFormError::DimensionMismatch { expected: self.degree, found: vectors.len() });
        }
        let sigs: Vec<Coords> = vectors.iter().map(|v| v.signature.clone()).collect();
        let m = crate::diffeology::JetMatrix::from_columns(&sigs, self.sig_dim);
        Ok(self.value_at(base)?.evaluate(&m)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ambient": self.ambient,
            "signature_dim": self.sig_dim,
            "degree": self.degree,
            "coeffs": self.coeffs.iter().map(|(k, c)| json!({"idx": k.as_slice(), "expr": c.to_string()})).collect::<Vec<_>>(),
        })
    }

    /// `p^* omega` along a polynomial plaque of `space`.
    pub fn pull_along(&self, space: &DiffSpace, p: &SmoothMap) -> Result<DifferentialForm> {
        let comps = p.components().ok_or(PlaqueFormError::NotPolynomial)?;
        let gp = generators_along(space, comps)?;
        pull(&self.coeffs, self.degree, comps, &poly_jacobian(&gp), p.domain().clone())
    }
}

type Rule = Arc<dyn Fn(&SmoothMap) -> Result<DifferentialForm> + Send + Sync>;

/// A plaque-indexed form, given by a rule `p -> omega_p` on polynomial plaques.
#[derive(Clone)]
pub struct PlaqueIndexedForm {
    label: String,
    degree: usize,
    rule: Rule,
}

impl std::fmt::Debug for PlaqueIndexedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlaqueIndexedForm").field("label", &self.label).field("degree", &self.degree).finish()
    }
}

impl PlaqueIndexedForm {
    pub fn new(label: &str, degree: usize, rule: impl Fn(&SmoothMap) -> Result<DifferentialForm> + Send + Sync + 'static) -> Self {
        PlaqueIndexedForm { label: label.to_string(), degree, rule: Arc::new(rule) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, p: &SmoothMap) -> Result<DifferentialForm> {
        let w = (self.rule)(p)?;
        if w.degree() != self.degree || w.dim() != p.in_dim() {
            return Err(PlaqueFormError::DimensionMismatch { expected: self.degree, found: w.degree() });
        }
        Ok(w)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(PlaqueFormError::DimensionMismatch { expected: self.degree, found: other.degree });
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::new(&format!("{} + {}", self.label, other.label), self.degree, move |p| Ok(a.eval(p)?.add(&b.eval(p)?)?)))
    }

    /// `p -> (f o p) omega_p` for a function `f` of the ambient coordinates.
    pub fn scale_by(&self, f: &PolyExpr) -> Self {
        let (a, f) = (self.clone(), f.clone());
        Self::new(&format!("f * {}", self.label), self.degree, move |p| {
            let comps = p.components().ok_or(PlaqueFormError::NotPolynomial)?;
            Ok(a.eval(p)?.scale_by(&f.substitute(comps)?))
        })
    }

    /// Values on the given plaques, with the extension law named.
    pub fn to_json(&self, plaques: &[SmoothMap]) -> Result<Value> {
        let gens = plaques
            .iter()
            .map(|p| Ok(json!({"plaque": p.to_json()?, "form": self.eval(p)?.to_json()})))
            .collect::<Result<Vec<_>>>()?;
        Ok(json!({"label": self.label, "degree": self.degree, "generators": gens, "extension": "precomposition"}))
    }
}

/// `Psi(omega) = (p^* omega)_p`, refused unless the space attests it has no transverse points.
pub fn psi(space: &DiffSpace, omega: &PointwiseForm) -> Result<PlaqueIndexedForm> {
    if !space.attests_no_transverse_points() {
        return Err(PlaqueFormError::TransversePoints(space.name().to_string()));
    }
    psi_unattested(space, omega)
}

/// The plaque-indexed family `(p^* omega)_p` without the transversality attestation.
pub fn psi_unattested(space: &DiffSpace, omega: &PointwiseForm) -> Result<PlaqueIndexedForm> {
    if omega.ambient_dim() != space.ambient_dim() || omega.sig_dim() != space.generators().len() {
        return Err(PlaqueFormError::DimensionMismatch { expected: space.generators().len(), found: omega.sig_dim() });
    }
    let (x, w) = (space.clone(), omega.clone());
    Ok(PlaqueIndexedForm::new("psi", omega.degree(), move |p| {
        x.require_plaque(p)?;
        w.pull_along(&x, p)
    }))
}

/// Result of the compatibility check `omega_{p o phi} = phi^* omega_p`.
#[derive(Clone, Debug)]
pub struct CompatibilityResult {
    pub passed: bool,
    /// First differing coefficient: index, `omega_{p o phi}` and `phi^* omega_p`.
    pub witness: Option<(MultiIndex, PolyExpr, PolyExpr)>,
}

pub fn compatibility_check(omega: &PlaqueIndexedForm, p: &SmoothMap, phi: &SmoothMap) -> Result<CompatibilityResult> {
    if phi.out_dim() != p.in_dim() {
        return Err(PlaqueFormError::DimensionMismatch { expected: p.in_dim(), found: phi.out_dim() });
    }
    for r in sample_grid(phi.domain(), 3) {
        let y = phi.eval_f64(&r)?;
        if !p.domain().contains_f64(&y) {
            return Err(PlaqueFormError::DomainEscape(format!("{r:?}")));
        }
    }
    let lhs = omega.eval(&compose(p, phi)?)?;
    let rhs = pullback_smooth(phi, &omega.eval(p)?)?;
    let keys: std::collections::BTreeSet<&MultiIndex> = lhs.coeffs().keys().chain(rhs.coeffs().keys()).collect();
    for k in keys {
        let (a, b) = (lhs.coefficient(k), rhs.coefficient(k));
        if a != b {
            return Ok(CompatibilityResult { passed: false, witness: Some((k.clone(), a, b)) });
        }
    }
    Ok(CompatibilityResult { passed: true, witness: None })
}

/// `t -> p(r + t v)`.
fn line_through(p: &SmoothMap, r: &[Rational], v: &[Rational]) -> Result<SmoothMap> {
    let comps = r
        .iter()
        .zip(v)
        .map(|(ri, vi)| &PolyExpr::constant(1, ri.clone()) + &PolyExpr::var(1, 0).scale(vi))
        .collect();
    Ok(compose(p, &SmoothMap::polynomial_global(1, comps)?)?)
}

/// Values compared by the tangent condition.
#[derive(Clone, Debug)]
pub struct TangentConditionResult {
    pub passed: bool,
    pub omega_values: (Rational, Rational),
    /// `d omega` values, present when the plaques are also tangent along the extra direction.
    pub d_values: Option<(Rational, Rational)>,
}

fn tangent_along(space: &DiffSpace, p1: &SmoothMap, r1: &[Rational], p2: &SmoothMap, r2: &[Rational], v1: &[Rational], v2: &[Rational]) -> Result<bool> {
    let (c1, c2) = (line_through(p1, r1, v1)?, line_through(p2, r2, v2)?);
    if !crate::diffeology::base_point(&c1)?.approx_eq(&crate::diffeology::base_point(&c2)?, 0.0) {
        return Ok(false);
    }
    Ok(space.equivalent(&c1, &c2, 1)?)
}

/// Checks `omega_{p1}(v)(r1) = omega_{p2}(v)(r2)` and the same for `d omega` on `(v, extra)`.
#[allow(clippy::too_many_arguments)]
pub fn tangent_condition_check(
    space: &DiffSpace,
    omega: &PlaqueIndexedForm,
    p1: &SmoothMap,
    r1: &[Rational],
    p2: &SmoothMap,
    r2: &[Rational],
    dirs: &[Vec<Rational>],
    extra: Option<&[Rational]>,
) -> Result<TangentConditionResult> {
    if dirs.len() != omega.degree() {
        return Err(PlaqueFormError::DimensionMismatch { expected: omega.degree(), found: dirs.len() });
    }
    for (i, v) in dirs.iter().enumerate() {
        if !tangent_along(space, p1, r1, p2, r2, v, v)? {
            return Err(PlaqueFormError::NotTangent(format!("direction {i}")));
        }
    }
    let (w1, w2) = (omega.eval(p1)?, omega.eval(p2)?);
    let a = w1.eval_at(r1)?.evaluate(dirs)?;
    let b = w2.eval_at(r2)?.evaluate(dirs)?;
    let d_values = match extra {
        Some(e) if tangent_along(space, p1, r1, p2, r2, e, e)? => {
            let mut all = dirs.to_vec();
            all.push(e.to_vec());
            let da = w1.exterior_derivative().eval_at(r1)?.evaluate(&all)?;
            let db = w2.exterior_derivative().eval_at(r2)?.evaluate(&all)?;
            Some((da, db))
        }
        _ => None,
    };
    let passed = a == b && d_values.as_ref().is_none_or(|(x, y)| x == y);
    Ok(TangentConditionResult { passed, omega_values: (a, b), d_values })
}

/// `t -> t + t^2`.
fn bend() -> SmoothMap {
    SmoothMap::polynomial_global(1, vec![&PolyExpr::var(1, 0) + &PolyExpr::var(1, 0).pow(2)]).expect("dims")
}

/// A plaque `q` at `base` with `[q(t e_i)] = [w_i]`, built by iterated classwise joins.
fn spanning_plaque(space: &DiffSpace, base: &Coords, witnesses: &[SmoothMap]) -> Result<SmoothMap> {
    let Some(first) = witnesses.first() else {
        return Ok(constant(BoxDomain::whole(1), base));
    };
    let mut q = first.clone();
    for w in &witnesses[1..] {
        match space.joint_plaque_probe(&q, w, JoinMode::Classwise)? {
            ProbeOutcome::Found { plaque, .. } => q = plaque,
            ProbeOutcome::NotFound(c) => return Err(PlaqueFormError::NoSpanningPlaque(c.to_json().to_string())),
        }
    }
    Ok(q)
}

fn value_at_origin(omega: &PlaqueIndexedForm, q: &SmoothMap, k: usize) -> Result<Rational> {
    let w = omega.eval(q)?;
    let n = q.in_dim();
    let zero = vec![scalar::zero(); n];
    let e: Vec<Vec<Rational>> = (0..k).map(|i| (0..n).map(|j| if i == j { scalar::one() } else { scalar::zero() }).collect()).collect();
    Ok(w.eval_at(&zero)?.evaluate(&e)?)
}

/// `omega_F(v_1, .., v_k) = Omega(q)(0)(e_1, .., e_k)` for a spanning plaque `q`, checked
/// against a second spanning plaque built from reparameterized witnesses.
pub fn psi_inverse_at(space: &DiffSpace, omega: &PlaqueIndexedForm, base: &Coords, vectors: &[TangentVector]) -> Result<Rational> {
    let k = omega.degree();
    if vectors.len() != k {
        return Err(PlaqueFormError::DimensionMismatch { expected: k, found: vectors.len() });
    }
    if vectors.iter().any(|v| !v.base.approx_eq(base, 0.0)) {
        return Err(DiffError::BaseMismatch.into());
    }
    let witnesses: Vec<SmoothMap> = vectors.iter().map(|v| v.witness.clone()).collect();
    let q = spanning_plaque(space, base, &witnesses)?;
    let value = value_at_origin(omega, &q, k)?;
    let bent = witnesses.iter().map(|w| compose(w, &bend())).collect::<std::result::Result<Vec<_>, _>>()?;
    let q2 = spanning_plaque(space, base, &bent)?;
    let other = value_at_origin(omega, &q2, k)?;
    if other != value {
        return Err(PlaqueFormError::PlaqueDependent(scalar::fmt_rational(&value), scalar::fmt_rational(&other)));
    }
    Ok(value)
}

/// `r -> omega_{p(r)}(xi_1(p(r)), .., xi_k(p(r)))`, computed from the plaque-indexed form
/// through a plaque `q(r, t)` integrating the fields along `p`.
pub fn psi_inverse_along(space: &DiffSpace, omega: &PlaqueIndexedForm, fields: &[SpaceVectorField], p: &SmoothMap) -> Result<PolyExpr> {
    let k = omega.degree();
    if fields.len() != k {
        return Err(PlaqueFormError::DimensionMismatch { expected: k, found: fields.len() });
    }
    let q = match space.flow_probe(p, fields)? {
        ProbeOutcome::Found { plaque, .. } => plaque,
        ProbeOutcome::NotFound(c) => return Err(PlaqueFormError::NoSpanningPlaque(c.obstruction)),
    };
    let n = p.in_dim();
    let w = omega.eval(&q)?;
    let idx = MultiIndex::new((n..n + k).collect(), n + k)?;
    let mut c = w.coefficient(&idx);
    for t in n..n + k {
        c = c.specialize(t, &scalar::zero());
    }
    c.truncate_vars(n).ok_or_else(|| PlaqueFormError::Unsupported("flow variables survived specialization".into()))
}

/// `omega_F(xi_1(F), ..)` along `p`, directly from the pointwise form.
pub fn pointwise_along(space: &DiffSpace, omega: &PointwiseForm, fields: &[SpaceVectorField], p: &SmoothMap) -> Result<PolyExpr> {
    let comps = p.components().ok_or(PlaqueFormError::NotPolynomial)?;
    let n = p.in_dim();
    let sigs = fields
        .iter()
        .map(|xi| {
            let v = xi.velocity.components().ok_or(PlaqueFormError::NotPolynomial)?;
            let v_p: Vec<PolyExpr> = v.iter().map(|c| c.substitute(comps)).collect::<std::result::Result<_, _>>()?;
            let dg = poly_jacobian(space.generators());
            dg.iter()
                .map(|row| {
                    row.iter().zip(&v_p).try_fold(PolyExpr::zero(n), |acc, (d, vi)| Ok::<_, PlaqueFormError>(&acc + &(&d.substitute(comps)? * vi)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = PolyExpr::zero(n);
    for (i, a) in omega.coeffs() {
        let minor: Vec<Vec<PolyExpr>> = i.as_slice().iter().map(|&r| sigs.iter().map(|s| s[r].clone()).collect()).collect();
        acc = &acc + &(&a.substitute(comps)? * &poly_det(&minor, n));
    }
    Ok(acc)
}

/// `(h^* omega)_F(eta) = omega_{h(F)}(dh eta)`, for a smooth `h` out of a space with
/// coordinate generators.
pub fn pullback_eps1(
    h: &SmoothMap,
    source: &DiffSpace,
    target: &DiffSpace,
    omega: &PointwiseForm,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<PointwiseForm> {
    let report = check_smooth_map(h, source, target, rng, samples)?;
    if let Some(f) = report.failures().next() {
        return Err(PlaqueFormError::NotSmooth(format!("{}: {}", f.id, f.detail)));
    }
    if source.generators() != DiffSpace::coordinate_generators(source.ambient_dim()).as_slice() {
        return Err(PlaqueFormError::Unsupported("source generators must be the coordinate functions".into()));
    }
    let comps = h.components().ok_or(PlaqueFormError::NotPolynomial)?;
    let gh = generators_along(target, comps)?;
    let n = source.ambient_dim();
    let w = pull(omega.coeffs(), omega.degree(), comps, &poly_jacobian(&gh), BoxDomain::whole(n))?;
    let terms = w.coeffs().iter().map(|(k, c)| (k.as_slice().to_vec(), c.clone()));
    PointwiseForm::new(n, n, omega.degree(), terms)
}

/// `Omega'(p) = Omega(h o p)`.
pub fn pullback_eps3(h: &SmoothMap, target: &DiffSpace, omega: &PlaqueIndexedForm) -> PlaqueIndexedForm {
    let (h, x, w) = (h.clone(), target.clone(), omega.clone());
    PlaqueIndexedForm::new(&format!("h^* {}", omega.label()), omega.degree(), move |p| {
        let hp = compose(&h, p)?;
        let d = x.is_plaque(&hp)?;
        if !d.accepted {
            return Err(PlaqueFormError::NotSmooth(d.reason.unwrap_or_default()));
        }
        w.eval(&hp)
    })
}

/// The restriction of a form's coefficients to the first `n` variables of a plaque box.
pub fn restrict_leading(w: &DifferentialForm, n: usize) -> Result<DifferentialForm> {
    let dom = leading_domain(w.domain(), n);
    let terms = w
        .coeffs()
        .iter()
        .filter(|(k, _)| k.as_slice().iter().all(|&i| i < n))
        .map(|(k, c)| {
            let mut c = c.clone();
            for v in n..w.dim() {
                c = c.specialize(v, &scalar::zero());
            }
            (k.as_slice().to_vec(), c.truncate_vars(n).expect("specialized"))
        });
    Ok(DifferentialForm::from_coeffs(dom, w.degree(), terms)?)
}
