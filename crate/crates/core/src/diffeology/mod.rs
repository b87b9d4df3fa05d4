//! Diffeological spaces with the standard tangent structure defined by a finite
//! list of generator functions.
//!
//! A tangent class is represented by its jet signature: the first derivatives at 0
//! of the generators along a 1-plaque.

pub mod charted;
pub mod checks;
pub mod lines;
pub mod maps;
pub mod model;
pub mod parallels;
pub mod probe;
pub mod sampling;
pub mod values;

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::{compose, jet_at_zero, maps_agree, BoxDomain, ExprError, PolyExpr, SmoothMap};
use crate::scalar::Rational;

pub use model::{Attempt, Membership, SpaceModel};
pub use probe::{Certificate, JoinMode, ProbeOutcome, Transversality};
pub use values::{base_point, jacobian_at_zero, Coords, JetMatrix, Num};

/// Tolerance for comparisons that involve floating-point jets.
pub const APPROX_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum DiffError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a plaque: {0}")]
    NotAPlaque(String),
    #[error("point is not a member of the space: {0}")]
    NotMember(String),
    #[error("plaques have different base points")]
    BaseMismatch,
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("not realizable: {0}")]
    NotRealizable(String),
}

/// Decision of the plaque predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaqueDecision {
    pub accepted: bool,
    pub reason: Option<String>,
}

/// A tangent class at `base`, with the ambient velocity and the jet signature of its witness.
#[derive(Clone, Debug)]
pub struct TangentVector {
    pub base: Coords,
    pub velocity: Coords,
    pub signature: Coords,
    pub witness: SmoothMap,
}

impl TangentVector {
    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base.to_json(),
            "velocity": self.velocity.to_json(),
            "signature": self.signature.to_json(),
        })
    }
}

/// A vector field given by its ambient velocity `R^N -> R^N`; at each point the
/// value is realized by a witness 1-plaque.
#[derive(Clone, Debug)]
pub struct SpaceVectorField {
    pub label: String,
    pub velocity: SmoothMap,
}

impl SpaceVectorField {
    pub fn new(label: &str, velocity: SmoothMap) -> Self {
        SpaceVectorField { label: label.to_string(), velocity }
    }

    pub fn parse(label: &str, ambient: usize, components: &[&str]) -> Result<Self, ExprError> {
        Ok(Self::new(label, SmoothMap::parse(BoxDomain::whole(ambient), components)?))
    }

    pub fn velocity_at(&self, x: &Coords) -> Result<Coords, DiffError> {
        match x {
            Coords::Exact(v) if self.velocity.is_polynomial() => Ok(Coords::Exact(self.velocity.eval(v)?)),
            _ => Ok(Coords::Approx(self.velocity.eval_f64(&x.to_f64())?)),
        }
    }
}

/// Summary of the tangent space at a point built from sampled 1-plaques.
#[derive(Clone, Debug)]
pub struct TangentSpaceReport {
    pub base: Coords,
    pub branches: Vec<String>,
    /// Dimension of the linear span of all sampled signatures.
    pub dimension: usize,
    /// Ranks of the maximal families of mutually joinable tangent vectors.
    pub components: Vec<usize>,
    /// Whether every sum of two sampled tangent vectors is again a tangent vector.
    pub is_linear_subspace: bool,
    /// Rank of the vectors joinable with every other sampled vector.
    pub underline_dimension: usize,
    pub basis: Vec<Coords>,
    pub samples: usize,
}

impl TangentSpaceReport {
    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base.to_json(),
            "branches": self.branches,
            "dimension": self.dimension,
            "components": self.components,
            "is_linear_subspace": self.is_linear_subspace,
            "underline_dimension": self.underline_dimension,
            "basis": self.basis.iter().map(Coords::to_json).collect::<Vec<_>>(),
            "samples": self.samples,
        })
    }
}

/// A subset of `R^N` with a plaque predicate, generators of its function algebra and
/// fixture-specific plaque constructors.
#[derive(Clone)]
pub struct DiffSpace {
    name: String,
    ambient: usize,
    generators: Vec<PolyExpr>,
    model: Arc<dyn SpaceModel>,
    no_transverse: bool,
}

impl std::fmt::Debug for DiffSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiffSpace").field("name", &self.name).field("kind", &self.model.kind()).finish()
    }
}

impl DiffSpace {
    pub fn new(name: &str, ambient: usize, generators: Vec<PolyExpr>, model: Arc<dyn SpaceModel>, no_transverse: bool) -> Self {
        assert!(generators.iter().all(|g| g.num_vars() == ambient), "generators live on the ambient space");
        DiffSpace { name: name.to_string(), ambient, generators, model, no_transverse }
    }

    /// Coordinate functions `x_0, ..., x_{N-1}` as generators.
    pub fn coordinate_generators(n: usize) -> Vec<PolyExpr> {
        (0..n).map(|i| PolyExpr::var(n, i)).collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &'static str {
        self.model.kind()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[PolyExpr] {
        &self.generators
    }

    pub fn model(&self) -> &dyn SpaceModel {
        self.model.as_ref()
    }

    /// The fixture's attestation that it has no transverse points.
    pub fn attests_no_transverse_points(&self) -> bool {
        self.no_transverse
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "ambient": self.ambient,
            "kind": self.kind(),
            "generators": self.generators.iter().map(ToString::to_string).collect::<Vec<_>>(),
        })
    }

    fn tol(&self) -> f64 {
        APPROX_TOL.max(self.model.tolerance())
    }

    pub fn membership(&self, x: &Coords) -> Membership {
        if x.len() != self.ambient {
            return Membership { member: false, branches: vec![] };
        }
        self.model.classify(x)
    }

    fn require_member(&self, x: &Coords) -> Result<(), DiffError> {
        if self.membership(x).member {
            Ok(())
        } else {
            Err(DiffError::NotMember(format!("{}", x.to_json())))
        }
    }

    pub fn is_plaque(&self, m: &SmoothMap) -> Result<PlaqueDecision, DiffError> {
        if m.out_dim() != self.ambient {
            return Err(DiffError::DimensionMismatch { expected: self.ambient, found: m.out_dim() });
        }
        Ok(match self.model.plaque_decision(m) {
            Ok(()) => PlaqueDecision { accepted: true, reason: None },
            Err(r) => PlaqueDecision { accepted: false, reason: Some(r) },
        })
    }

    pub fn require_plaque(&self, m: &SmoothMap) -> Result<(), DiffError> {
        let d = self.is_plaque(m)?;
        if d.accepted {
            Ok(())
        } else {
            Err(DiffError::NotAPlaque(d.reason.unwrap_or_default()))
        }
    }

    /// `G x N` Jacobian of the generators at `x`.
    pub fn generator_jacobian(&self, x: &Coords) -> Result<JetMatrix, DiffError> {
        let grads: Vec<Vec<PolyExpr>> = self.generators.iter().map(PolyExpr::gradient).collect();
        Ok(match x {
            Coords::Exact(v) => JetMatrix::Exact(
                grads.iter().map(|row| row.iter().map(|g| g.eval(v)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?,
            ),
            Coords::Approx(v) => JetMatrix::Approx(
                grads
                    .iter()
                    .map(|row| row.iter().map(|g| g.eval_f64(v)).collect::<Result<_, _>>())
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    /// Signatures of the `n` coordinate directions of a plaque: `DG(p(0)) Dp(0)`.
    pub fn signature(&self, p: &SmoothMap) -> Result<JetMatrix, DiffError> {
        let f = base_point(p)?;
        Ok(values::mat_mul(&self.generator_jacobian(&f)?, &jacobian_at_zero(p)?))
    }

    /// Signature of an ambient velocity at `x`.
    pub fn signature_of_velocity(&self, x: &Coords, v: &Coords) -> Result<Coords, DiffError> {
        Ok(values::mat_vec(&self.generator_jacobian(x)?, v))
    }

    pub fn tangent_class(&self, p: &SmoothMap) -> Result<TangentVector, DiffError> {
        if p.in_dim() != 1 {
            return Err(DiffError::DimensionMismatch { expected: 1, found: p.in_dim() });
        }
        self.require_plaque(p)?;
        let base = base_point(p)?;
        self.require_member(&base)?;
        let velocity = jacobian_at_zero(p)?.column(0);
        let signature = self.signature_of_velocity(&base, &velocity)?;
        Ok(TangentVector { base, velocity, signature, witness: p.clone() })
    }

    fn generator_map(&self) -> SmoothMap {
        SmoothMap::polynomial_global(self.ambient, self.generators.clone()).expect("generators share the ambient")
    }

    /// Equality of the jets of `g o p1` and `g o p2` up to `order` for every generator `g`.
    pub fn equivalent(&self, p1: &SmoothMap, p2: &SmoothMap, order: u32) -> Result<bool, DiffError> {
        if p1.in_dim() != p2.in_dim() {
            return Err(DiffError::DimensionMismatch { expected: p1.in_dim(), found: p2.in_dim() });
        }
        let (b1, b2) = (base_point(p1)?, base_point(p2)?);
        if !b1.approx_eq(&b2, self.tol()) {
            return Err(DiffError::BaseMismatch);
        }
        let g = self.generator_map();
        let j1 = jet_at_zero(&compose(&g, p1)?, order)?;
        let j2 = jet_at_zero(&compose(&g, p2)?, order)?;
        Ok(j1.agrees_with(&j2, self.tol()))
    }

    /// A verified plaque at `base` whose first derivatives are `jet`.
    pub fn realize(&self, base: &Coords, jet: &JetMatrix) -> Result<SmoothMap, DiffError> {
        if jet.rows() != self.ambient {
            return Err(DiffError::DimensionMismatch { expected: self.ambient, found: jet.rows() });
        }
        match self.model.realize_jet(base, jet) {
            Attempt::Found { map, .. } => {
                self.require_plaque(&map)?;
                let ok = base_point(&map)?.approx_eq(base, self.tol())
                    && jacobian_at_zero(&map)?.approx_eq(jet, self.tol());
                if ok {
                    Ok(map)
                } else {
                    Err(DiffError::NotRealizable("constructed plaque has the wrong first-order data".into()))
                }
            }
            Attempt::Obstructed(r) => Err(DiffError::NotRealizable(r)),
        }
    }

    /// The tangent vector at `base` with ambient velocity `v`.
    pub fn realize_vector(&self, base: &Coords, v: &Coords) -> Result<TangentVector, DiffError> {
        let jet = JetMatrix::from_columns(std::slice::from_ref(v), self.ambient);
        let p = self.realize(base, &jet)?;
        self.tangent_class(&p)
    }

    pub fn add(&self, a: &TangentVector, b: &TangentVector) -> Result<TangentVector, DiffError> {
        if !a.base.approx_eq(&b.base, self.tol()) {
            return Err(DiffError::BaseMismatch);
        }
        self.realize_vector(&a.base, &a.velocity.add(&b.velocity))
    }

    pub fn scale(&self, a: &TangentVector, c: &Rational) -> Result<TangentVector, DiffError> {
        self.realize_vector(&a.base, &a.velocity.scale(c))
    }

    /// The value of a vector field at a member point.
    pub fn field_at(&self, xi: &SpaceVectorField, x: &Coords) -> Result<TangentVector, DiffError> {
        self.require_member(x)?;
        self.realize_vector(x, &xi.velocity_at(x)?)
    }

    pub fn sample_point(&self, rng: &mut ChaCha8Rng) -> Coords {
        self.model.sample_point(rng)
    }

    pub fn sample_plaque(&self, rng: &mut ChaCha8Rng, base: &Coords, dim: usize) -> SmoothMap {
        self.model.sample_plaque(rng, base, dim)
    }

    pub fn special_points(&self) -> Vec<Coords> {
        self.model.special_points()
    }

    pub fn tangent_space(&self, base: &Coords, rng: &mut ChaCha8Rng, budget: usize) -> Result<TangentSpaceReport, DiffError> {
        let m = self.membership(base);
        if !m.member {
            return Err(DiffError::NotMember(format!("{}", base.to_json())));
        }
        let mut vecs = Vec::new();
        for _ in 0..budget {
            let p = self.sample_plaque(rng, base, 1);
            let v = self.tangent_class(&p)?;
            if !v.velocity.is_zero(self.tol()) {
                vecs.push(v);
            }
        }
        let k = vecs.len();
        let joinable = |i: usize, j: usize| {
            let jet = JetMatrix::from_columns(&[vecs[i].velocity.clone(), vecs[j].velocity.clone()], self.ambient);
            self.realize(base, &jet).is_ok()
        };
        let table: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| i == j || joinable(i, j)).collect()).collect();
        let rank_of = |idx: &[usize]| {
            let cols: Vec<Coords> = idx.iter().map(|&i| vecs[i].signature.clone()).collect();
            JetMatrix::from_columns(&cols, self.generators.len()).rank(self.tol())
        };
        let all: Vec<usize> = (0..k).collect();
        let mut groups: Vec<Vec<usize>> = (0..k).map(|i| (0..k).filter(|&j| table[i][j]).collect()).collect();
        groups.sort();
        groups.dedup();
        let mut components: Vec<usize> = groups.iter().map(|g| rank_of(g)).collect();
        components.sort_unstable();
        let is_linear_subspace = (0..k)
            .all(|i| (i..k).all(|j| self.realize_vector(base, &vecs[i].velocity.add(&vecs[j].velocity)).is_ok()));
        let central: Vec<usize> = (0..k).filter(|&i| table[i].iter().all(|&b| b)).collect();
        let mut basis: Vec<usize> = Vec::new();
        for i in 0..k {
            let mut trial = basis.clone();
            trial.push(i);
            if rank_of(&trial) > basis.len() {
                basis = trial;
            }
        }
        Ok(TangentSpaceReport {
            base: base.clone(),
            branches: m.branches,
            dimension: rank_of(&all),
            components,
            is_linear_subspace,
            underline_dimension: rank_of(&central),
            basis: basis.iter().map(|&i| vecs[i].signature.clone()).collect(),
            samples: budget,
        })
    }

    fn slices(&self, q: &SmoothMap, p1: &SmoothMap, p2: &SmoothMap) -> Result<(SmoothMap, SmoothMap), DiffError> {
        let (n, m) = (p1.in_dim(), p2.in_dim());
        let a = compose(q, &maps::inclusion(p1.domain().clone(), n + m, 0))?;
        let b = compose(q, &maps::inclusion(p2.domain().clone(), n + m, n))?;
        Ok((a, b))
    }

    fn verify_join(&self, q: &SmoothMap, p1: &SmoothMap, p2: &SmoothMap, mode: JoinMode) -> Result<(), String> {
        match self.is_plaque(q) {
            Ok(d) if d.accepted => {}
            Ok(d) => return Err(format!("candidate is not a plaque: {}", d.reason.unwrap_or_default())),
            Err(e) => return Err(e.to_string()),
        }
        let (a, b) = self.slices(q, p1, p2).map_err(|e| e.to_string())?;
        let ok = match mode {
            JoinMode::Pointwise => maps_agree(&a, p1, self.tol()) && maps_agree(&b, p2, self.tol()),
            JoinMode::Classwise => {
                self.equivalent(&a, p1, 1).unwrap_or(false) && self.equivalent(&b, p2, 1).unwrap_or(false)
            }
        };
        if ok {
            Ok(())
        } else {
            Err("candidate does not restrict to the given plaques".into())
        }
    }

    fn join_once(&self, p1: &SmoothMap, p2: &SmoothMap, base: &Coords, mode: JoinMode) -> Result<SmoothMap, String> {
        match self.model.join(p1, p2, base, mode) {
            Attempt::Found { map, .. } => self.verify_join(&map, p1, p2, mode).map(|_| map),
            Attempt::Obstructed(r) => Err(r),
        }
    }

    /// Searches for an `(n+m)`-plaque extending `p1` and `p2` at their common base point.
    pub fn joint_plaque_probe(&self, p1: &SmoothMap, p2: &SmoothMap, mode: JoinMode) -> Result<ProbeOutcome, DiffError> {
        self.require_plaque(p1)?;
        self.require_plaque(p2)?;
        let (b1, b2) = (base_point(p1)?, base_point(p2)?);
        if !b1.approx_eq(&b2, self.tol()) {
            return Err(DiffError::BaseMismatch);
        }
        let degree = Some((p1.in_dim(), p2.in_dim()));
        let construction = |mode| match self.model.join(p1, p2, &b1, mode) {
            Attempt::Found { construction, .. } => construction,
            Attempt::Obstructed(r) => r,
        };
        match self.join_once(p1, p2, &b1, mode) {
            Ok(plaque) => Ok(ProbeOutcome::Found { plaque, construction: construction(mode) }),
            Err(obstruction) => {
                let transversality = match mode {
                    JoinMode::Classwise => Transversality::Strong,
                    JoinMode::Pointwise => match self.join_once(p1, p2, &b1, JoinMode::Classwise) {
                        Ok(_) => Transversality::Weak,
                        Err(_) => Transversality::Strong,
                    },
                };
                Ok(ProbeOutcome::NotFound(Certificate { obstruction, transversality: Some(transversality), degree }))
            }
        }
    }

    /// Searches for an `(n+2)`-plaque `q(r, t1, t2)` whose `t1`- and `t2`-slices match the
    /// two `(n+1)`-plaques classwise along `t = 0`.
    pub fn weaker_condition_probe(&self, p1: &SmoothMap, p2: &SmoothMap) -> Result<ProbeOutcome, DiffError> {
        if p1.in_dim() != p2.in_dim() || p1.in_dim() == 0 {
            return Err(DiffError::DomainMismatch("both plaques need the same positive dimension".into()));
        }
        self.require_plaque(p1)?;
        self.require_plaque(p2)?;
        let n = p1.in_dim() - 1;
        let p0 = maps::slice_at_zero(p1, n)?;
        if !maps_agree(&p0, &maps::slice_at_zero(p2, n)?, self.tol()) {
            return Err(DiffError::DomainMismatch("plaques differ at t = 0".into()));
        }
        let w1 = maps::partial_at_zero(p1, n, n)?;
        let w2 = maps::partial_at_zero(p2, n, n)?;
        let mut reasons = Vec::new();
        let attempts = [self.model.weaker_join(p1, p2), self.model.flow(&p0, &[w1.clone(), w2.clone()])];
        for attempt in attempts {
            match attempt {
                Attempt::Found { map, construction } => match self.verify_flow(&map, &p0, &[w1.clone(), w2.clone()]) {
                    Ok(()) => return Ok(ProbeOutcome::Found { plaque: map, construction }),
                    Err(r) => reasons.push(r),
                },
                Attempt::Obstructed(r) => reasons.push(r),
            }
        }
        Ok(ProbeOutcome::NotFound(Certificate { obstruction: reasons.join("; "), transversality: None, degree: None }))
    }

    /// `q` is a plaque, `q(r, 0) = p0(r)` and `d/dt_i q(r, 0) = w_i(r)`.
    fn verify_flow(&self, q: &SmoothMap, p0: &SmoothMap, ws: &[SmoothMap]) -> Result<(), String> {
        match self.is_plaque(q) {
            Ok(d) if d.accepted => {}
            Ok(d) => return Err(format!("candidate is not a plaque: {}", d.reason.unwrap_or_default())),
            Err(e) => return Err(e.to_string()),
        }
        let n = p0.in_dim();
        let s = maps::slice_at_zero(q, n).map_err(|e| e.to_string())?;
        if !maps_agree(&s, p0, self.tol()) {
            return Err("candidate does not start on the plaque".into());
        }
        for (i, w) in ws.iter().enumerate() {
            let d = maps::partial_at_zero(q, n, n + i).map_err(|e| e.to_string())?;
            if !maps_agree(&d, w, self.tol()) {
                return Err("candidate velocity differs from the field".into());
            }
        }
        Ok(())
    }

    /// Searches for `q(r, t)` with `q(r, 0) = p(r)` whose `t`-velocity realizes `xi` along `p`.
    pub fn locally_integrable_probe(&self, xi: &SpaceVectorField, p: &SmoothMap, r0: &[f64]) -> Result<ProbeOutcome, DiffError> {
        if !p.domain().contains_f64(r0) {
            return Err(DiffError::DomainMismatch("r0 is outside the plaque's box".into()));
        }
        self.flow_probe(p, std::slice::from_ref(xi))
    }

    /// Searches for `q(r, t_1, .., t_k)` with `q(r, 0) = p(r)` and `t_i`-velocity `xi_i(p(r))`.
    pub fn flow_probe(&self, p: &SmoothMap, fields: &[SpaceVectorField]) -> Result<ProbeOutcome, DiffError> {
        self.require_plaque(p)?;
        let ws = fields.iter().map(|xi| compose(&xi.velocity, p)).collect::<Result<Vec<_>, _>>()?;
        let certificate = |obstruction| ProbeOutcome::NotFound(Certificate { obstruction, transversality: None, degree: None });
        Ok(match self.model.flow(p, &ws) {
            Attempt::Found { map, construction } => match self.verify_flow(&map, p, &ws) {
                Ok(()) => ProbeOutcome::Found { plaque: map, construction },
                Err(r) => certificate(r),
            },
            Attempt::Obstructed(r) => certificate(r),
        })
    }

    /// For families `p1(r, s)`, `p2(r, s)` agreeing at `s = 0`, searches for `q(r, t)` with
    /// `q(r, 0) = p1(r, 0)` and `t`-velocity the sum of the two `s`-velocities.
    pub fn continuity_probe(&self, p1: &SmoothMap, p2: &SmoothMap) -> Result<ProbeOutcome, DiffError> {
        if p1.in_dim() != p2.in_dim() || p1.in_dim() == 0 {
            return Err(DiffError::DomainMismatch("both families need the same positive dimension".into()));
        }
        self.require_plaque(p1)?;
        self.require_plaque(p2)?;
        let n = p1.in_dim() - 1;
        let p0 = maps::slice_at_zero(p1, n)?;
        if !maps_agree(&p0, &maps::slice_at_zero(p2, n)?, self.tol()) {
            return Err(DiffError::DomainMismatch("families differ at s = 0".into()));
        }
        let w = maps::partial_at_zero(p1, n, n)?.add(&maps::partial_at_zero(p2, n, n)?)?;
        let certificate = |obstruction| ProbeOutcome::NotFound(Certificate { obstruction, transversality: None, degree: None });
        Ok(match self.model.flow(&p0, std::slice::from_ref(&w)) {
            Attempt::Found { map, construction } => match self.verify_flow(&map, &p0, &[w]) {
                Ok(()) => ProbeOutcome::Found { plaque: map, construction },
                Err(r) => certificate(r),
            },
            Attempt::Obstructed(r) => certificate(r),
        })
    }
}
