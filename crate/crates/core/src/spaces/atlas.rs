//! Finite atlases and the chart-wise and bundle-section descriptions of a form.
//!
//! A form on the manifold is given pointwise by an ambient [`DifferentialForm`] on
//! `R^N` restricted to tangent spaces. Charts may be polynomial (exact) or black-box.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diffeology::sampling::random_rational;
use crate::diffeology::{Coords, JetMatrix, Num};
use crate::expr::{compose, PolyExpr, SmoothMap};
use crate::exterior::{ExteriorForm, MultiIndex};
use crate::forms::{pullback_smooth, DifferentialForm};

use super::SpacesError;

/// Tolerance for black-box atlas comparisons.
pub const ATLAS_TOL: f64 = 1e-9;

type PointTest = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A chart `alpha: R^d -> M` with inverse `beta` defined on the part of `M` it covers.
#[derive(Clone)]
pub struct Chart {
    pub label: String,
    pub forward: SmoothMap,
    pub inverse: SmoothMap,
    covers: PointTest,
}

impl Chart {
    pub fn new(label: &str, forward: SmoothMap, inverse: SmoothMap, covers: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        assert_eq!(forward.out_dim(), inverse.in_dim());
        assert_eq!(forward.in_dim(), inverse.out_dim());
        Chart { label: label.to_string(), forward, inverse, covers: Arc::new(covers) }
    }

    /// A chart defined everywhere on the ambient space.
    pub fn global(label: &str, forward: SmoothMap, inverse: SmoothMap) -> Self {
        Self::new(label, forward, inverse, |_| true)
    }

    pub fn is_exact(&self) -> bool {
        self.forward.is_polynomial() && self.inverse.is_polynomial()
    }

    pub fn covers(&self, x: &Coords) -> bool {
        (self.covers)(&x.to_f64())
    }
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart").field("label", &self.label).finish()
    }
}

/// Image of a point, exact when possible.
pub fn apply(map: &SmoothMap, x: &Coords) -> Result<Coords, SpacesError> {
    Ok(match x {
        Coords::Exact(v) if map.is_polynomial() => Coords::Exact(map.eval(v)?),
        _ => Coords::Approx(map.eval_f64(&x.to_f64())?),
    })
}

/// Jacobian at a point, exact when possible.
pub fn jacobian(map: &SmoothMap, x: &Coords) -> Result<JetMatrix, SpacesError> {
    Ok(match x {
        Coords::Exact(v) if map.is_polynomial() => JetMatrix::Exact(map.jacobian(v)?),
        _ => JetMatrix::Approx(map.jacobian_f64(&x.to_f64())?),
    })
}

/// An exterior form at a point, exact or floating.
#[derive(Clone, Debug, PartialEq)]
pub enum FormValue {
    Exact(ExteriorForm),
    Approx(ExteriorForm<f64>),
}

impl FormValue {
    pub fn to_f64(&self) -> ExteriorForm<f64> {
        match self {
            FormValue::Exact(w) => w.to_f64(),
            FormValue::Approx(w) => w.clone(),
        }
    }

    pub fn pullback(&self, l: &JetMatrix) -> Result<FormValue, SpacesError> {
        Ok(match (self, l) {
            (FormValue::Exact(w), JetMatrix::Exact(m)) => FormValue::Exact(w.pullback_linear(m)?),
            _ => FormValue::Approx(self.to_f64().pullback_linear(&l.to_f64())?),
        })
    }

    /// Value on the columns of `vectors`.
    pub fn evaluate(&self, vectors: &JetMatrix) -> Result<Num, SpacesError> {
        let cols: Vec<Coords> = (0..vectors.cols()).map(|j| vectors.column(j)).collect();
        Ok(match (self, vectors) {
            (FormValue::Exact(w), JetMatrix::Exact(_)) => {
                let vs: Vec<Vec<_>> = cols.iter().map(|c| c.exact().expect("exact").to_vec()).collect();
                Num::Exact(w.evaluate(&vs)?)
            }
            _ => {
                let vs: Vec<Vec<f64>> = cols.iter().map(Coords::to_f64).collect();
                Num::Approx(self.to_f64().evaluate(&vs)?)
            }
        })
    }

    pub fn approx_eq(&self, other: &FormValue, tol: f64) -> bool {
        match (self, other) {
            (FormValue::Exact(a), FormValue::Exact(b)) => a == b,
            _ => self.to_f64().approx_eq(&other.to_f64(), tol),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            FormValue::Exact(w) => w.to_json(),
            FormValue::Approx(w) => serde_json::json!({
                "dim": w.dim(),
                "degree": w.degree(),
                "coeffs": w.coeffs().iter().map(|(i, c)| serde_json::json!({"idx": i.as_slice(), "value": c})).collect::<Vec<_>>(),
            }),
        }
    }
}

/// A pointwise form on the manifold, represented by an ambient form on `R^N`.
pub fn ambient_value(omega: &DifferentialForm, x: &Coords) -> Result<FormValue, SpacesError> {
    Ok(match x {
        Coords::Exact(v) => FormValue::Exact(omega.eval_at(v)?),
        Coords::Approx(v) => FormValue::Approx(omega.eval_at_f64(v)?),
    })
}

/// A manifold `M` of dimension `d` in `R^N` covered by finitely many charts.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub name: String,
    pub ambient: usize,
    pub dim: usize,
    pub charts: Vec<Chart>,
}

impl Atlas {
    pub fn new(name: &str, charts: Vec<Chart>) -> Self {
        let ambient = charts[0].forward.out_dim();
        let dim = charts[0].forward.in_dim();
        Atlas { name: name.to_string(), ambient, dim, charts }
    }

    pub fn is_exact(&self) -> bool {
        self.charts.iter().all(Chart::is_exact)
    }

    pub fn tolerance(&self) -> f64 {
        if self.is_exact() {
            0.0
        } else {
            ATLAS_TOL
        }
    }

    pub fn charts_at(&self, x: &Coords) -> Vec<usize> {
        (0..self.charts.len()).filter(|&i| self.charts[i].covers(x)).collect()
    }

    pub fn chart_coords(&self, i: usize, x: &Coords) -> Result<Coords, SpacesError> {
        apply(&self.charts[i].inverse, x)
    }

    /// Columns `d alpha_i / d u_j` at `x`, an `N x d` basis of `T_x M`.
    pub fn tangent_basis(&self, i: usize, x: &Coords) -> Result<JetMatrix, SpacesError> {
        let u = self.chart_coords(i, x)?;
        jacobian(&self.charts[i].forward, &u)
    }

    /// Jacobian of the transition `beta_i o alpha_j` at `beta_j(x)`.
    pub fn transition_jacobian(&self, i: usize, j: usize, x: &Coords) -> Result<JetMatrix, SpacesError> {
        let db = jacobian(&self.charts[i].inverse, x)?;
        let da = self.tangent_basis(j, x)?;
        Ok(crate::diffeology::values::mat_mul(&db, &da))
    }

    /// Transition map `beta_i o alpha_j` as a map between chart domains.
    pub fn transition(&self, i: usize, j: usize) -> Result<SmoothMap, SpacesError> {
        Ok(compose(&self.charts[i].inverse, &self.charts[j].forward)?)
    }

    /// A point of the chart image with chart coordinates in a small box.
    pub fn sample_point(&self, rng: &mut ChaCha8Rng) -> Result<Coords, SpacesError> {
        let i = rng.gen_range(0..self.charts.len());
        let u: Vec<_> = (0..self.dim).map(|_| random_rational(rng, 2, 4)).collect();
        apply(&self.charts[i].forward, &Coords::Exact(u))
    }

    /// A point covered by at least two charts.
    pub fn sample_overlap_point(&self, rng: &mut ChaCha8Rng) -> Result<Coords, SpacesError> {
        loop {
            let x = self.sample_point(rng)?;
            if self.charts_at(&x).len() >= 2 {
                return Ok(x);
            }
        }
    }

    /// `beta_i o alpha_i = id`, formally for polynomial charts and on samples otherwise.
    pub fn check_inverse(&self, i: usize, rng: &mut ChaCha8Rng, samples: usize) -> Result<bool, SpacesError> {
        let c = &self.charts[i];
        let round = compose(&c.inverse, &c.forward)?;
        if let Some(comps) = round.components() {
            return Ok((0..self.dim).all(|k| comps[k] == PolyExpr::var(self.dim, k)));
        }
        for _ in 0..samples {
            let u: Vec<f64> = (0..self.dim).map(|_| crate::scalar::Scalar::to_f64(&random_rational(rng, 2, 4))).collect();
            let v = round.eval_f64(&u)?;
            if u.iter().zip(&v).any(|(a, b)| (a - b).abs() > ATLAS_TOL) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `t_ij o t_jk = t_ik` at a point covered by all three charts.
    pub fn check_cocycle(&self, i: usize, j: usize, k: usize, x: &Coords) -> Result<bool, SpacesError> {
        let uk = self.chart_coords(k, x)?;
        let via = apply(&self.transition(i, j)?, &apply(&self.transition(j, k)?, &uk)?)?;
        let direct = apply(&self.transition(i, k)?, &uk)?;
        Ok(via.approx_eq(&direct, ATLAS_TOL))
    }
}

/// Local form data on one chart.
#[derive(Clone)]
pub enum LocalForm {
    Exact(DifferentialForm),
    Numeric(Arc<dyn Fn(&[f64]) -> ExteriorForm<f64> + Send + Sync>),
}

impl LocalForm {
    fn value(&self, u: &Coords) -> Result<FormValue, SpacesError> {
        Ok(match (self, u) {
            (LocalForm::Exact(w), Coords::Exact(v)) => FormValue::Exact(w.eval_at(v)?),
            (LocalForm::Exact(w), Coords::Approx(v)) => FormValue::Approx(w.eval_at_f64(v)?),
            (LocalForm::Numeric(f), u) => FormValue::Approx(f(&u.to_f64())),
        })
    }
}

impl std::fmt::Debug for LocalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LocalForm::Exact(w) => write!(f, "LocalForm::Exact({w})"),
            LocalForm::Numeric(_) => write!(f, "LocalForm::Numeric"),
        }
    }
}

/// One local form `omega_i` on each chart domain.
#[derive(Clone, Debug)]
pub struct ChartFormCollection {
    pub forms: Vec<LocalForm>,
}

/// Fiber coordinates `x -> (xi_I(x))` of a form on each chart's trivialization.
#[derive(Clone, Debug)]
pub struct BundleSection {
    pub coefficients: Vec<LocalCoefficients>,
}

#[derive(Clone)]
pub enum LocalCoefficients {
    Exact(BTreeMap<MultiIndex, PolyExpr>),
    Numeric(Arc<dyn Fn(&[f64]) -> ExteriorForm<f64> + Send + Sync>),
}

impl std::fmt::Debug for LocalCoefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LocalCoefficients::Exact(c) => write!(f, "LocalCoefficients::Exact({} terms)", c.len()),
            LocalCoefficients::Numeric(_) => write!(f, "LocalCoefficients::Numeric"),
        }
    }
}

/// Where a recovered pointwise form takes its local values from.
#[derive(Clone, Debug)]
pub enum LocalFamily {
    Charts(ChartFormCollection),
    Section(BundleSection),
}

impl LocalFamily {
    /// The local form of chart `i` at the point `x` of `M`, in chart coordinates.
    pub fn local_value(&self, atlas: &Atlas, i: usize, x: &Coords, degree: usize) -> Result<FormValue, SpacesError> {
        match self {
            LocalFamily::Charts(c) => c.forms[i].value(&atlas.chart_coords(i, x)?),
            LocalFamily::Section(s) => Ok(match (&s.coefficients[i], x) {
                (LocalCoefficients::Exact(c), Coords::Exact(v)) => FormValue::Exact(ExteriorForm::from_coeffs(
                    atlas.dim,
                    degree,
                    c.iter().map(|(k, p)| p.eval(v).map(|val| (k.as_slice().to_vec(), val))).collect::<Result<Vec<_>, _>>()?,
                )?),
                (LocalCoefficients::Exact(c), Coords::Approx(v)) => FormValue::Approx(ExteriorForm::from_coeffs(
                    atlas.dim,
                    degree,
                    c.iter().map(|(k, p)| p.eval_f64(v).map(|val| (k.as_slice().to_vec(), val))).collect::<Result<Vec<_>, _>>()?,
                )?),
                (LocalCoefficients::Numeric(f), x) => FormValue::Approx(f(&x.to_f64())),
            }),
        }
    }

    /// First point where two charts disagree through the transition Jacobian.
    pub fn compatibility_witness(
        &self,
        atlas: &Atlas,
        degree: usize,
        rng: &mut ChaCha8Rng,
        samples: usize,
    ) -> Result<Option<IncompatibilityWitness>, SpacesError> {
        for _ in 0..samples {
            let x = atlas.sample_overlap_point(rng)?;
            let charts = atlas.charts_at(&x);
            for &i in &charts {
                for &j in &charts {
                    if i >= j {
                        continue;
                    }
                    let wi = self.local_value(atlas, i, &x, degree)?;
                    let wj = self.local_value(atlas, j, &x, degree)?;
                    let pulled = wi.pullback(&atlas.transition_jacobian(i, j, &x)?)?;
                    if !pulled.approx_eq(&wj, atlas.tolerance()) {
                        return Ok(Some(IncompatibilityWitness { point: x, charts: (i, j), expected: pulled, found: wj }));
                    }
                }
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug)]
pub struct IncompatibilityWitness {
    pub point: Coords,
    pub charts: (usize, usize),
    pub expected: FormValue,
    pub found: FormValue,
}

impl IncompatibilityWitness {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "point": self.point.to_json(),
            "charts": [self.charts.0, self.charts.1],
            "expected": self.expected.to_json(),
            "found": self.found.to_json(),
        })
    }
}

/// `omega_i = alpha_i^* omega` on every chart.
pub fn chart_collection_from_pointwise(atlas: &Atlas, omega: &DifferentialForm) -> Result<ChartFormCollection, SpacesError> {
    if omega.dim() != atlas.ambient {
        return Err(SpacesError::DimensionMismatch { expected: atlas.ambient, found: omega.dim() });
    }
    let forms = atlas
        .charts
        .iter()
        .map(|c| {
            if c.forward.is_polynomial() {
                Ok(LocalForm::Exact(pullback_smooth(&c.forward, omega)?))
            } else {
                let (alpha, w) = (c.forward.clone(), omega.clone());
                Ok(LocalForm::Numeric(Arc::new(move |u: &[f64]| {
                    let x = alpha.eval_f64(u).unwrap_or_else(|_| vec![f64::NAN; alpha.out_dim()]);
                    let da = alpha.jacobian_f64(u).unwrap_or_default();
                    w.eval_at_f64(&x)
                        .ok()
                        .and_then(|v| v.pullback_linear(&da).ok())
                        .unwrap_or_else(|| ExteriorForm::zero(u.len(), w.degree()))
                })))
            }
        })
        .collect::<Result<_, SpacesError>>()?;
    Ok(ChartFormCollection { forms })
}

/// Fiber coordinates `xi_I(x) = (alpha_i^* omega)_I(beta_i(x))` on every chart.
pub fn section_from_pointwise(atlas: &Atlas, omega: &DifferentialForm) -> Result<BundleSection, SpacesError> {
    let collection = chart_collection_from_pointwise(atlas, omega)?;
    let coefficients = atlas
        .charts
        .iter()
        .zip(collection.forms)
        .map(|(c, local)| match (local, c.inverse.components()) {
            (LocalForm::Exact(w), Some(beta)) => Ok(LocalCoefficients::Exact(
                w.coeffs().iter().map(|(k, p)| Ok((k.clone(), p.substitute(beta)?))).collect::<Result<_, SpacesError>>()?,
            )),
            (local, _) => {
                let beta = c.inverse.clone();
                let local = local.clone();
                Ok(LocalCoefficients::Numeric(Arc::new(move |x: &[f64]| {
                    let u = beta.eval_f64(x).unwrap_or_else(|_| vec![f64::NAN; beta.out_dim()]);
                    local.value(&Coords::Approx(u)).map(|v| v.to_f64()).unwrap_or_else(|_| ExteriorForm::zero(beta.out_dim(), 0))
                })))
            }
        })
        .collect::<Result<_, SpacesError>>()?;
    Ok(BundleSection { coefficients })
}

/// A pointwise form reassembled from local data: `omega_x = (beta_i)^* omega_i`.
#[derive(Clone, Debug)]
pub struct RecoveredForm {
    pub atlas: Atlas,
    pub family: LocalFamily,
    pub degree: usize,
}

impl RecoveredForm {
    /// The value at `x` as a form on `R^N`, meaningful on tangent vectors.
    pub fn value_at(&self, x: &Coords) -> Result<FormValue, SpacesError> {
        let i = *self.atlas.charts_at(x).first().ok_or_else(|| SpacesError::NotCovered(format!("{}", x.to_json())))?;
        self.value_via(i, x)
    }

    pub fn value_via(&self, i: usize, x: &Coords) -> Result<FormValue, SpacesError> {
        let local = self.family.local_value(&self.atlas, i, x, self.degree)?;
        local.pullback(&jacobian(&self.atlas.charts[i].inverse, x)?)
    }

    /// Restriction to `T_x M` in the basis of chart `basis_chart`.
    pub fn restricted(&self, x: &Coords, basis_chart: usize) -> Result<FormValue, SpacesError> {
        self.value_at(x)?.pullback(&self.atlas.tangent_basis(basis_chart, x)?)
    }
}

fn recover(atlas: &Atlas, family: LocalFamily, degree: usize, rng: &mut ChaCha8Rng, samples: usize) -> Result<RecoveredForm, SpacesError> {
    if let Some(w) = family.compatibility_witness(atlas, degree, rng, samples)? {
        return Err(SpacesError::Incompatible(Box::new(w)));
    }
    Ok(RecoveredForm { atlas: atlas.clone(), family, degree })
}

/// Reassembles a pointwise form after checking chart independence on sampled overlaps.
pub fn pointwise_from_chart_collection(
    atlas: &Atlas,
    c: &ChartFormCollection,
    degree: usize,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<RecoveredForm, SpacesError> {
    recover(atlas, LocalFamily::Charts(c.clone()), degree, rng, samples)
}

pub fn pointwise_from_section(
    atlas: &Atlas,
    s: &BundleSection,
    degree: usize,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<RecoveredForm, SpacesError> {
    recover(atlas, LocalFamily::Section(s.clone()), degree, rng, samples)
}

/// Restriction of an ambient form to `T_x M` in the basis of chart `i`.
pub fn restricted_ambient(atlas: &Atlas, omega: &DifferentialForm, x: &Coords, i: usize) -> Result<FormValue, SpacesError> {
    ambient_value(omega, x)?.pullback(&atlas.tangent_basis(i, x)?)
}

/// Whether the recovered form agrees with `omega` on tangent spaces at `x`, in every chart basis.
pub fn agrees_on_tangent_spaces(r: &RecoveredForm, omega: &DifferentialForm, x: &Coords) -> Result<bool, SpacesError> {
    for i in r.atlas.charts_at(x) {
        for j in r.atlas.charts_at(x) {
            let lhs = r.value_via(j, x)?.pullback(&r.atlas.tangent_basis(i, x)?)?;
            let rhs = restricted_ambient(&r.atlas, omega, x, i)?;
            if !lhs.approx_eq(&rhs, r.atlas.tolerance()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
