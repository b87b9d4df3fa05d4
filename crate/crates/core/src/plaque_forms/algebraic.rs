//! Algebraic forms: alternating maps from vector fields to functions, linear over the
//! function algebra.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{PlaqueFormError, PointwiseForm, Result};
use crate::diffeology::{Coords, DiffSpace, SpaceVectorField};
use crate::expr::{compose, poly_det, PolyExpr, SmoothMap};
use crate::exterior::{ExteriorForm, MultiIndex};
use crate::scalar::{self, Rational};
use crate::spaces::make_axes_union;

/// How a field is written in the spanning family of an algebraic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decomposer {
    /// `xi = sum_i xi^i d/dx_i`.
    Coordinate,
    /// On the axes union, `xi = h_1 x d/dx + h_2 y d/dy` with `h_1(x) = a(x, 0) / x` and
    /// `h_2(y) = b(0, y) / y`, for `xi = (a, b)`.
    AxesDivision,
}

impl Decomposer {
    pub fn name(self) -> &'static str {
        match self {
            Decomposer::Coordinate => "coordinate",
            Decomposer::AxesDivision => "axes-division",
        }
    }

    fn family_size(self, ambient: usize) -> usize {
        match self {
            Decomposer::Coordinate => ambient,
            Decomposer::AxesDivision => 2,
        }
    }

    fn decompose(self, ambient: usize, xi: &[PolyExpr]) -> Result<Vec<PolyExpr>> {
        match self {
            Decomposer::Coordinate => Ok(xi.to_vec()),
            Decomposer::AxesDivision => {
                if ambient != 2 {
                    return Err(PlaqueFormError::DimensionMismatch { expected: 2, found: ambient });
                }
                let on_x = xi[0].specialize(1, &scalar::zero());
                let on_y = xi[1].specialize(0, &scalar::zero());
                let h1 = on_x.divide_by_var(0).ok_or_else(|| PlaqueFormError::NotDivisible(format!("{on_x} is not divisible by x0")))?;
                let h2 = on_y.divide_by_var(1).ok_or_else(|| PlaqueFormError::NotDivisible(format!("{on_y} is not divisible by x1")))?;
                Ok(vec![h1, h2])
            }
        }
    }
}

/// An algebraic k-form on fields of `R^N` or of a subset of it.
#[derive(Clone, Debug)]
pub enum AlgebraicForm {
    /// `(xi_i) -> (F -> omega_F(xi_1(F), ..))` for a pointwise form.
    FromPointwise { generators: Vec<PolyExpr>, omega: PointwiseForm },
    /// Values `h_I = omega(e_I)` on a spanning family, extended linearly.
    OnBasis { ambient: usize, degree: usize, values: BTreeMap<MultiIndex, PolyExpr>, decomposer: Decomposer },
    /// `(eta_i) -> omega(zeta_1, ..) o h` with `zeta_i(y) = dh(s(y)) eta_i(s(y))`.
    Pullback { h: SmoothMap, section: SmoothMap, target: Box<AlgebraicForm> },
}

fn polynomial_velocity(xi: &SpaceVectorField) -> Result<&[PolyExpr]> {
    xi.velocity.components().ok_or(PlaqueFormError::NotPolynomial)
}

impl AlgebraicForm {
    /// The form with `omega(d/dx_I) = h_I` on `R^N`.
    pub fn on_coordinate_basis<I>(ambient: usize, degree: usize, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, PolyExpr)>,
    {
        Self::on_family(ambient, degree, values, Decomposer::Coordinate)
    }

    pub fn on_family<I>(ambient: usize, degree: usize, values: I, decomposer: Decomposer) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, PolyExpr)>,
    {
        let size = decomposer.family_size(ambient);
        let mut out = BTreeMap::new();
        for (idx, h) in values {
            if h.num_vars() != ambient {
                return Err(PlaqueFormError::DimensionMismatch { expected: ambient, found: h.num_vars() });
            }
            let idx = MultiIndex::new(idx, size)?;
            if idx.len() != degree {
                return Err(PlaqueFormError::DimensionMismatch { expected: degree, found: idx.len() });
            }
            if !h.is_zero() {
                out.insert(idx, h);
            }
        }
        Ok(AlgebraicForm::OnBasis { ambient, degree, values: out, decomposer })
    }

    pub fn degree(&self) -> usize {
        match self {
            AlgebraicForm::FromPointwise { omega, .. } => omega.degree(),
            AlgebraicForm::OnBasis { degree, .. } => *degree,
            AlgebraicForm::Pullback { target, .. } => target.degree(),
        }
    }

    /// Dimension of the ambient space carrying the fields.
    pub fn ambient_dim(&self) -> usize {
        match self {
            AlgebraicForm::FromPointwise { omega, .. } => omega.ambient_dim(),
            AlgebraicForm::OnBasis { ambient, .. } => *ambient,
            AlgebraicForm::Pullback { h, .. } => h.in_dim(),
        }
    }

    /// `omega(xi_1, .., xi_k)` as a function of the ambient coordinates.
    pub fn evaluate(&self, fields: &[SpaceVectorField]) -> Result<PolyExpr> {
        let n = self.ambient_dim();
        if fields.len() != self.degree() {
            return Err(PlaqueFormError::DimensionMismatch { expected: self.degree(), found: fields.len() });
        }
        for xi in fields {
            if xi.velocity.in_dim() != n || xi.velocity.out_dim() != n {
                return Err(PlaqueFormError::DimensionMismatch { expected: n, found: xi.velocity.out_dim() });
            }
        }
        match self {
            AlgebraicForm::FromPointwise { generators, omega } => {
                let dg: Vec<Vec<PolyExpr>> = generators.iter().map(PolyExpr::gradient).collect();
                let sigs = fields
                    .iter()
                    .map(|xi| {
                        let v = polynomial_velocity(xi)?;
                        Ok(dg.iter().map(|row| row.iter().zip(v).fold(PolyExpr::zero(n), |acc, (d, vi)| &acc + &(d * vi))).collect())
                    })
                    .collect::<Result<Vec<Vec<PolyExpr>>>>()?;
                Ok(combine(omega.coeffs(), &sigs, n))
            }
            AlgebraicForm::OnBasis { ambient, values, decomposer, .. } => {
                let coeffs = fields
                    .iter()
                    .map(|xi| decomposer.decompose(*ambient, polynomial_velocity(xi)?))
                    .collect::<Result<Vec<_>>>()?;
                Ok(combine(values, &coeffs, n))
            }
            AlgebraicForm::Pullback { h, section, target } => {
                let hc = h.components().ok_or(PlaqueFormError::NotPolynomial)?;
                let sc = section.components().ok_or(PlaqueFormError::NotPolynomial)?;
                let m = target.ambient_dim();
                let dh: Vec<Vec<PolyExpr>> = hc.iter().map(PolyExpr::gradient).collect();
                let pushed = fields
                    .iter()
                    .map(|eta| {
                        let e = polynomial_velocity(eta)?;
                        let comps = dh
                            .iter()
                            .map(|row| {
                                row.iter().zip(e).try_fold(PolyExpr::zero(m), |acc, (d, ei)| {
                                    Ok::<_, PlaqueFormError>(&acc + &(&d.substitute(sc)? * &ei.substitute(sc)?))
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(SpaceVectorField::new(&format!("dh {}", eta.label), SmoothMap::polynomial_global(m, comps)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(target.evaluate(&pushed)?.substitute(hc)?)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AlgebraicForm::FromPointwise { omega, .. } => json!({"kind": "pointwise", "form": omega.to_json()}),
            AlgebraicForm::OnBasis { ambient, degree, values, decomposer } => json!({
                "kind": "family",
                "ambient": ambient,
                "degree": degree,
                "decomposer": decomposer.name(),
                "values": values.iter().map(|(k, h)| json!({"idx": k.as_slice(), "expr": h.to_string()})).collect::<Vec<_>>(),
                "extension": "function-linear",
            }),
            AlgebraicForm::Pullback { target, .. } => json!({"kind": "pullback", "target": target.to_json()}),
        }
    }
}

/// `sum_I h_I det(C[I, :])` for a family-coefficient matrix given by columns.
fn combine(values: &BTreeMap<MultiIndex, PolyExpr>, columns: &[Vec<PolyExpr>], n: usize) -> PolyExpr {
    let mut acc = PolyExpr::zero(n);
    for (i, h) in values {
        let minor: Vec<Vec<PolyExpr>> = i.as_slice().iter().map(|&r| columns.iter().map(|c| c[r].clone()).collect()).collect();
        acc = &acc + &(h * &poly_det(&minor, n));
    }
    acc
}

/// The algebraic form induced by a pointwise form on `space`.
pub fn pointwise_to_algebraic(space: &DiffSpace, omega: &PointwiseForm) -> Result<AlgebraicForm> {
    if omega.sig_dim() != space.generators().len() || omega.ambient_dim() != space.ambient_dim() {
        return Err(PlaqueFormError::DimensionMismatch { expected: space.generators().len(), found: omega.sig_dim() });
    }
    Ok(AlgebraicForm::FromPointwise { generators: space.generators().to_vec(), omega: omega.clone() })
}

/// `h^* omega` for a polynomial `h` with a polynomial section `s`, `h o s = id`.
pub fn pullback_eps2(h: &SmoothMap, omega: &AlgebraicForm, section: &SmoothMap) -> Result<AlgebraicForm> {
    if h.out_dim() != omega.ambient_dim() || section.in_dim() != h.out_dim() || section.out_dim() != h.in_dim() {
        return Err(PlaqueFormError::DimensionMismatch { expected: omega.ambient_dim(), found: h.out_dim() });
    }
    let hs = compose(h, section)?;
    let comps = hs.components().ok_or(PlaqueFormError::NotPolynomial)?;
    let m = h.out_dim();
    if let Some(i) = (0..m).find(|&i| comps[i] != PolyExpr::var(m, i)) {
        return Err(PlaqueFormError::SurjectivityNotWitnessed(format!("component {i} of h o s is {}", comps[i])));
    }
    Ok(AlgebraicForm::Pullback { h: h.clone(), section: section.clone(), target: Box::new(omega.clone()) })
}

/// Evidence that the axes-union form admits no pointwise preimage.
#[derive(Clone, Debug)]
pub struct E2Evidence {
    /// `omega(xi_1)` at the origin.
    pub value_at_origin: Rational,
    /// `omega(xi_1)` at `(1, 0)`.
    pub value_at_one: Rational,
    /// Signature of the witness of `xi_1` at the origin.
    pub witness_signature: Coords,
    /// Values of the basis covectors on that signature; every pointwise value is a
    /// combination of these.
    pub basis_values: Vec<Rational>,
    /// The value any pointwise form must take on `xi_1` at the origin.
    pub forced_pointwise_value: Rational,
}

impl E2Evidence {
    pub fn refutes_pointwise(&self) -> bool {
        self.forced_pointwise_value != self.value_at_origin
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value_at_origin": scalar::rational_to_json(&self.value_at_origin),
            "value_at_one": scalar::rational_to_json(&self.value_at_one),
            "witness_signature": self.witness_signature.to_json(),
            "forced_pointwise_value": scalar::rational_to_json(&self.forced_pointwise_value),
            "refutes_pointwise": self.refutes_pointwise(),
        })
    }
}

/// `omega(xi) = h_1(x)(x^2 + 1) + h_2(y)(2y^2 + 1)` on the axes union, with
/// `xi_1 = x d/dx` and `xi_2 = y d/dy`.
pub fn counterexample_e2() -> Result<(AlgebraicForm, E2Evidence)> {
    let x = PolyExpr::var(2, 0);
    let y = PolyExpr::var(2, 1);
    let one = PolyExpr::one(2);
    let values = vec![
        (vec![0], &x.pow(2) + &one),
        (vec![1], &y.pow(2).scale(&scalar::int(2)) + &one),
    ];
    let omega = AlgebraicForm::on_family(2, 1, values, Decomposer::AxesDivision)?;
    let xi1 = SpaceVectorField::parse("xi1", 2, &["x0", "0"])?;
    let value = omega.evaluate(std::slice::from_ref(&xi1))?;
    let value_at_origin = value.eval(&[scalar::zero(), scalar::zero()])?;
    let value_at_one = value.eval(&[scalar::one(), scalar::zero()])?;
    let space = make_axes_union();
    let witness = space.field_at(&xi1, &Coords::Exact(vec![scalar::zero(), scalar::zero()]))?;
    let sig = witness.signature.exact().ok_or(PlaqueFormError::NotPolynomial)?.to_vec();
    let basis_values = (0..space.generators().len())
        .map(|i| Ok(ExteriorForm::coordinate(sig.len(), i).evaluate(std::slice::from_ref(&sig))?))
        .collect::<Result<Vec<_>>>()?;
    let forced_pointwise_value = if basis_values.iter().all(|v| *v == scalar::zero()) {
        scalar::zero()
    } else {
        return Err(PlaqueFormError::Unsupported("witness signature is nonzero".into()));
    };
    let evidence = E2Evidence { value_at_origin, value_at_one, witness_signature: witness.signature, basis_values, forced_pointwise_value };
    Ok((omega, evidence))
}
