//! The plane whose plaques are the maps with image inside a single straight line.
//!
//! A polynomial map is decided exactly: the coefficient vectors of its non-constant
//! monomials span at most one direction. Black-box maps are decided by sampling.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{affine_f64, sample_grid, BoxDomain, Exponents, PolyExpr, SmoothMap};
use crate::linalg::{self, Matrix};
use crate::scalar::{self, Rational};

use super::maps::lift;
use super::model::{Attempt, Membership, SpaceModel};
use super::sampling::{random_rational, random_vector};
use super::values::{jacobian_at_zero, Coords, JetMatrix};
use super::JoinMode;

/// Relative tolerance of the sampled collinearity test.
pub const COLLINEAR_TOL: f64 = 1e-6;

pub struct Lines {
    ambient: usize,
}

/// How the image of a map sits relative to lines through its base point.
#[derive(Clone, Debug, PartialEq)]
pub enum LineShape {
    Point,
    Line(Vec<f64>),
    Spread,
}

impl Lines {
    pub fn new(ambient: usize) -> Self {
        Lines { ambient }
    }

    /// Coefficient vectors of the non-constant monomials, one column each.
    fn coefficient_columns(comps: &[PolyExpr]) -> Vec<Vec<Rational>> {
        let monos: BTreeSet<Exponents> = comps
            .iter()
            .flat_map(|c| c.terms().map(|(e, _)| e.clone()).collect::<Vec<_>>())
            .filter(|e| e.iter().any(|&k| k > 0))
            .collect();
        monos.iter().map(|e| comps.iter().map(|c| c.coefficient(e)).collect()).collect()
    }

    /// Exact shape for polynomial maps, sampled for black-box maps.
    pub fn shape(&self, m: &SmoothMap) -> LineShape {
        let (rank, dir) = match m.components() {
            Some(comps) => {
                let cols = Self::coefficient_columns(comps);
                if cols.is_empty() {
                    (0, None)
                } else {
                    let mat = linalg::from_columns(&cols);
                    let dir = cols.iter().find(|c| c.iter().any(|v| *v != scalar::zero()));
                    (linalg::rank(&mat, 0.0), dir.map(|d| scalar::to_f64_vec(d)))
                }
            }
            None => {
                let Ok(f) = m.eval_f64(&vec![0.0; m.in_dim()]) else { return LineShape::Spread };
                let mut cols = Vec::new();
                let per_axis = if m.in_dim() <= 2 { 5 } else { 3 };
                for x in sample_grid(m.domain(), per_axis) {
                    let Ok(y) = m.eval_f64(&x) else { return LineShape::Spread };
                    cols.push(y.iter().zip(&f).map(|(a, b)| a - b).collect::<Vec<f64>>());
                }
                let scale = cols.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
                if scale <= COLLINEAR_TOL {
                    (0, None)
                } else {
                    let mat: Matrix<f64> = linalg::from_columns(&cols);
                    let dir = cols.iter().max_by(|a, b| norm(a).total_cmp(&norm(b))).cloned();
                    (linalg::rank(&mat, COLLINEAR_TOL * scale), dir)
                }
            }
        };
        match (rank, dir) {
            (0, _) | (_, None) => LineShape::Point,
            (1, Some(d)) => LineShape::Line(d),
            _ => LineShape::Spread,
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn parallel(a: &[f64], b: &[f64]) -> bool {
    let m: Matrix<f64> = linalg::from_columns(&[a.to_vec(), b.to_vec()]);
    linalg::rank(&m, COLLINEAR_TOL * norm(a).max(norm(b)).max(1.0)) <= 1
}

fn fmt_dir(d: &[f64]) -> String {
    let parts: Vec<String> = d.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// `x -> F + J x` on `R^n`, exact when both ingredients are.
fn affine_plaque(base: &Coords, jet: &JetMatrix) -> SmoothMap {
    let n = jet.cols();
    match (base, jet) {
        (Coords::Exact(f), JetMatrix::Exact(j)) => {
            let comps = f
                .iter()
                .zip(j)
                .map(|(fi, row)| {
                    (0..n).fold(PolyExpr::constant(n, fi.clone()), |acc, k| &acc + &PolyExpr::var(n, k).scale(&row[k]))
                })
                .collect();
            SmoothMap::polynomial_global(n, comps).expect("consistent dims")
        }
        _ => affine_f64(BoxDomain::whole(n), base.to_f64(), jet.to_f64()),
    }
}

impl SpaceModel for Lines {
    fn kind(&self) -> &'static str {
        "lines"
    }

    fn tolerance(&self) -> f64 {
        COLLINEAR_TOL
    }

    fn classify(&self, x: &Coords) -> Membership {
        Membership { member: x.len() == self.ambient, branches: vec!["plane".into()] }
    }

    fn plaque_decision(&self, m: &SmoothMap) -> Result<(), String> {
        match self.shape(m) {
            LineShape::Spread => Err("image is not contained in a straight line".into()),
            _ => Ok(()),
        }
    }

    fn realize_jet(&self, base: &Coords, jet: &JetMatrix) -> Attempt {
        if jet.rank(COLLINEAR_TOL) <= 1 {
            Attempt::Found { map: affine_plaque(base, jet), construction: "straight line through the base point".into() }
        } else {
            Attempt::Obstructed(
                "line-direction obstruction: the first derivatives span two independent directions, but the image of a plaque lies in one line"
                    .into(),
            )
        }
    }

    fn join(&self, p1: &SmoothMap, p2: &SmoothMap, base: &Coords, mode: JoinMode) -> Attempt {
        match mode {
            JoinMode::Pointwise => {
                let (s1, s2) = (self.shape(p1), self.shape(p2));
                if let (LineShape::Line(d1), LineShape::Line(d2)) = (&s1, &s2) {
                    if !parallel(d1, d2) {
                        return Attempt::Obstructed(format!(
                            "line-direction obstruction: the plaques lie on lines through the base point with independent directions {} and {}; a joint plaque's image lies in one line",
                            fmt_dir(d1),
                            fmt_dir(d2)
                        ));
                    }
                }
                if matches!(s1, LineShape::Spread) || matches!(s2, LineShape::Spread) {
                    return Attempt::Obstructed("an input is not a plaque".into());
                }
                let dom = p1.domain().product(p2.domain());
                let built = (|| {
                    let sum = lift(p1, &dom, 0)?.add(&lift(p2, &dom, p1.in_dim())?)?;
                    match base {
                        Coords::Exact(f) => {
                            let neg: Vec<Rational> = f.iter().map(|v| -v.clone()).collect();
                            sum.translate(&neg)
                        }
                        Coords::Approx(f) => {
                            let c = super::maps::constant(dom.clone(), &Coords::Approx(f.clone()));
                            sum.sub(&c)
                        }
                    }
                })();
                match built {
                    Ok(map) => Attempt::Found { map, construction: "sum of collinear plaques".into() },
                    Err(e) => Attempt::Obstructed(e.to_string()),
                }
            }
            JoinMode::Classwise => {
                let (Ok(j1), Ok(j2)) = (jacobian_at_zero(p1), jacobian_at_zero(p2)) else {
                    return Attempt::Obstructed("plaques are not defined at the origin".into());
                };
                let j = j1.hcat(&j2);
                match self.realize_jet(base, &j) {
                    Attempt::Found { map, .. } => match map.with_domain(p1.domain().product(p2.domain())) {
                        Ok(map) => Attempt::Found { map, construction: "straight line through the base point".into() },
                        Err(e) => Attempt::Obstructed(e.to_string()),
                    },
                    Attempt::Obstructed(_) => Attempt::Obstructed(format!(
                        "line-direction obstruction: the plaque velocities {} and {} are independent; every plaque has rank-one first derivative",
                        fmt_dir(&j1.column(0).to_f64()),
                        fmt_dir(&j2.column(0).to_f64())
                    )),
                }
            }
        }
    }

    fn flow(&self, p0: &SmoothMap, velocities: &[SmoothMap]) -> Attempt {
        let n = p0.in_dim();
        let k = velocities.len();
        let dom = p0.domain().product(&BoxDomain::whole(k));
        let built = (|| {
            let mut q = lift(p0, &dom, 0)?;
            for (i, w) in velocities.iter().enumerate() {
                let t = super::maps::lift(&SmoothMap::identity(1), &dom, n + i)?;
                q = q.add(&scalar_times(&t, &lift(w, &dom, 0)?)?)?;
            }
            Ok::<_, crate::expr::ExprError>(q)
        })();
        match built {
            Ok(q) => match self.plaque_decision(&q) {
                Ok(()) => Attempt::Found { map: q, construction: "straight-line flow along the field".into() },
                Err(_) => Attempt::Obstructed(
                    "line-direction obstruction: the field leaves the line carrying the plaque, so the swept image is not in one line"
                        .into(),
                ),
            },
            Err(e) => Attempt::Obstructed(e.to_string()),
        }
    }

    fn weaker_join(&self, p1: &SmoothMap, p2: &SmoothMap) -> Attempt {
        let n = p1.in_dim() - 1;
        let dom = p1.domain().product(&BoxDomain::new(
            p2.domain().lo()[n..].to_vec(),
            p2.domain().hi()[n..].to_vec(),
        )
        .expect("valid box"));
        let built = (|| {
            let pick = |last: Option<usize>| {
                let comps = (0..n)
                    .map(|i| PolyExpr::var(n + 2, i))
                    .chain([last.map_or_else(|| PolyExpr::zero(n + 2), |l| PolyExpr::var(n + 2, l))])
                    .collect();
                SmoothMap::polynomial(dom.clone(), comps)
            };
            let a = crate::expr::compose(p1, &pick(Some(n))?)?;
            let b = crate::expr::compose(p2, &pick(Some(n + 1))?)?;
            let c = crate::expr::compose(p1, &pick(None)?)?;
            a.add(&b)?.sub(&c)
        })();
        match built {
            Ok(q) => match self.plaque_decision(&q) {
                Ok(()) => Attempt::Found { map: q, construction: "sum of collinear families".into() },
                Err(_) => Attempt::Obstructed(
                    "line-direction obstruction: the two families move in independent directions".into(),
                ),
            },
            Err(e) => Attempt::Obstructed(e.to_string()),
        }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Coords {
        Coords::Exact((0..self.ambient).map(|_| random_rational(rng, 3, 4)).collect())
    }

    fn sample_plaque(&self, rng: &mut ChaCha8Rng, base: &Coords, dim: usize) -> SmoothMap {
        let mut dir = random_vector(rng, self.ambient, 2);
        if dir.iter().all(|v| *v == scalar::zero()) {
            dir[0] = scalar::one();
        }
        let mut s = PolyExpr::zero(dim);
        for j in 0..dim {
            s = &s + &PolyExpr::var(dim, j).scale(&random_rational(rng, 2, 2));
            if rng.gen_bool(0.5) {
                s = &s + &PolyExpr::var(dim, j).pow(2).scale(&random_rational(rng, 1, 2));
            }
        }
        let f = base.exact().map(|f| f.to_vec()).unwrap_or_else(|| vec![scalar::zero(); self.ambient]);
        let comps = f.iter().zip(&dir).map(|(fi, di)| &PolyExpr::constant(dim, fi.clone()) + &s.scale(di)).collect();
        SmoothMap::polynomial_global(dim, comps).expect("consistent dims")
    }

    fn special_points(&self) -> Vec<Coords> {
        vec![]
    }
}

/// `x -> t(x) v(x)` for a scalar map `t`.
fn scalar_times(t: &SmoothMap, v: &SmoothMap) -> Result<SmoothMap, crate::expr::ExprError> {
    match (t.components(), v.components()) {
        (Some(tc), Some(vc)) => {
            SmoothMap::polynomial(v.domain().clone(), vc.iter().map(|c| &tc[0] * c).collect())
        }
        _ => {
            let (t, v) = (t.clone(), v.clone());
            let out = v.out_dim();
            let step = t.step().min(v.step());
            let dom = v.domain().clone();
            Ok(SmoothMap::black_box(dom, out, step, move |x| {
                let s = t.eval_f64(x).map(|y| y[0]).unwrap_or(f64::NAN);
                v.eval_f64(x).map(|y| y.iter().map(|c| s * c).collect()).unwrap_or_else(|_| vec![f64::NAN; out])
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_test() {
        let x = Lines::new(2);
        let diag = SmoothMap::parse(BoxDomain::whole(1), &["x0", "x0"]).unwrap();
        assert!(x.plaque_decision(&diag).is_ok());
        let par = SmoothMap::parse(BoxDomain::whole(1), &["x0", "x0^2"]).unwrap();
        assert!(x.plaque_decision(&par).is_err());
        let two = SmoothMap::parse(BoxDomain::whole(2), &["x0 + x1", "2*x0 + 2*x1"]).unwrap();
        assert!(x.plaque_decision(&two).is_ok());
    }

    #[test]
    fn black_box_rotated_line() {
        let x = Lines::new(2);
        let (c, s) = (1f64.cos(), 1f64.sin());
        let m = SmoothMap::black_box(BoxDomain::whole(1), 2, crate::expr::DEFAULT_STEP, move |t| {
            vec![c * (t[0] + t[0] * t[0]), s * (t[0] + t[0] * t[0])]
        });
        assert!(x.plaque_decision(&m).is_ok());
        let bent = SmoothMap::black_box(BoxDomain::whole(1), 2, crate::expr::DEFAULT_STEP, |t| vec![t[0], t[0].sin().powi(2)]);
        assert!(x.plaque_decision(&bent).is_err());
    }
}
