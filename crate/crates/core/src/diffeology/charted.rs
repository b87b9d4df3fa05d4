//! Unions of polynomially parameterized sheets `alpha: R^d -> R^N` with polynomial
//! left inverses `beta`. A plaque is a polynomial map whose image lies in one sheet.
//!
//! A single sheet with `alpha = beta = id` is `R^N` with its standard structure;
//! the axes of the plane and the two tangent surfaces are two-sheet unions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{compose, BoxDomain, PolyExpr, SmoothMap};
use crate::linalg;
use crate::scalar::Rational;

use super::maps::{inclusion, lift};
use super::model::{Attempt, Membership, SpaceModel};
use super::sampling::{random_matrix, random_rational};
use super::values::{jacobian_at_zero, Coords, JetMatrix};
use super::JoinMode;

/// A sheet `alpha(R^d)` with a polynomial inverse `beta` on its image.
#[derive(Clone, Debug)]
pub struct Sheet {
    pub label: String,
    pub chart: SmoothMap,
    pub inverse: SmoothMap,
}

impl Sheet {
    pub fn new(label: &str, chart: SmoothMap, inverse: SmoothMap) -> Self {
        assert!(chart.is_polynomial() && inverse.is_polynomial(), "sheets are polynomial");
        assert_eq!(chart.out_dim(), inverse.in_dim());
        assert_eq!(chart.in_dim(), inverse.out_dim());
        Sheet { label: label.to_string(), chart, inverse }
    }

    pub fn dim(&self) -> usize {
        self.chart.in_dim()
    }

    fn contains_point(&self, x: &[Rational]) -> bool {
        match self.inverse.eval(x).and_then(|u| self.chart.eval(&u)) {
            Ok(y) => y == x,
            Err(_) => false,
        }
    }

    fn contains_map(&self, p: &SmoothMap) -> bool {
        let Some(pc) = p.components() else { return false };
        match compose(&self.inverse, p).and_then(|u| compose(&self.chart, &u)) {
            Ok(q) => q.components() == Some(pc),
            Err(_) => false,
        }
    }

    fn inverse_jacobian(&self, x: &[Rational]) -> Option<linalg::Matrix<Rational>> {
        self.inverse.jacobian(x).ok()
    }
}

pub struct Charted {
    kind: &'static str,
    ambient: usize,
    sheets: Vec<Sheet>,
    specials: Vec<Coords>,
}

impl Charted {
    pub fn new(kind: &'static str, ambient: usize, sheets: Vec<Sheet>, specials: Vec<Coords>) -> Self {
        Charted { kind, ambient, sheets, specials }
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    fn sheets_at<'a>(&'a self, x: &'a [Rational]) -> impl Iterator<Item = &'a Sheet> + 'a {
        self.sheets.iter().filter(move |s| s.contains_point(x))
    }

    fn labels_of_map(&self, p: &SmoothMap) -> Vec<String> {
        self.sheets.iter().filter(|s| s.contains_map(p)).map(|s| s.label.clone()).collect()
    }

    /// `alpha(beta(F) + Dbeta(F) J x)` when the columns of `J` are tangent to the sheet at `F`.
    fn linear_plaque(&self, sheet: &Sheet, f: &[Rational], j: &linalg::Matrix<Rational>) -> Option<SmoothMap> {
        let n = linalg::shape(j).1;
        let db = sheet.inverse_jacobian(f)?;
        let a = linalg::mul(&db, j);
        let u0 = sheet.inverse.eval(f).ok()?;
        let da = sheet.chart.jacobian(&u0).ok()?;
        if linalg::mul(&da, &a) != *j {
            return None;
        }
        let a = if n == 0 { vec![vec![]; sheet.dim()] } else { a };
        let inner = affine_on(BoxDomain::whole(n), &a, &u0);
        compose(&sheet.chart, &inner).ok()
    }
}

/// `x -> a x + b` on `domain`.
fn affine_on(domain: BoxDomain, a: &linalg::Matrix<Rational>, b: &[Rational]) -> SmoothMap {
    let n = domain.dim();
    let comps = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            (0..n).fold(PolyExpr::constant(n, bi.clone()), |acc, j| &acc + &PolyExpr::var(n, j).scale(&row[j]))
        })
        .collect();
    SmoothMap::polynomial(domain, comps).expect("consistent dims")
}

fn exact_only() -> Attempt {
    Attempt::Obstructed("charted unions work with exact polynomial data only".into())
}

impl SpaceModel for Charted {
    fn kind(&self) -> &'static str {
        self.kind
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    fn classify(&self, x: &Coords) -> Membership {
        let branches: Vec<String> = match x.exact() {
            Some(x) if x.len() == self.ambient => self.sheets_at(x).map(|s| s.label.clone()).collect(),
            _ => vec![],
        };
        Membership { member: !branches.is_empty(), branches }
    }

    fn plaque_decision(&self, m: &SmoothMap) -> Result<(), String> {
        if !m.is_polynomial() {
            return Err("only polynomial maps are decided on this space".into());
        }
        if self.sheets.iter().any(|s| s.contains_map(m)) {
            Ok(())
        } else {
            let names: Vec<&str> = self.sheets.iter().map(|s| s.label.as_str()).collect();
            Err(format!("image is not contained in a single sheet ({})", names.join(", ")))
        }
    }

    fn realize_jet(&self, base: &Coords, jet: &JetMatrix) -> Attempt {
        let (Some(f), Some(j)) = (base.exact(), jet.exact()) else { return exact_only() };
        for sheet in self.sheets_at(f) {
            if let Some(map) = self.linear_plaque(sheet, f, j) {
                return Attempt::Found { map, construction: format!("linear chart plaque in {}", sheet.label) };
            }
        }
        Attempt::Obstructed("first-order data is not tangent to any single sheet through the base point".into())
    }

    fn join(&self, p1: &SmoothMap, p2: &SmoothMap, base: &Coords, mode: JoinMode) -> Attempt {
        let Some(f) = base.exact() else { return exact_only() };
        match mode {
            JoinMode::Pointwise => {
                let dom = p1.domain().product(p2.domain());
                for sheet in self.sheets.iter().filter(|s| s.contains_map(p1) && s.contains_map(p2)) {
                    let Ok(bf) = sheet.inverse.eval(f) else { continue };
                    let built = (|| {
                        let a = compose(&sheet.inverse, &lift(p1, &dom, 0)?)?;
                        let b = compose(&sheet.inverse, &lift(p2, &dom, p1.in_dim())?)?;
                        let neg: Vec<Rational> = bf.iter().map(|v| -v.clone()).collect();
                        compose(&sheet.chart, &a.add(&b)?.translate(&neg)?)
                    })();
                    if let Ok(map) = built {
                        return Attempt::Found {
                            map,
                            construction: format!("additive chart construction in {}", sheet.label),
                        };
                    }
                }
                let (l1, l2) = (self.labels_of_map(p1), self.labels_of_map(p2));
                Attempt::Obstructed(format!(
                    "no sheet contains both plaques: first lies in [{}], second in [{}]; a joint plaque lies in one sheet",
                    l1.join(", "),
                    l2.join(", ")
                ))
            }
            JoinMode::Classwise => {
                let (Ok(j1), Ok(j2)) = (jacobian_at_zero(p1), jacobian_at_zero(p2)) else {
                    return Attempt::Obstructed("plaques are not defined at the origin".into());
                };
                let j = j1.hcat(&j2);
                match self.realize_jet(base, &j) {
                    Attempt::Found { map, construction } => {
                        let dom = p1.domain().product(p2.domain());
                        match map.with_domain(dom) {
                            Ok(map) => Attempt::Found { map, construction },
                            Err(e) => Attempt::Obstructed(e.to_string()),
                        }
                    }
                    Attempt::Obstructed(_) => Attempt::Obstructed(
                        "the combined first derivatives are not tangent to a single sheet; a joint plaque has all its derivatives in one sheet"
                            .into(),
                    ),
                }
            }
        }
    }

    fn flow(&self, p0: &SmoothMap, velocities: &[SmoothMap]) -> Attempt {
        let Some(p0c) = p0.components() else { return exact_only() };
        if velocities.iter().any(|v| !v.is_polynomial()) {
            return exact_only();
        }
        let n = p0.in_dim();
        let k = velocities.len();
        let total = n + k;
        let mut reasons = Vec::new();
        for sheet in self.sheets.iter().filter(|s| s.contains_map(p0)) {
            let built = (|| {
                let base = compose(&sheet.inverse, p0)?;
                let db = sheet.inverse.jacobian_poly().expect("polynomial sheet");
                let db_p: Vec<Vec<PolyExpr>> = db
                    .iter()
                    .map(|row| row.iter().map(|e| e.substitute(p0c)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<_, _>>()?;
                let inner: Vec<PolyExpr> = (0..sheet.dim())
                    .map(|a| {
                        let mut acc = base.components().expect("polynomial")[a].extend_vars(total);
                        for (i, v) in velocities.iter().enumerate() {
                            let vc = v.components().expect("polynomial");
                            let dot = db_p[a].iter().zip(vc).fold(PolyExpr::zero(n), |s, (d, w)| &s + &(d * w));
                            acc = &acc + &(&dot.extend_vars(total) * &PolyExpr::var(total, n + i));
                        }
                        acc
                    })
                    .collect();
                let dom = p0.domain().product(&BoxDomain::whole(k));
                compose(&sheet.chart, &SmoothMap::polynomial(dom, inner)?)
            })();
            match built {
                Ok(map) => {
                    // the chart pushes the flow back to the requested velocities only if they are tangent
                    let ok = velocities.iter().enumerate().all(|(i, v)| {
                        super::maps::partial_at_zero(&map, n, n + i)
                            .map(|d| d.components() == v.components())
                            .unwrap_or(false)
                    });
                    if ok {
                        return Attempt::Found { map, construction: format!("chart flow in {}", sheet.label) };
                    }
                    reasons.push(format!("velocities are not tangent to {} along the plaque", sheet.label));
                }
                Err(e) => reasons.push(e.to_string()),
            }
        }
        if reasons.is_empty() {
            reasons.push("the base plaque lies in no sheet".into());
        }
        Attempt::Obstructed(reasons.join("; "))
    }

    fn weaker_join(&self, p1: &SmoothMap, p2: &SmoothMap) -> Attempt {
        let n = p1.in_dim() - 1;
        let dom = p1.domain().product(&super::maps::leading_domain(
            &BoxDomain::new(p2.domain().lo()[n..].to_vec(), p2.domain().hi()[n..].to_vec()).expect("valid box"),
            1,
        ));
        // (r, t1, t2) -> (r, t2)
        let pick_r_t2 = {
            let comps = (0..n).map(|i| PolyExpr::var(n + 2, i)).chain([PolyExpr::var(n + 2, n + 1)]).collect();
            SmoothMap::polynomial(dom.clone(), comps).expect("consistent dims")
        };
        // (r, t1, t2) -> (r, 0)
        let pick_r_0 = {
            let comps = (0..n).map(|i| PolyExpr::var(n + 2, i)).chain([PolyExpr::zero(n + 2)]).collect();
            SmoothMap::polynomial(dom.clone(), comps).expect("consistent dims")
        };
        for sheet in self.sheets.iter().filter(|s| s.contains_map(p1) && s.contains_map(p2)) {
            let built = (|| {
                let a = compose(&sheet.inverse, &lift(p1, &dom, 0)?)?;
                let b = compose(&sheet.inverse, &compose(p2, &pick_r_t2)?)?;
                let c = compose(&sheet.inverse, &compose(p1, &pick_r_0)?)?;
                compose(&sheet.chart, &a.add(&b)?.sub(&c)?)
            })();
            if let Ok(map) = built {
                return Attempt::Found { map, construction: format!("additive chart construction in {}", sheet.label) };
            }
        }
        Attempt::Obstructed("no sheet contains both plaques".into())
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Coords {
        let sheet = &self.sheets[rng.gen_range(0..self.sheets.len())];
        let u: Vec<Rational> = (0..sheet.dim()).map(|_| random_rational(rng, 2, 4)).collect();
        Coords::Exact(sheet.chart.eval(&u).expect("global chart"))
    }

    fn sample_plaque(&self, rng: &mut ChaCha8Rng, base: &Coords, dim: usize) -> SmoothMap {
        let f = base.exact().expect("charted points are exact");
        let candidates: Vec<&Sheet> = self.sheets_at(f).collect();
        let sheet = candidates[rng.gen_range(0..candidates.len())];
        let d = sheet.dim();
        let u0 = sheet.inverse.eval(f).expect("global inverse");
        let l = random_matrix(rng, d, dim, 2);
        let mut comps = Vec::with_capacity(d);
        for a in 0..d {
            let mut c = PolyExpr::constant(dim, u0[a].clone());
            for j in 0..dim {
                c = &c + &PolyExpr::var(dim, j).scale(&l[a][j]);
                if rng.gen_bool(0.5) {
                    let q = random_rational(rng, 2, 2);
                    let k = rng.gen_range(0..dim);
                    c = &c + &(&PolyExpr::var(dim, j) * &PolyExpr::var(dim, k)).scale(&q);
                }
            }
            comps.push(c);
        }
        let inner = SmoothMap::polynomial_global(dim, comps).expect("consistent dims");
        compose(&sheet.chart, &inner).expect("global chart")
    }

    fn special_points(&self) -> Vec<Coords> {
        self.specials.clone()
    }
}

/// The identity sheet of `R^n`.
pub fn identity_sheet(label: &str, n: usize) -> Sheet {
    Sheet::new(label, SmoothMap::identity(n), SmoothMap::identity(n))
}

/// Sheet `u -> (u_0, .., u_{d-1}, g(u))` over the first `d` coordinates.
pub fn graph_sheet(label: &str, d: usize, extra: &[PolyExpr]) -> Sheet {
    let n = d + extra.len();
    let mut comps: Vec<PolyExpr> = (0..d).map(|i| PolyExpr::var(d, i)).collect();
    comps.extend(extra.iter().cloned());
    let chart = SmoothMap::polynomial_global(d, comps).expect("consistent dims");
    let inverse = SmoothMap::polynomial_global(n, (0..d).map(|i| PolyExpr::var(n, i)).collect()).expect("dims");
    Sheet::new(label, chart, inverse)
}

/// Sheet along the `axis`-th coordinate line of `R^n`.
pub fn axis_sheet(label: &str, n: usize, axis: usize) -> Sheet {
    let chart = inclusion(BoxDomain::whole(1), n, axis);
    let inverse = SmoothMap::polynomial_global(n, vec![PolyExpr::var(n, axis)]).expect("dims");
    Sheet::new(label, chart, inverse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn axes() -> Charted {
        Charted::new("axes", 2, vec![axis_sheet("x-axis", 2, 0), axis_sheet("y-axis", 2, 1)], vec![Coords::zero(2)])
    }

    #[test]
    fn axes_membership() {
        let x = axes();
        let m = x.classify(&Coords::Exact(vec![int(3), int(0)]));
        assert!(m.member);
        assert_eq!(m.branches, vec!["x-axis".to_string()]);
        assert!(!x.classify(&Coords::Exact(vec![int(1), int(1)])).member);
        assert_eq!(x.classify(&Coords::zero(2)).branches.len(), 2);
    }

    #[test]
    fn axes_plaques() {
        let x = axes();
        let along_x = SmoothMap::parse(BoxDomain::whole(1), &["x0^2 + x0", "0"]).unwrap();
        assert!(x.plaque_decision(&along_x).is_ok());
        let diag = SmoothMap::parse(BoxDomain::whole(1), &["x0", "x0"]).unwrap();
        assert!(x.plaque_decision(&diag).is_err());
    }
}
