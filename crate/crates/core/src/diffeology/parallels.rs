//! The unit sphere whose plaques have constant height, so each lies in one parallel.
//!
//! Non-constant plaques are rotations about the vertical axis and are evaluated in
//! floating point. Through a pole only constant plaques pass.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{sample_grid, BoxDomain, PolyExpr, SmoothMap, DEFAULT_STEP};
use crate::scalar::{self, Rational, Scalar};

use super::maps::constant;
use super::model::{Attempt, Membership, SpaceModel};
use super::sampling::random_rational;
use super::values::{jacobian_at_zero, Coords, JetMatrix};
use super::JoinMode;

/// Tolerance for the sampled height and sphere tests.
pub const SPHERE_TOL: f64 = 1e-9;

pub struct SphereParallels;

/// Rotation of `x` by `theta` about the vertical axis.
pub fn rotate(x: &[f64], theta: f64) -> Vec<f64> {
    let (c, s) = (theta.cos(), theta.sin());
    vec![c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]]
}

/// Signed angle about the vertical axis carrying `a` to `b`.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1])
}

fn radius_sq(x: &[f64]) -> f64 {
    x[0] * x[0] + x[1] * x[1]
}

/// `(u, v) -> ` inverse stereographic projection from the north pole, exact.
pub fn inverse_stereographic(u: &Rational, v: &Rational) -> Vec<Rational> {
    let s = u * u + v * v;
    let d = &s + scalar::one();
    vec![(u + u) / &d, (v + v) / &d, (s - scalar::one()) / d]
}

fn is_pole(x: &Coords) -> bool {
    match x {
        Coords::Exact(v) => v[0] == scalar::zero() && v[1] == scalar::zero(),
        Coords::Approx(v) => radius_sq(v) <= SPHERE_TOL,
    }
}

/// Angular speed of `w` along the parallel through `x`, if `w` is tangent to it.
fn angular_speed(x: &[f64], w: &[f64]) -> Option<f64> {
    let r2 = radius_sq(x);
    let scale = w.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if r2 <= SPHERE_TOL {
        return (w.iter().all(|v| v.abs() <= SPHERE_TOL * scale)).then_some(0.0);
    }
    let om = (-x[1] * w[0] + x[0] * w[1]) / r2;
    let ok = (w[0] + om * x[1]).abs() <= 1e-7 * scale
        && (w[1] - om * x[0]).abs() <= 1e-7 * scale
        && w[2].abs() <= 1e-7 * scale;
    ok.then_some(om)
}

fn rotation_plaque(domain: BoxDomain, base: Vec<f64>, angle: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> SmoothMap {
    SmoothMap::black_box(domain, 3, DEFAULT_STEP, move |r| rotate(&base, angle(r)))
}

impl SpaceModel for SphereParallels {
    fn kind(&self) -> &'static str {
        "sphere_parallels"
    }

    fn tolerance(&self) -> f64 {
        SPHERE_TOL
    }

    fn classify(&self, x: &Coords) -> Membership {
        let member = x.len() == 3
            && match x {
                Coords::Exact(v) => v.iter().map(|c| c * c).sum::<Rational>() == scalar::one(),
                Coords::Approx(v) => (v.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() <= SPHERE_TOL,
            };
        let branch = if !member {
            vec![]
        } else if is_pole(x) {
            let up = x.to_f64()[2] > 0.0;
            vec![if up { "north pole" } else { "south pole" }.to_string()]
        } else {
            vec!["parallel".to_string()]
        };
        Membership { member, branches: branch }
    }

    fn plaque_decision(&self, m: &SmoothMap) -> Result<(), String> {
        if let Some(c) = m.components() {
            if !c[2].is_constant() {
                return Err("height is not constant".into());
            }
            let norm = c.iter().fold(PolyExpr::zero(m.in_dim()), |a, p| &a + &(p * p));
            if norm != PolyExpr::one(m.in_dim()) {
                return Err("image is not on the unit sphere".into());
            }
            return Ok(());
        }
        let n = m.in_dim();
        let Ok(f) = m.eval_f64(&vec![0.0; n]) else { return Err("not defined at the origin".into()) };
        for x in sample_grid(m.domain(), if n <= 2 { 5 } else { 3 }) {
            let Ok(y) = m.eval_f64(&x) else { return Err("not defined on its box".into()) };
            if (y[2] - f[2]).abs() > SPHERE_TOL {
                return Err("height is not constant".into());
            }
            if (y.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() > SPHERE_TOL {
                return Err("image is not on the unit sphere".into());
            }
        }
        Ok(())
    }

    fn realize_jet(&self, base: &Coords, jet: &JetMatrix) -> Attempt {
        let n = jet.cols();
        let tol = 1e-7;
        if jet.is_zero(if jet.exact().is_some() { 0.0 } else { tol }) {
            return Attempt::Found {
                map: constant(BoxDomain::whole(n), base),
                construction: "constant plaque".into(),
            };
        }
        if is_pole(base) {
            return Attempt::Obstructed(
                "only constant plaques pass through a pole: constant height on the sphere forces x = y = 0".into(),
            );
        }
        let f = base.to_f64();
        let mut speeds = Vec::with_capacity(n);
        for j in 0..n {
            match angular_speed(&f, &jet.column(j).to_f64()) {
                Some(om) => speeds.push(om),
                None => {
                    return Attempt::Obstructed(
                        "a first derivative is not tangent to the parallel through the base point".into(),
                    )
                }
            }
        }
        Attempt::Found {
            map: rotation_plaque(BoxDomain::whole(n), f, move |r| r.iter().zip(&speeds).map(|(a, b)| a * b).sum()),
            construction: "rotation along the parallel".into(),
        }
    }

    fn join(&self, p1: &SmoothMap, p2: &SmoothMap, base: &Coords, mode: JoinMode) -> Attempt {
        let dom = p1.domain().product(p2.domain());
        match mode {
            JoinMode::Pointwise => {
                if is_pole(base) {
                    return Attempt::Found {
                        map: constant(dom, base),
                        construction: "constant plaque at the pole".into(),
                    };
                }
                let (a, b) = (p1.clone(), p2.clone());
                let f = base.to_f64();
                let n = p1.in_dim();
                let f2 = f.clone();
                let angle = move |x: &[f64]| {
                    let (r, s) = x.split_at(n);
                    let d1 = a.eval_f64(r).map(|y| angle_between(&f2, &y)).unwrap_or(f64::NAN);
                    let d2 = b.eval_f64(s).map(|y| angle_between(&f2, &y)).unwrap_or(f64::NAN);
                    d1 + d2
                };
                Attempt::Found { map: rotation_plaque(dom, f, angle), construction: "sum of rotation angles".into() }
            }
            JoinMode::Classwise => {
                let (Ok(j1), Ok(j2)) = (jacobian_at_zero(p1), jacobian_at_zero(p2)) else {
                    return Attempt::Obstructed("plaques are not defined at the origin".into());
                };
                match self.realize_jet(base, &j1.hcat(&j2)) {
                    Attempt::Found { map, construction } => match map.with_domain(dom) {
                        Ok(map) => Attempt::Found { map, construction },
                        Err(e) => Attempt::Obstructed(e.to_string()),
                    },
                    other => other,
                }
            }
        }
    }

    fn flow(&self, p0: &SmoothMap, velocities: &[SmoothMap]) -> Attempt {
        let n = p0.in_dim();
        for x in sample_grid(p0.domain(), if n <= 2 { 5 } else { 3 }).iter().chain([vec![0.0; n]].iter()) {
            let Ok(y) = p0.eval_f64(x) else { return Attempt::Obstructed("plaque undefined on its box".into()) };
            for w in velocities {
                let Ok(v) = w.eval_f64(x) else { return Attempt::Obstructed("field undefined along the plaque".into()) };
                if angular_speed(&y, &v).is_none() {
                    let why = if radius_sq(&y) <= SPHERE_TOL {
                        "the field is nonzero at a pole, where only constant plaques pass"
                    } else {
                        "the field is not tangent to the parallel through the plaque"
                    };
                    return Attempt::Obstructed(format!("{why} (at parameter {x:?})"));
                }
            }
        }
        let (p, ws) = (p0.clone(), velocities.to_vec());
        let dom = p0.domain().product(&BoxDomain::whole(velocities.len()));
        let map = SmoothMap::black_box(dom, 3, DEFAULT_STEP, move |x| {
            let (r, t) = x.split_at(n);
            let y = p.eval_f64(r).unwrap_or_else(|_| vec![f64::NAN; 3]);
            let theta: f64 = ws
                .iter()
                .zip(t)
                .map(|(w, ti)| {
                    let v = w.eval_f64(r).unwrap_or_else(|_| vec![f64::NAN; 3]);
                    ti * angular_speed(&y, &v).unwrap_or(f64::NAN)
                })
                .sum();
            rotate(&y, theta)
        });
        Attempt::Found { map, construction: "rotation by the field's angular speed".into() }
    }

    fn weaker_join(&self, p1: &SmoothMap, p2: &SmoothMap) -> Attempt {
        let n = p1.in_dim() - 1;
        let dom = p1.domain().product(&BoxDomain::new(
            p2.domain().lo()[n..].to_vec(),
            p2.domain().hi()[n..].to_vec(),
        )
        .expect("valid box"));
        let (a, b) = (p1.clone(), p2.clone());
        let map = SmoothMap::black_box(dom, 3, DEFAULT_STEP, move |x| {
            let r = &x[..n];
            let with = |t: f64| {
                let mut y = r.to_vec();
                y.push(t);
                y
            };
            let y1 = a.eval_f64(&with(x[n])).unwrap_or_else(|_| vec![f64::NAN; 3]);
            let b0 = b.eval_f64(&with(0.0)).unwrap_or_else(|_| vec![f64::NAN; 3]);
            let b2 = b.eval_f64(&with(x[n + 1])).unwrap_or_else(|_| vec![f64::NAN; 3]);
            let theta = if radius_sq(&b0) <= SPHERE_TOL { 0.0 } else { angle_between(&b0, &b2) };
            rotate(&y1, theta)
        });
        Attempt::Found { map, construction: "composed rotations".into() }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Coords {
        let u = random_rational(rng, 2, 4);
        let v = random_rational(rng, 2, 4);
        Coords::Exact(inverse_stereographic(&u, &v))
    }

    fn sample_plaque(&self, rng: &mut ChaCha8Rng, base: &Coords, dim: usize) -> SmoothMap {
        if is_pole(base) {
            return constant(BoxDomain::whole(dim), base);
        }
        let lin: Vec<f64> = (0..dim).map(|_| Scalar::to_f64(&random_rational(rng, 2, 2))).collect();
        let quad = if rng.gen_bool(0.5) { Scalar::to_f64(&random_rational(rng, 1, 2)) } else { 0.0 };
        rotation_plaque(BoxDomain::whole(dim), base.to_f64(), move |r| {
            r.iter().zip(&lin).map(|(a, b)| a * b).sum::<f64>() + quad * r.first().map_or(0.0, |x| x * x)
        })
    }

    fn special_points(&self) -> Vec<Coords> {
        vec![
            Coords::Exact(vec![scalar::zero(), scalar::zero(), scalar::one()]),
            Coords::Exact(vec![scalar::zero(), scalar::zero(), -scalar::one()]),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn stereographic_points_are_on_the_sphere() {
        let p = inverse_stereographic(&scalar::rat(1, 3), &int(2));
        assert!(SphereParallels.classify(&Coords::Exact(p)).member);
    }

    #[test]
    fn height_must_be_constant() {
        let x = SphereParallels;
        let m = SmoothMap::black_box(BoxDomain::whole(1), 3, DEFAULT_STEP, |t| vec![t[0].cos(), t[0].sin(), 0.0]);
        assert!(x.plaque_decision(&m).is_ok());
        let tilt = SmoothMap::black_box(BoxDomain::whole(1), 3, DEFAULT_STEP, |t| {
            vec![t[0].cos(), 0.0, t[0].sin()]
        });
        assert!(x.plaque_decision(&tilt).is_err());
    }

    #[test]
    fn pole_admits_only_constants() {
        let pole = Coords::Exact(vec![int(0), int(0), int(1)]);
        let jet = JetMatrix::Exact(vec![vec![int(1)], vec![int(0)], vec![int(0)]]);
        assert!(matches!(SphereParallels.realize_jet(&pole, &jet), Attempt::Obstructed(_)));
    }
}
