//! The axes union, the lines-only plane, the sphere with parallel plaques and the two
//! tangent surfaces.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{check, fail, gen, OrError, Outcome, Recorder, VerifyConfig};
use crate::diffeology::{Coords, JoinMode, ProbeOutcome, SpaceVectorField, Transversality};
use crate::expr::{BoxDomain, PolyExpr, SmoothMap};
use crate::plaque_forms::counterexample_e2;
use crate::scalar;
use crate::spaces::{make_axes_union, make_lines_plane, make_sphere_parallels, make_tangent_planes};

fn curve(comps: &[&str]) -> SmoothMap {
    SmoothMap::parse(BoxDomain::whole(1), comps).expect("literal")
}

fn field(label: &str, n: usize, comps: &[&str]) -> SpaceVectorField {
    SpaceVectorField::parse(label, n, comps).expect("literal")
}

fn line(base: &[scalar::Rational], dir: &[scalar::Rational]) -> SmoothMap {
    let comps = base.iter().zip(dir).map(|(b, d)| &PolyExpr::constant(1, b.clone()) + &PolyExpr::var(1, 0).scale(d)).collect();
    SmoothMap::polynomial_global(1, comps).expect("dimensions agree")
}

fn axes(rec: &mut Recorder) {
    let result = counterexample_e2();
    rec.case("axes:form-value-at-origin", || {
        let (_, ev) = result.as_ref().map_err(|e| e.to_string())?;
        check(ev.value_at_origin == scalar::one(), || ev.to_json())
    });
    rec.case("axes:form-value-at-one", || {
        let (_, ev) = result.as_ref().map_err(|e| e.to_string())?;
        check(ev.value_at_one == scalar::int(2), || ev.to_json())
    });
    rec.case("axes:witness-signature-zero", || {
        let (_, ev) = result.as_ref().map_err(|e| e.to_string())?;
        check(ev.witness_signature.is_zero(0.0), || ev.to_json())
    });
    rec.case("axes:no-pointwise-preimage", || {
        let (_, ev) = result.as_ref().map_err(|e| e.to_string())?;
        check(ev.forced_pointwise_value == scalar::zero() && ev.refutes_pointwise(), || ev.to_json())
    });
    let x = make_axes_union();
    rec.case("axes:origin-transverse", || -> Outcome {
        let out = x.joint_plaque_probe(&curve(&["x0", "0"]), &curve(&["0", "x0"]), JoinMode::Pointwise).or_error()?;
        check(!out.is_found(), || out.to_json())
    });
}

fn lines(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let x = make_lines_plane();
    let points = 20.max(cfg.samples / 2);
    for i in 0..points {
        let base = x.sample_point(rng);
        let f = base.exact().expect("exact points").to_vec();
        let mut dirs = gen::vectors(rng, 2, 2);
        if &dirs[0][0] * &dirs[1][1] == &dirs[0][1] * &dirs[1][0] {
            dirs = vec![vec![scalar::one(), scalar::zero()], vec![scalar::zero(), scalar::one()]];
        }
        rec.case(format!("lines:strongly-transverse:{i:03}"), || -> Outcome {
            let out = x.joint_plaque_probe(&line(&f, &dirs[0]), &line(&f, &dirs[1]), JoinMode::Pointwise).or_error()?;
            match &out {
                ProbeOutcome::NotFound(c) => check(
                    c.obstruction.contains("line-direction") && c.transversality == Some(Transversality::Strong) && c.degree == Some((1, 1)),
                    || out.to_json(),
                ),
                ProbeOutcome::Found { .. } => fail(out.to_json()),
            }
        });
    }
    let test_points: Vec<Vec<scalar::Rational>> =
        (0..6).map(|_| x.sample_point(rng).exact().expect("exact points").to_vec()).collect();
    let axes_dirs = [vec![scalar::one(), scalar::zero()], vec![scalar::zero(), scalar::one()], vec![scalar::one(), scalar::one()]];
    let mut candidates: Vec<SpaceVectorField> = vec![field("zero", 2, &["0", "0"]), field("radial", 2, &["x0", "x1"]), field("e0", 2, &["1", "0"])];
    for j in 0..(cfg.samples / 4).max(4) {
        candidates.push(SpaceVectorField::new(&format!("random{j:02}"), gen::poly_map(rng, 2, 2, 2)));
    }
    for xi in &candidates {
        rec.case(format!("lines:integrable-only-if-zero:{}", xi.label), || -> Outcome {
            let mut integrable = true;
            for f in &test_points {
                for d in &axes_dirs {
                    integrable &= x.locally_integrable_probe(xi, &line(f, d), &[0.0]).or_error()?.is_found();
                }
            }
            let zero = xi.velocity.components().is_some_and(|c| c.iter().all(PolyExpr::is_zero));
            check(integrable == zero, || json!({"field": xi.label, "integrable": integrable, "zero": zero}))
        });
    }
}

fn sphere(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let x = make_sphere_parallels();
    for (name, pole) in ["north", "south"].iter().zip(x.special_points()) {
        let (p1, p2) = (x.sample_plaque(rng, &pole, 1), x.sample_plaque(rng, &pole, 1));
        rec.case(format!("sphere:pole-{name}:strongly-transverse"), || -> Outcome {
            let out = x.joint_plaque_probe(&p1, &p2, JoinMode::Pointwise).or_error()?;
            check(!out.is_found(), || json!({"probe": out.to_json(), "note": "only constant plaques pass through a pole"}))
        });
    }
    let spin = field("spin", 3, &["-x1", "x0", "0"]);
    let tilt = field("tilt", 3, &["1", "0", "0"]);
    for i in 0..10.max(cfg.samples / 4) {
        let base = x.sample_point(rng);
        let (p, q) = (x.sample_plaque(rng, &base, 1), x.sample_plaque(rng, &base, 1));
        rec.case(format!("sphere:vanishing-at-poles-integrable:{i:03}"), || -> Outcome {
            let out = x.locally_integrable_probe(&spin, &p, &[0.0]).or_error()?;
            check(out.is_found(), || out.to_json())
        });
        rec.case(format!("sphere:not-transverse:{i:03}"), || -> Outcome {
            let out = x.joint_plaque_probe(&p, &q, JoinMode::Pointwise).or_error()?;
            check(out.is_found(), || out.to_json())
        });
    }
    for (name, pole) in ["north", "south"].iter().zip(x.special_points()) {
        let p = x.sample_plaque(rng, &pole, 1);
        rec.case(format!("sphere:pole-{name}:nonvanishing-field-fails"), || -> Outcome {
            let out = x.locally_integrable_probe(&tilt, &p, &[0.0]).or_error()?;
            check(!out.is_found(), || out.to_json())
        });
    }
}

fn tangent_planes(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let x = make_tangent_planes();
    let (p1, p2) = (curve(&["x0", "0", "0"]), curve(&["0", "x0", "x0^2"]));
    rec.case("tangent-planes:origin-not-strongly-transverse", || -> Outcome {
        let out = x.joint_plaque_probe(&p1, &p2, JoinMode::Classwise).or_error()?;
        check(out.is_found(), || out.to_json())
    });
    let fields = [field("scaling", 3, &["x0", "x1", "2*x2"]), field("rotation", 3, &["-x1", "x0", "0"]), field("shear", 3, &["x2", "0", "2*x0*x2"])];
    for i in 0..(cfg.samples / 8).max(4) {
        let base = if i == 0 { Coords::zero(3) } else { x.sample_point(rng) };
        let dim = rng.gen_range(1..=2);
        let p = x.sample_plaque(rng, &base, dim);
        for xi in &fields {
            rec.case(format!("tangent-planes:integrable:{}:{i:03}", xi.label), || -> Outcome {
                let out = x.flow_probe(&p, std::slice::from_ref(xi)).or_error()?;
                check(out.is_found(), || out.to_json())
            });
        }
    }
}

pub fn run(cfg: &VerifyConfig, rec: &mut Recorder) {
    let mut rng = cfg.rng("counterexamples");
    axes(rec);
    lines(cfg, &mut rng, rec);
    sphere(cfg, &mut rng, rec);
    tangent_planes(cfg, &mut rng, rec);
}

