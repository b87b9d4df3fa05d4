use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tds_forms::diffeology::checks::{check_linear_continuous, check_smooth_map};
use tds_forms::diffeology::{Coords, JoinMode, SpaceVectorField, Transversality};
use tds_forms::expr::{BoxDomain, SmoothMap, DEFAULT_STEP};
use tds_forms::scalar::{int, rat};
use tds_forms::spaces::{
    make_axes_union, make_euclidean, make_lines_plane, make_plane2_space, make_sphere_parallels, make_tangent_planes,
};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(11)
}

fn curve(comps: &[&str]) -> SmoothMap {
    SmoothMap::parse(BoxDomain::whole(1), comps).unwrap()
}

fn exact(v: &[i64]) -> Coords {
    Coords::Exact(v.iter().map(|&x| int(x)).collect())
}

#[test]
fn plaque_predicates() {
    let lines = make_lines_plane();
    assert!(lines.is_plaque(&curve(&["x0", "x0"])).unwrap().accepted);
    assert!(!lines.is_plaque(&curve(&["x0", "x0^2"])).unwrap().accepted);
    let two = SmoothMap::parse(BoxDomain::whole(2), &["x0 + x1", "2*x0 + 2*x1"]).unwrap();
    assert!(lines.is_plaque(&two).unwrap().accepted);
    let constant = curve(&["3", "-1/2"]);
    assert!(lines.is_plaque(&constant).unwrap().accepted);
    let doubled = tds_forms::expr::compose(&curve(&["x0", "x0"]), &curve(&["2*x0"])).unwrap();
    assert!(lines.is_plaque(&doubled).unwrap().accepted);
    assert!(lines.is_plaque(&SmoothMap::identity(3)).is_err());
}

#[test]
fn tangent_classes_on_axes() {
    let x = make_axes_union();
    let v = x.tangent_class(&curve(&["x0", "0"])).unwrap();
    assert_eq!(v.signature, exact(&[1, 0]));
    let zero = x.tangent_class(&curve(&["0", "0"])).unwrap();
    assert!(zero.signature.is_zero(0.0));
    let fast = x.tangent_class(&curve(&["2*x0", "0"])).unwrap();
    assert_eq!(fast.signature, v.signature.scale(&int(2)));
    assert!(x.membership(&exact(&[3, 0])).member);
    assert!(!x.membership(&exact(&[1, 1])).member);
}

#[test]
fn equivalence_orders() {
    let x = make_axes_union();
    let (p, q) = (curve(&["x0", "0"]), curve(&["x0 + x0^2", "0"]));
    assert!(x.equivalent(&p, &q, 1).unwrap());
    assert!(!x.equivalent(&p, &q, 2).unwrap());
    assert!(x.equivalent(&p, &p.restrict(&rat(1, 3)), 3).unwrap());
}

#[test]
fn tangent_spaces() {
    let mut r = rng();
    let plane = make_euclidean(2);
    let t = plane.tangent_space(&exact(&[1, 2]), &mut r, 12).unwrap();
    assert_eq!(t.dimension, 2);
    assert!(t.is_linear_subspace);

    let axes = make_axes_union();
    let t = axes.tangent_space(&exact(&[0, 0]), &mut r, 24).unwrap();
    assert_eq!(t.components, vec![1, 1]);
    assert!(!t.is_linear_subspace);
    assert_eq!(t.underline_dimension, 0);
    let t = axes.tangent_space(&exact(&[1, 0]), &mut r, 12).unwrap();
    assert_eq!(t.dimension, 1);
    assert!(t.is_linear_subspace);
}

#[test]
fn joins_on_manifolds_and_lines() {
    let plane = make_plane2_space();
    let p1 = curve(&["1 + x0", "x0^2"]);
    let p2 = curve(&["1", "x0"]);
    let out = plane.joint_plaque_probe(&p1, &p2, JoinMode::Pointwise).unwrap();
    assert!(out.is_found(), "{out:?}");

    let lines = make_lines_plane();
    let out = lines.joint_plaque_probe(&curve(&["x0", "0"]), &curve(&["0", "x0"]), JoinMode::Pointwise).unwrap();
    let cert = out.certificate().expect("obstructed");
    assert_eq!(cert.transversality, Some(Transversality::Strong));
    assert!(cert.obstruction.contains("line-direction"));
    let same = lines.joint_plaque_probe(&curve(&["x0", "x0"]), &curve(&["2*x0", "2*x0"]), JoinMode::Pointwise).unwrap();
    assert!(same.is_found());
}

#[test]
fn tangent_planes_are_weakly_but_not_strongly_transverse_at_origin() {
    let x = make_tangent_planes();
    let p1 = curve(&["x0", "0", "0"]);
    let p2 = curve(&["0", "x0", "x0^2"]);
    let strong = x.joint_plaque_probe(&p1, &p2, JoinMode::Pointwise).unwrap();
    assert_eq!(strong.certificate().unwrap().transversality, Some(Transversality::Weak));
    assert!(x.joint_plaque_probe(&p1, &p2, JoinMode::Classwise).unwrap().is_found());
}

#[test]
fn weaker_condition() {
    let r2 = make_euclidean(2);
    let p1 = SmoothMap::parse(BoxDomain::whole(2), &["x0 + x1", "x0*x1"]).unwrap();
    let p2 = SmoothMap::parse(BoxDomain::whole(2), &["x0 + x1^2", "x1"]).unwrap();
    assert!(r2.weaker_condition_probe(&p1, &p2).unwrap().is_found());
    assert!(r2.weaker_condition_probe(&p1, &p1).unwrap().is_found());

    let lines = make_lines_plane();
    let a = SmoothMap::parse(BoxDomain::whole(2), &["x1", "0"]).unwrap();
    let b = SmoothMap::parse(BoxDomain::whole(2), &["0", "x1"]).unwrap();
    assert!(!lines.weaker_condition_probe(&a, &b).unwrap().is_found());
}

#[test]
fn integrability() {
    let r2 = make_euclidean(2);
    let xi = SpaceVectorField::parse("rotation", 2, &["-x1", "x0"]).unwrap();
    let p = curve(&["1 + x0", "x0^2"]);
    assert!(r2.locally_integrable_probe(&xi, &p, &[0.0]).unwrap().is_found());

    let lines = make_lines_plane();
    let transverse = curve(&["0", "x0"]);
    let e0 = SpaceVectorField::parse("e0", 2, &["1", "0"]).unwrap();
    assert!(!lines.locally_integrable_probe(&e0, &transverse, &[0.0]).unwrap().is_found());
    let zero = SpaceVectorField::parse("zero", 2, &["0", "0"]).unwrap();
    assert!(lines.locally_integrable_probe(&zero, &transverse, &[0.0]).unwrap().is_found());

    let sphere = make_sphere_parallels();
    let spin = SpaceVectorField::parse("spin", 3, &["-x1", "x0", "0"]).unwrap();
    let base = SmoothMap::black_box(BoxDomain::whole(1), 3, DEFAULT_STEP, |t| {
        let (c, s) = (0.6 * t[0].cos(), 0.6 * t[0].sin());
        vec![c, s, 0.8]
    });
    assert!(sphere.locally_integrable_probe(&spin, &base, &[0.0]).unwrap().is_found());
    let tilt = SpaceVectorField::parse("tilt", 3, &["1", "0", "0"]).unwrap();
    let pole = curve(&["0", "0", "1"]);
    assert!(!sphere.locally_integrable_probe(&tilt, &pole, &[0.0]).unwrap().is_found());
}

#[test]
fn linear_and_continuous() {
    let mut r = rng();
    let rep = check_linear_continuous(&make_euclidean(2), &mut r, 6).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    let rep = check_linear_continuous(&make_lines_plane(), &mut r, 6).unwrap();
    assert!(rep.passed_matching(":additivity") && rep.passed_matching(":scaling"));
    assert!(!rep.passed_matching(":continuity"));
}

#[test]
fn smooth_maps() {
    let mut r = rng();
    let sum = SmoothMap::parse(BoxDomain::whole(2), &["x0 + x1"]).unwrap();
    let rep = check_smooth_map(&sum, &make_axes_union(), &make_euclidean(1), &mut r, 8).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    let (c, s) = (1f64.cos(), 1f64.sin());
    let rot = SmoothMap::black_box(BoxDomain::whole(2), 2, DEFAULT_STEP, move |x| {
        vec![c * x[0] - s * x[1], s * x[0] + c * x[1]]
    });
    let lines = make_lines_plane();
    let rep = check_smooth_map(&rot, &lines, &lines, &mut r, 6).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    let id = SmoothMap::identity(3);
    let rep = check_smooth_map(&id, &make_tangent_planes(), &make_tangent_planes(), &mut r, 6).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
}
