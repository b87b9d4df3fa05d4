use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tds_forms::diffeology::sampling::random_vector;
use tds_forms::diffeology::{Coords, DiffSpace, SpaceVectorField};
use tds_forms::expr::{parse_expr, BoxDomain, PolyExpr, SmoothMap};
use tds_forms::forms::{pullback_smooth, DifferentialForm};
use tds_forms::plaque_forms::{
    compatibility_check, counterexample_e2, pointwise_along, pointwise_to_algebraic, psi, psi_inverse_along,
    psi_inverse_at, psi_unattested, pullback_eps1, pullback_eps2, pullback_eps3, tangent_condition_check, AlgebraicForm,
    PlaqueFormError, PlaqueIndexedForm, PointwiseForm,
};
use tds_forms::scalar::{int, rat};
use tds_forms::spaces::{make_axes_union, make_euclidean, make_lines_plane, make_plane2_space, make_tangent_planes};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(5)
}

fn poly(s: &str, n: usize) -> PolyExpr {
    parse_expr(s, n).unwrap()
}

fn map(n: usize, comps: &[&str]) -> SmoothMap {
    SmoothMap::parse(BoxDomain::whole(n), comps).unwrap()
}

fn area(n: usize) -> PointwiseForm {
    PointwiseForm::new(n, n, 2, vec![(vec![0, 1], poly("1 + x0*x1", n))]).unwrap()
}

#[test]
fn psi_matches_the_smooth_pullback() {
    let x = make_euclidean(2);
    let omega = area(2);
    let big = psi(&x, &omega).unwrap();
    let ambient = omega.to_differential().unwrap();
    let mut g = rng();
    let base = Coords::Exact(vec![rat(1, 2), int(-1)]);
    for _ in 0..10 {
        let p = x.sample_plaque(&mut g, &base, 2);
        assert!(big.eval(&p).unwrap().same_coefficients(&pullback_smooth(&p, &ambient).unwrap()));
    }
}

#[test]
fn psi_is_function_linear() {
    let x = make_euclidean(2);
    let (a, b) = (area(2), PointwiseForm::new(2, 2, 2, vec![(vec![0, 1], poly("x1^2", 2))]).unwrap());
    let f = poly("x0 - 3*x1", 2);
    let p = map(2, &["x0 + x1^2", "x0*x1"]);
    let sum = psi(&x, &a.add(&b).unwrap()).unwrap().eval(&p).unwrap();
    let parts = psi(&x, &a).unwrap().add(&psi(&x, &b).unwrap()).unwrap().eval(&p).unwrap();
    assert!(sum.same_coefficients(&parts));
    let scaled = psi(&x, &a.scale_by(&f)).unwrap().eval(&p).unwrap();
    let outer = psi(&x, &a).unwrap().scale_by(&f).eval(&p).unwrap();
    assert!(scaled.same_coefficients(&outer));
    assert!(psi(&x, &PointwiseForm::zero(2, 2, 2)).unwrap().eval(&p).unwrap().is_zero());
}

#[test]
fn psi_refuses_spaces_with_transverse_points() {
    let err = psi(&make_axes_union(), &area(2)).unwrap_err();
    assert!(matches!(err, PlaqueFormError::TransversePoints(_)));
}

#[test]
fn compatibility() {
    let x = make_euclidean(2);
    let big = psi(&x, &area(2)).unwrap();
    let p = map(2, &["x0^2 + x1", "x1 - x0"]);
    assert!(compatibility_check(&big, &p, &SmoothMap::identity(2)).unwrap().passed);
    let phi = map(2, &["x0*x1", "x0 + 2*x1^2"]);
    assert!(compatibility_check(&big, &p, &phi).unwrap().passed);
    let corrupted = PlaqueIndexedForm::new("corrupted", 2, {
        let big = big.clone();
        move |q| {
            let w = big.eval(q)?;
            let bump = DifferentialForm::basis(w.domain().clone(), vec![0, 1])?;
            Ok(if q.components().is_some_and(|c| c[0].degree() > 2) { w.add(&bump)? } else { w })
        }
    });
    let r = compatibility_check(&corrupted, &p, &phi).unwrap();
    assert!(!r.passed);
    assert!(r.witness.is_some());
    let small = SmoothMap::parse(BoxDomain::cube(2, int(1)), &["x0", "x1"]).unwrap();
    assert!(matches!(
        compatibility_check(&big, &small, &map(2, &["3*x0", "x1"])),
        Err(PlaqueFormError::DomainEscape(_))
    ));
}

#[test]
fn tangent_condition() {
    let x = make_euclidean(2);
    let omega = PointwiseForm::new(2, 2, 1, vec![(vec![0], poly("x1", 2)), (vec![1], poly("x0^2", 2))]).unwrap();
    let big = psi(&x, &omega).unwrap();
    let p1 = map(2, &["x0", "x1"]);
    let p2 = map(2, &["x0 + x1^2", "x1 + x0^2"]);
    let zero = vec![int(0), int(0)];
    let dirs = vec![vec![int(1), int(0)]];
    let e = [int(0), int(1)];
    let r = tangent_condition_check(&x, &big, &p1, &zero, &p2, &zero, &dirs, Some(&e)).unwrap();
    assert!(r.passed);
    assert!(r.d_values.is_some());
    // A rule reading second derivatives of the plaque.
    let bad = PlaqueIndexedForm::new("second-order", 1, |q: &SmoothMap| {
        let c = q.components().unwrap();
        let n = q.in_dim();
        let terms = (0..n).map(|i| (vec![i], c[0].partial(i).unwrap().partial(i).unwrap()));
        Ok(DifferentialForm::from_coeffs(q.domain().clone(), 1, terms)?)
    });
    let p3 = map(2, &["x0 + x0^2", "x1"]);
    let r = tangent_condition_check(&x, &bad, &p1, &zero, &p3, &zero, &dirs, None).unwrap();
    assert!(!r.passed);
    let skew = vec![vec![int(0), int(1)]];
    let p4 = map(2, &["x0", "2*x1"]);
    assert!(matches!(
        tangent_condition_check(&x, &big, &p1, &zero, &p4, &zero, &skew, None),
        Err(PlaqueFormError::NotTangent(_))
    ));
}

fn round_trip(x: &DiffSpace, omega: &PointwiseForm, samples: usize) {
    let big = psi(x, omega).unwrap();
    let mut g = rng();
    for _ in 0..samples {
        let base = x.sample_point(&mut g);
        let vs: Vec<_> = (0..omega.degree())
            .map(|_| {
                let p = x.sample_plaque(&mut g, &base, 1);
                x.tangent_class(&p).unwrap()
            })
            .collect();
        let got = psi_inverse_at(x, &big, &base, &vs).unwrap();
        let want = omega.evaluate(&base, &vs).unwrap();
        assert_eq!(want.exact(), Some(&got), "at {:?}", base);
    }
}

#[test]
fn psi_round_trips() {
    round_trip(&make_euclidean(2), &area(2), 8);
    let vol = PointwiseForm::new(3, 3, 2, vec![(vec![0, 2], poly("x1", 3)), (vec![1, 2], poly("1", 3))]).unwrap();
    round_trip(&make_euclidean(3), &vol, 8);
    round_trip(&make_tangent_planes(), &vol, 8);
    round_trip(&make_plane2_space(), &area(2), 8);
}

#[test]
fn zero_vectors_give_zero() {
    let x = make_euclidean(2);
    let big = psi(&x, &area(2)).unwrap();
    let base = Coords::Exact(vec![int(1), int(2)]);
    let z = x.realize_vector(&base, &Coords::zero(2)).unwrap();
    let got = psi_inverse_at(&x, &big, &base, &[z.clone(), z]).unwrap();
    assert_eq!(got, int(0));
}

#[test]
fn lines_have_no_spanning_plaque() {
    let x = make_lines_plane();
    let omega = area(2);
    let big = psi_unattested(&x, &omega).unwrap();
    let base = Coords::Exact(vec![int(1), int(1)]);
    let v1 = x.tangent_class(&map(1, &["1 + x0", "1"])).unwrap();
    let v2 = x.tangent_class(&map(1, &["1", "1 + x0"])).unwrap();
    assert!(matches!(psi_inverse_at(&x, &big, &base, &[v1, v2]), Err(PlaqueFormError::NoSpanningPlaque(_))));
}

#[test]
fn inverse_along_plaques_is_polynomial() {
    let x = make_euclidean(2);
    let omega = area(2);
    let big = psi(&x, &omega).unwrap();
    let fields = vec![
        SpaceVectorField::parse("a", 2, &["x1", "1"]).unwrap(),
        SpaceVectorField::parse("b", 2, &["x0^2", "x0"]).unwrap(),
    ];
    let p = map(1, &["x0", "x0^2"]);
    let got = psi_inverse_along(&x, &big, &fields, &p).unwrap();
    assert_eq!(got, pointwise_along(&x, &omega, &fields, &p).unwrap());
}

#[test]
fn algebraic_from_pointwise() {
    let x = make_euclidean(2);
    let alg = pointwise_to_algebraic(&x, &PointwiseForm::new(2, 2, 2, vec![(vec![0, 1], poly("1", 2))]).unwrap()).unwrap();
    let dx = SpaceVectorField::parse("dx", 2, &["1", "0"]).unwrap();
    let dy = SpaceVectorField::parse("dy", 2, &["0", "1"]).unwrap();
    assert_eq!(alg.evaluate(&[dx.clone(), dy.clone()]).unwrap(), poly("1", 2));
    assert_eq!(alg.evaluate(&[dy, dx]).unwrap(), poly("-1", 2));
}

#[test]
fn e2_counterexample() {
    let (omega, ev) = counterexample_e2().unwrap();
    assert_eq!(ev.value_at_origin, int(1));
    assert_eq!(ev.value_at_one, int(2));
    assert!(ev.witness_signature.is_zero(0.0));
    assert_eq!(ev.forced_pointwise_value, int(0));
    assert!(ev.refutes_pointwise());
    let xi2 = SpaceVectorField::parse("xi2", 2, &["0", "x1"]).unwrap();
    assert_eq!(omega.evaluate(&[xi2]).unwrap(), poly("2*x1^2 + 1", 2));
    let bad = SpaceVectorField::parse("bad", 2, &["1", "0"]).unwrap();
    assert!(matches!(omega.evaluate(&[bad]), Err(PlaqueFormError::NotDivisible(_))));
}

#[test]
fn eps1_pullback_matches_forms() {
    let plane = make_euclidean(2);
    let omega = area(2);
    let h = map(2, &["x0 + x1^2", "x1"]);
    let pulled = pullback_eps1(&h, &plane, &plane, &omega, &mut rng(), 8).unwrap();
    let want = pullback_smooth(&h, &omega.to_differential().unwrap()).unwrap();
    assert!(pulled.to_differential().unwrap().same_coefficients(&want));
    let id = pullback_eps1(&SmoothMap::identity(2), &plane, &plane, &omega, &mut rng(), 8).unwrap();
    assert_eq!(id, omega);
    let c = pullback_eps1(&map(2, &["1", "2"]), &plane, &plane, &omega, &mut rng(), 8).unwrap();
    assert!(c.is_zero());
}

#[test]
fn eps3_pullback_is_psi_of_eps1_pullback() {
    let plane = make_euclidean(2);
    let omega = area(2);
    let h = map(2, &["x0 - x1^2", "x0*x1"]);
    let lhs = pullback_eps3(&h, &plane, &psi(&plane, &omega).unwrap());
    let rhs = psi(&plane, &pullback_eps1(&h, &plane, &plane, &omega, &mut rng(), 8).unwrap()).unwrap();
    let mut g = rng();
    for _ in 0..10 {
        let base = Coords::Exact(random_vector(&mut g, 2, 3));
        let p = plane.sample_plaque(&mut g, &base, 2);
        assert!(lhs.eval(&p).unwrap().same_coefficients(&rhs.eval(&p).unwrap()));
    }
}

#[test]
fn eps2_pullback() {
    let line = AlgebraicForm::on_coordinate_basis(1, 1, vec![(vec![0], poly("1 + x0^2", 1))]).unwrap();
    let h = map(2, &["x0 + 2*x1"]);
    let s = map(1, &["x0", "0"]);
    let pulled = pullback_eps2(&h, &line, &s).unwrap();
    let eta = SpaceVectorField::parse("eta", 2, &["1", "1"]).unwrap();
    let line_space = make_euclidean(1);
    let w = PointwiseForm::new(1, 1, 1, vec![(vec![0], poly("1 + x0^2", 1))]).unwrap();
    let eps1 = pullback_eps1(&h, &make_euclidean(2), &line_space, &w, &mut rng(), 8).unwrap();
    let via_eps1 = pointwise_to_algebraic(&make_euclidean(2), &eps1).unwrap();
    assert_eq!(pulled.evaluate(std::slice::from_ref(&eta)).unwrap(), via_eps1.evaluate(&[eta]).unwrap());
    let not_onto = map(2, &["0"]);
    assert!(matches!(pullback_eps2(&not_onto, &line, &s), Err(PlaqueFormError::SurjectivityNotWitnessed(_))));
    let id = pullback_eps2(&SmoothMap::identity(1), &line, &SmoothMap::identity(1)).unwrap();
    let d = SpaceVectorField::parse("d", 1, &["x0"]).unwrap();
    assert_eq!(id.evaluate(std::slice::from_ref(&d)).unwrap(), line.evaluate(&[d]).unwrap());
}

#[test]
fn free_module_extension() {
    let h: Vec<PolyExpr> = vec![poly("x0 + 1", 2), poly("x1^3", 2)];
    let alg = AlgebraicForm::on_coordinate_basis(2, 1, vec![(vec![0], h[0].clone()), (vec![1], h[1].clone())]).unwrap();
    let f = [poly("x0*x1", 2), poly("2 - x0", 2)];
    let xi = SpaceVectorField::new("xi", SmoothMap::polynomial_global(2, f.to_vec()).unwrap());
    let want = &(&h[0] * &f[0]) + &(&h[1] * &f[1]);
    assert_eq!(alg.evaluate(&[xi]).unwrap(), want);
}
