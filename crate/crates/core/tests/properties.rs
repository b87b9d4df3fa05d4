use proptest::prelude::*;

use tds_forms::expr::{compose, BoxDomain, PolyExpr, SmoothMap};
use tds_forms::exterior::{ExteriorForm, MultiIndex};
use tds_forms::forms::{pullback_smooth, DifferentialForm};
use tds_forms::linalg::mul;
use tds_forms::scalar::{int, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn form(n: usize, k: usize) -> impl Strategy<Value = ExteriorForm> {
    let indices = MultiIndex::all(n, k);
    prop::collection::vec(rational(), indices.len()).prop_map(move |cs| {
        ExteriorForm::from_coeffs(n, k, indices.iter().zip(cs).map(|(i, c)| (i.as_slice().to_vec(), c))).unwrap()
    })
}

fn poly(n: usize) -> impl Strategy<Value = PolyExpr> {
    prop::collection::vec((prop::collection::vec(0u32..=2, n), rational()), 1..4).prop_map(move |terms| {
        terms.into_iter().fold(PolyExpr::zero(n), |acc, (e, c)| &acc + &PolyExpr::monomial(n, e, c))
    })
}

fn poly_map(n: usize, m: usize) -> impl Strategy<Value = SmoothMap> {
    prop::collection::vec(poly(n), m).prop_map(move |cs| SmoothMap::polynomial_global(n, cs).unwrap())
}

fn differential(n: usize, k: usize) -> impl Strategy<Value = DifferentialForm> {
    let indices = MultiIndex::all(n, k);
    prop::collection::vec(poly(n), indices.len()).prop_map(move |cs| {
        let terms = indices.iter().zip(cs).map(|(i, c)| (i.as_slice().to_vec(), c));
        DifferentialForm::from_coeffs(BoxDomain::whole(n), k, terms.collect::<Vec<_>>()).unwrap()
    })
}

fn matrix(r: usize, c: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(prop::collection::vec((-3i64..=3).prop_map(int), c), r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative((k, l, a, b) in (0usize..=2, 0usize..=2).prop_flat_map(|(k, l)| (Just(k), Just(l), form(4, k), form(4, l)))) {
        let sign = if (k * l) % 2 == 0 { int(1) } else { int(-1) };
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().scale(&sign));
    }

    #[test]
    fn odd_forms_square_to_zero(a in form(4, 1)) {
        prop_assert!(a.wedge(&a).unwrap().is_zero());
    }

    #[test]
    fn linear_pullback_is_contravariant(w in form(3, 2), l in matrix(3, 3), m in matrix(3, 2)) {
        let lhs = w.pullback_linear(&mul(&l, &m)).unwrap();
        prop_assert_eq!(lhs, w.pullback_linear(&l).unwrap().pullback_linear(&m).unwrap());
    }

    #[test]
    fn d_squared_vanishes(w in differential(3, 1)) {
        prop_assert!(w.exterior_derivative().exterior_derivative().is_zero());
    }

    #[test]
    fn pullback_commutes_with_d(w in differential(2, 1), f in poly_map(2, 2)) {
        let lhs = pullback_smooth(&f, &w.exterior_derivative()).unwrap();
        let rhs = pullback_smooth(&f, &w).unwrap().exterior_derivative();
        prop_assert!(lhs.same_coefficients(&rhs));
    }

    #[test]
    fn smooth_pullback_is_contravariant(w in differential(2, 1), f in poly_map(2, 2), g in poly_map(1, 2)) {
        let lhs = pullback_smooth(&compose(&f, &g).unwrap(), &w).unwrap();
        let rhs = pullback_smooth(&g, &pullback_smooth(&f, &w).unwrap()).unwrap();
        prop_assert!(lhs.same_coefficients(&rhs));
    }
}
