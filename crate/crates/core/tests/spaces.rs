use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tds_forms::expr::BoxDomain;
use tds_forms::forms::DifferentialForm;
use tds_forms::spaces::atlas::{
    agrees_on_tangent_spaces, chart_collection_from_pointwise, pointwise_from_chart_collection, pointwise_from_section,
    section_from_pointwise, LocalForm,
};
use tds_forms::spaces::{by_name, make_circle2_atlas, make_plane2_atlas, make_sphere2_atlas, Atlas, SpacesError, FIXTURE_NAMES};

fn atlases() -> Vec<Atlas> {
    vec![make_plane2_atlas(), make_circle2_atlas(), make_sphere2_atlas()]
}

#[test]
fn every_fixture_name_resolves() {
    for name in FIXTURE_NAMES {
        let f = by_name(&name.replace("N", "3")).unwrap();
        assert!(f.space.is_some() || f.atlas.is_some(), "{name}");
    }
    assert!(matches!(by_name("euclidean:0"), Err(SpacesError::UnknownFixture(_))));
    assert!(matches!(by_name("torus"), Err(SpacesError::UnknownFixture(_))));
}

#[test]
fn charts_invert_and_transitions_compose() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for atlas in atlases() {
        let n = atlas.charts.len();
        for i in 0..n {
            assert!(atlas.check_inverse(i, &mut rng, 16).unwrap(), "{} chart {i}", atlas.name);
        }
        for _ in 0..8 {
            let x = atlas.sample_overlap_point(&mut rng).unwrap();
            let cs = atlas.charts_at(&x);
            for &i in &cs {
                for &j in &cs {
                    for &k in &cs {
                        assert!(atlas.check_cocycle(i, j, k, &x).unwrap(), "{} ({i},{j},{k})", atlas.name);
                    }
                }
            }
        }
    }
}

#[test]
fn chart_and_section_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for atlas in atlases() {
        let ambient = atlas.ambient;
        let omega = DifferentialForm::parse(BoxDomain::whole(ambient), 1, &[(&[0], "x1 + 2"), (&[1], "x0^2")]).unwrap();
        let charts = chart_collection_from_pointwise(&atlas, &omega).unwrap();
        let r1 = pointwise_from_chart_collection(&atlas, &charts, 1, &mut rng, 8).unwrap();
        let section = section_from_pointwise(&atlas, &omega).unwrap();
        let r2 = pointwise_from_section(&atlas, &section, 1, &mut rng, 8).unwrap();
        for _ in 0..10 {
            let x = atlas.sample_overlap_point(&mut rng).unwrap();
            assert!(agrees_on_tangent_spaces(&r1, &omega, &x).unwrap(), "{} via charts", atlas.name);
            assert!(agrees_on_tangent_spaces(&r2, &omega, &x).unwrap(), "{} via section", atlas.name);
        }
    }
}

#[test]
fn incompatible_chart_forms_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let plane = make_plane2_atlas();
    let omega = DifferentialForm::parse(BoxDomain::whole(2), 2, &[(&[0, 1], "x0*x1")]).unwrap();
    let mut c = chart_collection_from_pointwise(&plane, &omega).unwrap();
    let LocalForm::Exact(w) = &c.forms[1] else { panic!("plane2 charts are exact") };
    let extra = DifferentialForm::parse(w.domain().clone(), 2, &[(&[0, 1], "1")]).unwrap();
    c.forms[1] = LocalForm::Exact(w.add(&extra).unwrap());
    assert!(matches!(pointwise_from_chart_collection(&plane, &c, 2, &mut rng, 8), Err(SpacesError::Incompatible(_))));
}
