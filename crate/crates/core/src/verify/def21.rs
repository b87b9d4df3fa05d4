//! Pointwise forms, chart collections, bundle sections and algebraic maps on manifolds.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{check, fail, gen, pass, OrError, Outcome, Recorder, VerifyConfig};
use crate::diffeology::Coords;
use crate::expr::{BoxDomain, SmoothMap};
use crate::forms::DifferentialForm;
use crate::spaces::atlas::{
    ambient_value, chart_collection_from_pointwise, pointwise_from_chart_collection, pointwise_from_section,
    restricted_ambient, section_from_pointwise, LocalForm,
};
use crate::spaces::bump::bump_extension;
use crate::spaces::{make_circle2_atlas, make_plane2_atlas, make_sphere2_atlas, Atlas, RecoveredForm, SpacesError};

const OVERLAP_SAMPLES: usize = 4;

/// Compares a recovered form with the ambient form on `T_x M`, through every pair of charts.
fn compare(r: &RecoveredForm, omega: &DifferentialForm, x: &Coords, tol: f64) -> Outcome {
    let charts = r.atlas.charts_at(x);
    for &i in &charts {
        let want = restricted_ambient(&r.atlas, omega, x, i).or_error()?;
        for &j in &charts {
            let got = r.value_via(j, x).or_error()?.pullback(&r.atlas.tangent_basis(i, x).or_error()?).or_error()?;
            if !got.approx_eq(&want, tol) {
                return fail(json!({"point": x.to_json(), "basis_chart": i, "value_chart": j, "got": got.to_json(), "want": want.to_json()}));
            }
        }
    }
    pass()
}

fn round_trips(name: &str, atlas: &Atlas, forms: &[DifferentialForm], cfg: &VerifyConfig, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let tol = if atlas.is_exact() { 0.0 } else { cfg.tolerance };
    let points: Vec<Coords> = (0..cfg.samples.clamp(1, 16))
        .map(|i| if i % 2 == 0 { atlas.sample_overlap_point(rng) } else { atlas.sample_point(rng) })
        .collect::<Result<_, _>>()
        .unwrap_or_default();
    for (f, omega) in forms.iter().enumerate() {
        let charts = chart_collection_from_pointwise(atlas, omega)
            .and_then(|c| pointwise_from_chart_collection(atlas, &c, omega.degree(), rng, OVERLAP_SAMPLES));
        let section = section_from_pointwise(atlas, omega)
            .and_then(|s| pointwise_from_section(atlas, &s, omega.degree(), rng, OVERLAP_SAMPLES));
        for (route, r) in [("charts", &charts), ("section", &section)] {
            for (p, x) in points.iter().enumerate() {
                rec.case(format!("{name}:{route}:form{f}:point{p:02}"), || match r {
                    Ok(r) => compare(r, omega, x, tol),
                    Err(e) => Err(e.to_string()),
                });
            }
        }
    }
}

fn chart_checks(name: &str, atlas: &Atlas, rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    for i in 0..atlas.charts.len() {
        rec.case(format!("{name}:chart{i}:inverse"), || check(atlas.check_inverse(i, rng, 8).or_error()?, || json!({"chart": i})));
    }
    for s in 0..4 {
        rec.case(format!("{name}:cocycle:{s}"), || -> Outcome {
            let x = atlas.sample_overlap_point(rng).or_error()?;
            let n = atlas.charts.len();
            check(atlas.check_cocycle(0, n - 1, 0, &x).or_error()?, || json!({"point": x.to_json()}))
        });
    }
}

fn random_forms(rng: &mut ChaCha8Rng, ambient: usize, dim: usize) -> Vec<DifferentialForm> {
    (1..=dim).map(|k| gen::differential_form(rng, ambient, k, 2)).collect()
}

pub fn run(cfg: &VerifyConfig, rec: &mut Recorder) {
    let mut rng = cfg.rng("def21");
    for atlas in [make_plane2_atlas(), make_circle2_atlas(), make_sphere2_atlas()] {
        let name = atlas.name.trim_start_matches("atlas:").to_string();
        let mut forms = random_forms(&mut rng, atlas.ambient, atlas.dim);
        if name == "circle2" {
            forms.push(DifferentialForm::parse(BoxDomain::whole(2), 1, &[(&[0], "-x1"), (&[1], "x0")]).expect("literal"));
        }
        chart_checks(&name, &atlas, &mut rng, rec);
        round_trips(&name, &atlas, &forms, cfg, &mut rng, rec);
    }
    let plane = make_plane2_atlas();
    let omega = gen::differential_form(&mut rng, 2, 2, 2);
    rec.case("plane2:corrupted-collection", || -> Outcome {
        let mut c = chart_collection_from_pointwise(&plane, &omega).or_error()?;
        if let LocalForm::Exact(w) = &c.forms[1] {
            let extra = DifferentialForm::parse(w.domain().clone(), 2, &[(&[0, 1], "1 + x0")]).or_error()?;
            c.forms[1] = LocalForm::Exact(w.add(&extra).or_error()?);
        }
        match pointwise_from_chart_collection(&plane, &c, 2, &mut rng, 8) {
            Err(SpacesError::Incompatible(w)) => check(!w.expected.approx_eq(&w.found, 0.0), || w.to_json()),
            Err(e) => Err(e.to_string()),
            Ok(_) => fail(json!({"reason": "corrupted collection was accepted"})),
        }
    });
    // The algebraic value at x on a bump-extended field depends only on the field near x.
    let omega1 = gen::differential_form(&mut rng, 2, 1, 2);
    for s in 0..8 {
        let center: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let local = gen::poly_map(&mut rng, 2, 2, 2);
        rec.case(format!("bump:locality:{s}"), || -> Outcome {
            let g = bump_extension(&local, &center, 0.25, 0.5).or_error()?;
            let inside = Coords::Approx(center.iter().map(|c| c + 0.1).collect());
            let outside = Coords::Approx(center.iter().map(|c| c + 0.75).collect());
            let value = |x: &Coords, field: &SmoothMap| -> Result<f64, String> {
                let v = field.eval_f64(&x.to_f64()).or_error()?;
                ambient_value(&omega1, x).or_error()?.to_f64().evaluate(&[v]).or_error()
            };
            let (a, b) = (value(&inside, &g.velocity)?, value(&inside, &local)?);
            let z = value(&outside, &g.velocity)?;
            check((a - b).abs() <= cfg.tolerance * (1.0 + b.abs()) && z == 0.0, || json!({"extended": a, "local": b, "outside": z}))
        });
    }
}
