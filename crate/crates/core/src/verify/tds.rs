//! Tangent structures: classes, tangent spaces, linearity, continuity and smooth maps.

use serde_json::json;

use super::{check, OrError, Outcome, Recorder, VerifyConfig};
use crate::diffeology::checks::{check_linear_continuous, check_smooth_map, CheckReport};
use crate::diffeology::{Coords, DiffSpace};
use crate::expr::{BoxDomain, SmoothMap, DEFAULT_STEP};
use crate::scalar::int;
use crate::spaces::{make_axes_union, make_euclidean, make_lines_plane, make_plane2_space, make_tangent_planes};

fn exact(v: &[i64]) -> Coords {
    Coords::Exact(v.iter().map(|&x| int(x)).collect())
}

fn curve(comps: &[&str]) -> SmoothMap {
    SmoothMap::parse(BoxDomain::whole(1), comps).expect("literal")
}

fn record(rec: &mut Recorder, prefix: &str, report: Result<CheckReport, String>) {
    match report {
        Ok(r) => {
            for c in r.cases {
                let detail = c.detail.clone();
                rec.case(format!("{prefix}:{}", c.id), || check(c.passed, || json!({"detail": detail})));
            }
        }
        Err(e) => rec.case(prefix.to_string(), || Err(e)),
    }
}

pub fn run(cfg: &VerifyConfig, rec: &mut Recorder) {
    let mut rng = cfg.rng("tds");
    let per_space = (cfg.samples / 8).max(2);
    let spaces: Vec<DiffSpace> =
        vec![make_euclidean(1), make_euclidean(2), make_euclidean(3), make_plane2_space(), make_tangent_planes(), make_lines_plane()];
    for x in &spaces {
        let report = check_linear_continuous(x, &mut rng, per_space).or_error();
        record(rec, &format!("linear:{}", x.name()), report);
    }

    let axes = make_axes_union();
    rec.case("axes:signature", || -> Outcome {
        let v = axes.tangent_class(&curve(&["x0", "0"])).or_error()?;
        check(v.signature == exact(&[1, 0]), || v.to_json())
    });
    rec.case("axes:first-order-equivalence", || -> Outcome {
        let (p, q) = (curve(&["x0", "0"]), curve(&["x0 + x0^2", "0"]));
        let first = axes.equivalent(&p, &q, 1).or_error()?;
        let second = axes.equivalent(&p, &q, 2).or_error()?;
        check(first && !second, || json!({"order1": first, "order2": second}))
    });
    rec.case("axes:tangent-space-origin", || -> Outcome {
        let t = axes.tangent_space(&exact(&[0, 0]), &mut rng, 24).or_error()?;
        check(t.components == vec![1, 1] && !t.is_linear_subspace && t.underline_dimension == 0, || t.to_json())
    });
    rec.case("axes:tangent-space-branch", || -> Outcome {
        let t = axes.tangent_space(&exact(&[1, 0]), &mut rng, 12).or_error()?;
        check(t.dimension == 1 && t.is_linear_subspace, || t.to_json())
    });
    for n in 1..=3 {
        let x = make_euclidean(n);
        rec.case(format!("euclidean:{n}:tangent-space"), || -> Outcome {
            let t = x.tangent_space(&Coords::zero(n), &mut rng, 12).or_error()?;
            check(t.dimension == n && t.is_linear_subspace, || t.to_json())
        });
    }

    let sum = SmoothMap::parse(BoxDomain::whole(2), &["x0 + x1"]).expect("literal");
    let report = check_smooth_map(&sum, &axes, &make_euclidean(1), &mut rng, per_space).or_error();
    record(rec, "smooth:axes-sum", report);
    let (c, s) = (1f64.cos(), 1f64.sin());
    let rot = SmoothMap::black_box(BoxDomain::whole(2), 2, DEFAULT_STEP, move |x| vec![c * x[0] - s * x[1], s * x[0] + c * x[1]]);
    let lines = make_lines_plane();
    let report = check_smooth_map(&rot, &lines, &lines, &mut rng, per_space).or_error();
    record(rec, "smooth:lines-rotation", report);
    let planes = make_tangent_planes();
    let report = check_smooth_map(&SmoothMap::identity(3), &planes, &planes, &mut rng, per_space).or_error();
    record(rec, "smooth:tangent-planes-identity", report);
}
