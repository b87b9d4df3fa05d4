//! Named fixture spaces and atlases.

pub mod atlas;
pub mod bump;

use std::sync::Arc;

use thiserror::Error;

use crate::diffeology::charted::{axis_sheet, graph_sheet, identity_sheet, Charted, Sheet};
use crate::diffeology::lines::Lines;
use crate::diffeology::parallels::SphereParallels;
use crate::diffeology::{Coords, DiffSpace};
use crate::expr::{parse_expr, BoxDomain, ExprError, SmoothMap, DEFAULT_STEP};
use crate::exterior::ExteriorError;
use crate::forms::FormsError;

pub use atlas::{Atlas, BundleSection, Chart, ChartFormCollection, FormValue, RecoveredForm};

#[derive(Debug, Error)]
pub enum SpacesError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("point {0} is not covered by any chart")]
    NotCovered(String),
    #[error("local forms disagree on an overlap: {}", .0.to_json())]
    Incompatible(Box<atlas::IncompatibilityWitness>),
    #[error("invalid cutoff: {0}")]
    Cutoff(String),
}

/// A named fixture: a diffeological space, an atlas, or both.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub space: Option<DiffSpace>,
    pub atlas: Option<Atlas>,
}

fn origin(n: usize) -> Vec<Coords> {
    vec![Coords::zero(n)]
}

/// `R^n` with all smooth maps as plaques.
pub fn make_euclidean(n: usize) -> DiffSpace {
    let model = Charted::new("euclidean", n, vec![identity_sheet(&format!("R^{n}"), n)], origin(n));
    DiffSpace::new(&format!("euclidean:{n}"), n, DiffSpace::coordinate_generators(n), Arc::new(model), true)
}

/// The union of the two coordinate axes of the plane.
pub fn make_axes_union() -> DiffSpace {
    let model = Charted::new("axes", 2, vec![axis_sheet("x-axis", 2, 0), axis_sheet("y-axis", 2, 1)], origin(2));
    DiffSpace::new("axes", 2, DiffSpace::coordinate_generators(2), Arc::new(model), false)
}

/// The plane whose plaques have image in a straight line.
pub fn make_lines_plane() -> DiffSpace {
    DiffSpace::new("lines", 2, DiffSpace::coordinate_generators(2), Arc::new(Lines::new(2)), false)
}

/// The unit sphere whose plaques lie in parallels.
pub fn make_sphere_parallels() -> DiffSpace {
    DiffSpace::new("sphere_parallels", 3, DiffSpace::coordinate_generators(3), Arc::new(SphereParallels), false)
}

/// The plane `z = 0` and the paraboloid `z = x^2 + y^2`, tangent at the origin.
pub fn make_tangent_planes() -> DiffSpace {
    let plane = graph_sheet("plane z=0", 2, &[parse_expr("0", 2).expect("literal")]);
    let bowl = graph_sheet("paraboloid z=x^2+y^2", 2, &[parse_expr("x0^2 + x1^2", 2).expect("literal")]);
    let model = Charted::new("tangent_planes", 3, vec![plane, bowl], origin(3));
    DiffSpace::new("tangent_planes", 3, DiffSpace::coordinate_generators(3), Arc::new(model), true)
}

/// Second chart of the plane: `(u, v) -> (2u + 1, v + u^2)`.
fn plane2_chart() -> (SmoothMap, SmoothMap) {
    let d = BoxDomain::whole(2);
    let fwd = SmoothMap::parse(d.clone(), &["2*x0 + 1", "x1 + x0^2"]).expect("literal");
    let inv = SmoothMap::parse(d, &["1/2*x0 - 1/2", "x1 - (1/2*x0 - 1/2)^2"]).expect("literal");
    (fwd, inv)
}

/// The plane with the identity chart and a nonlinear polynomial chart.
pub fn make_plane2_atlas() -> Atlas {
    let (fwd, inv) = plane2_chart();
    Atlas::new(
        "atlas:plane2",
        vec![Chart::global("identity", SmoothMap::identity(2), SmoothMap::identity(2)), Chart::global("shifted", fwd, inv)],
    )
}

/// The plane with the same two charts, as a diffeological space.
pub fn make_plane2_space() -> DiffSpace {
    let (fwd, inv) = plane2_chart();
    let sheets = vec![identity_sheet("identity", 2), Sheet::new("shifted", fwd, inv)];
    let model = Charted::new("atlas", 2, sheets, origin(2));
    DiffSpace::new("atlas:plane2", 2, DiffSpace::coordinate_generators(2), Arc::new(model), true)
}

const POLE_MARGIN: f64 = 1e-3;

/// Stereographic charts of the unit sphere in `R^{d+1}` from the north and south poles.
fn stereographic_atlas(name: &str, d: usize) -> Atlas {
    let n = d + 1;
    let chart = |sign: f64| {
        let fwd = SmoothMap::black_box(BoxDomain::whole(d), n, DEFAULT_STEP, move |u| {
            let s: f64 = u.iter().map(|x| x * x).sum();
            let mut x: Vec<f64> = u.iter().map(|c| 2.0 * c / (1.0 + s)).collect();
            x.push(sign * (s - 1.0) / (1.0 + s));
            x
        });
        let inv = SmoothMap::black_box(BoxDomain::whole(n), d, DEFAULT_STEP, move |x| {
            let den = 1.0 - sign * x[x.len() - 1];
            x[..x.len() - 1].iter().map(|c| c / den).collect()
        });
        (fwd, inv)
    };
    let (nf, ni) = chart(1.0);
    let (sf, si) = chart(-1.0);
    Atlas::new(
        name,
        vec![
            Chart::new("from north pole", nf, ni, |x: &[f64]| x[x.len() - 1] < 1.0 - POLE_MARGIN),
            Chart::new("from south pole", sf, si, |x: &[f64]| x[x.len() - 1] > -1.0 + POLE_MARGIN),
        ],
    )
}

pub fn make_circle2_atlas() -> Atlas {
    stereographic_atlas("atlas:circle2", 1)
}

pub fn make_sphere2_atlas() -> Atlas {
    stereographic_atlas("atlas:sphere2", 2)
}

pub const FIXTURE_NAMES: &[&str] = &[
    "euclidean:N",
    "axes",
    "lines",
    "sphere_parallels",
    "tangent_planes",
    "atlas:plane2",
    "atlas:circle2",
    "atlas:sphere2",
];

/// Looks a fixture up by its CLI name.
pub fn by_name(name: &str) -> Result<Fixture, SpacesError> {
    let fixture = |space: Option<DiffSpace>, atlas: Option<Atlas>| Fixture { name: name.to_string(), space, atlas };
    if let Some(n) = name.strip_prefix("euclidean:") {
        let n: usize = n.parse().map_err(|_| SpacesError::UnknownFixture(name.into()))?;
        if n == 0 {
            return Err(SpacesError::UnknownFixture(name.into()));
        }
        return Ok(fixture(Some(make_euclidean(n)), None));
    }
    Ok(match name {
        "axes" => fixture(Some(make_axes_union()), None),
        "lines" => fixture(Some(make_lines_plane()), None),
        "sphere_parallels" => fixture(Some(make_sphere_parallels()), None),
        "tangent_planes" => fixture(Some(make_tangent_planes()), None),
        "atlas:plane2" => fixture(Some(make_plane2_space()), Some(make_plane2_atlas())),
        "atlas:circle2" => fixture(None, Some(make_circle2_atlas())),
        "atlas:sphere2" => fixture(None, Some(make_sphere2_atlas())),
        _ => return Err(SpacesError::UnknownFixture(name.into())),
    })
}
