//! Interface each fixture geometry implements.

use rand_chacha::ChaCha8Rng;

use crate::expr::SmoothMap;

use super::values::{Coords, JetMatrix};
use super::JoinMode;

/// Outcome of a fixture-level construction attempt.
#[derive(Clone, Debug)]
pub enum Attempt {
    Found { map: SmoothMap, construction: String },
    Obstructed(String),
}

/// Which sheets or branches of a space contain a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub branches: Vec<String>,
}

/// Geometry-specific decision rules and constructors behind a [`super::DiffSpace`].
///
/// Constructions here are candidates; the caller re-verifies every returned map.
pub trait SpaceModel: Send + Sync {
    fn kind(&self) -> &'static str;

    /// Zero for exact models.
    fn tolerance(&self) -> f64;

    fn classify(&self, x: &Coords) -> Membership;

    /// `Ok(())` when `m` is a plaque, `Err(reason)` otherwise.
    fn plaque_decision(&self, m: &SmoothMap) -> Result<(), String>;

    /// A plaque `R^n -> X` at `base` with ambient first derivatives `jet` (`N x n`).
    fn realize_jet(&self, base: &Coords, jet: &JetMatrix) -> Attempt;

    /// Joint `(n+m)`-plaque of two plaques at `base`.
    fn join(&self, p1: &SmoothMap, p2: &SmoothMap, base: &Coords, mode: JoinMode) -> Attempt;

    /// Plaque `q(r, t_1, ..., t_k)` with `q(r, 0) = p0(r)` and `d/dt_i q(r, 0) = w_i(r)`.
    fn flow(&self, p0: &SmoothMap, velocities: &[SmoothMap]) -> Attempt;

    /// Pointwise-matching `(n+2)`-plaque for two `(n+1)`-plaques agreeing at `t = 0`.
    fn weaker_join(&self, p1: &SmoothMap, p2: &SmoothMap) -> Attempt;

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Coords;

    fn sample_plaque(&self, rng: &mut ChaCha8Rng, base: &Coords, dim: usize) -> SmoothMap;

    /// Points the fixture singles out (branch points, poles).
    fn special_points(&self) -> Vec<Coords>;
}
