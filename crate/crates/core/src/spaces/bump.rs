//! Extension of a local vector field by a C^1 piecewise-polynomial cutoff.

use crate::diffeology::SpaceVectorField;
use crate::expr::{SmoothMap, DEFAULT_STEP};

use super::SpacesError;

/// `1` on `[0, inner]`, `0` on `[outer, inf)`, cubic smoothstep in between.
pub fn cutoff(t: f64, inner: f64, outer: f64) -> f64 {
    let t = t.abs();
    if t <= inner {
        1.0
    } else if t >= outer {
        0.0
    } else {
        let s = (outer - t) / (outer - inner);
        s * s * (3.0 - 2.0 * s)
    }
}

/// The bump `g(x) = prod_j cutoff(x_j - c_j)`: equal to 1 on the cube `V` of half-width
/// `inner` about `center`, vanishing outside the cube `U` of half-width `outer`.
pub fn bump(center: &[f64], inner: f64, outer: f64) -> impl Fn(&[f64]) -> f64 + Send + Sync + Clone + 'static {
    let c = center.to_vec();
    move |x: &[f64]| x.iter().zip(&c).map(|(a, b)| cutoff(a - b, inner, outer)).product()
}

/// `g xi` as a global field on `R^N`.
pub fn bump_extension(local: &SmoothMap, center: &[f64], inner: f64, outer: f64) -> Result<SpaceVectorField, SpacesError> {
    if !(inner > 0.0 && inner < outer) {
        return Err(SpacesError::Cutoff(format!("need 0 < inner < outer, got {inner} and {outer}")));
    }
    if local.in_dim() != center.len() || local.out_dim() != center.len() {
        return Err(SpacesError::DimensionMismatch { expected: center.len(), found: local.in_dim() });
    }
    let g = bump(center, inner, outer);
    let f = local.clone();
    let n = center.len();
    let velocity = SmoothMap::black_box(crate::expr::BoxDomain::whole(n), n, DEFAULT_STEP, move |x| {
        let s = g(x);
        if s == 0.0 {
            vec![0.0; x.len()]
        } else {
            f.eval_f64(x).map(|v| v.iter().map(|c| s * c).collect()).unwrap_or_else(|_| vec![0.0; x.len()])
        }
    });
    Ok(SpaceVectorField::new("bump extension", velocity))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_c1_at_the_seams() {
        let h = 1e-7;
        for seam in [0.5, 1.0] {
            let left = (cutoff(seam, 0.5, 1.0) - cutoff(seam - h, 0.5, 1.0)) / h;
            let right = (cutoff(seam + h, 0.5, 1.0) - cutoff(seam, 0.5, 1.0)) / h;
            assert!(left.abs() < 1e-5 && right.abs() < 1e-5);
        }
        assert_eq!(cutoff(0.2, 0.5, 1.0), 1.0);
        assert_eq!(cutoff(1.2, 0.5, 1.0), 0.0);
    }
}
