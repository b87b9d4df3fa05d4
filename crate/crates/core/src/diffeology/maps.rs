//! Building blocks for plaque constructions: lifts, slices and constants.

use crate::expr::{compose, projection, BoxDomain, ExprError, PolyExpr, SmoothMap, DEFAULT_STEP};
use crate::scalar;

use super::values::Coords;

/// `x -> p(x_offset, ..., x_{offset+n-1})` on the larger box `domain`.
pub fn lift(p: &SmoothMap, domain: &BoxDomain, offset: usize) -> Result<SmoothMap, ExprError> {
    compose(p, &projection(domain.clone(), offset, p.in_dim()))
}

/// `r -> (0, .., r, .., 0)` placing `r` at `offset` inside `R^total`.
pub fn inclusion(domain: BoxDomain, total: usize, offset: usize) -> SmoothMap {
    let n = domain.dim();
    let comps = (0..total)
        .map(|i| {
            if (offset..offset + n).contains(&i) {
                PolyExpr::var(n, i - offset)
            } else {
                PolyExpr::zero(n)
            }
        })
        .collect();
    SmoothMap::polynomial(domain, comps).expect("consistent dims")
}

/// The constant map with value `c`.
pub fn constant(domain: BoxDomain, c: &Coords) -> SmoothMap {
    match c {
        Coords::Exact(v) => SmoothMap::constant(domain, v),
        Coords::Approx(v) => {
            let v = v.clone();
            let n = v.len();
            SmoothMap::black_box(domain, n, DEFAULT_STEP, move |_| v.clone())
        }
    }
}

/// First `n` coordinates of a box.
pub fn leading_domain(d: &BoxDomain, n: usize) -> BoxDomain {
    BoxDomain::new(d.lo()[..n].to_vec(), d.hi()[..n].to_vec()).expect("sub-box of a valid box")
}

/// `r -> p(r, 0, ..., 0)` keeping the first `n` variables.
pub fn slice_at_zero(p: &SmoothMap, n: usize) -> Result<SmoothMap, ExprError> {
    let dom = leading_domain(p.domain(), n);
    compose(p, &inclusion(dom, p.in_dim(), 0))
}

/// `r -> d/dx_var p(r, 0, ..., 0)` for `var >= n`.
pub fn partial_at_zero(p: &SmoothMap, n: usize, var: usize) -> Result<SmoothMap, ExprError> {
    let dom = leading_domain(p.domain(), n);
    let total = p.in_dim();
    if let Some(comps) = p.components() {
        let zero = scalar::zero();
        let comps = comps
            .iter()
            .map(|c| {
                let mut d = c.partial(var)?;
                for v in n..total {
                    d = d.specialize(v, &zero);
                }
                Ok(d.truncate_vars(n).expect("trailing variables specialized away"))
            })
            .collect::<Result<Vec<_>, ExprError>>()?;
        return SmoothMap::polynomial(dom, comps);
    }
    let (q, h) = (p.clone(), p.step());
    Ok(SmoothMap::black_box(dom, p.out_dim(), h, move |r| {
        let at = |t: f64| {
            let mut x = r.to_vec();
            x.resize(total, 0.0);
            x[var] = t;
            q.raw_f64(&x)
        };
        crate::expr::stencil(at, h)
    }))
}
