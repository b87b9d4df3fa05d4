//! Jets of maps at the origin of their domain.

use std::collections::BTreeMap;

use super::{factorial_product, stencil, ExprError, PolyExpr, SmoothMap};
use crate::scalar::{Rational, Scalar};

/// All exponent vectors in `n` variables with total degree `<= order`, graded then lexicographic.
pub fn multi_indices_up_to(n: usize, order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 0..=order {
        let mut cur = vec![0u32; n];
        push_degree(n, d, 0, &mut cur, &mut out);
    }
    out
}

fn push_degree(n: usize, remaining: u32, at: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if n == 0 {
        if remaining == 0 {
            out.push(vec![]);
        }
        return;
    }
    if at == n - 1 {
        cur[at] = remaining;
        out.push(cur.clone());
        cur[at] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        cur[at] = k;
        push_degree(n, remaining - k, at + 1, cur, out);
    }
    cur[at] = 0;
}

/// Partial derivatives `D^alpha f_i(0)` keyed by `alpha`, one map per component.
#[derive(Clone, Debug, PartialEq)]
pub enum JetData {
    Exact(Vec<BTreeMap<Vec<u32>, Rational>>),
    Approx(Vec<BTreeMap<Vec<u32>, f64>>),
}

/// Jet of a map at the origin up to a given order.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub in_dim: usize,
    pub order: u32,
    pub data: JetData,
}

impl Jet {
    pub fn out_dim(&self) -> usize {
        match &self.data {
            JetData::Exact(c) => c.len(),
            JetData::Approx(c) => c.len(),
        }
    }

    pub fn coefficient_count(&self) -> usize {
        match &self.data {
            JetData::Exact(c) => c.iter().map(BTreeMap::len).sum(),
            JetData::Approx(c) => c.iter().map(BTreeMap::len).sum(),
        }
    }

    /// `D^alpha f_i(0)` as a float, whichever mode.
    pub fn derivative_f64(&self, component: usize, alpha: &[u32]) -> Option<f64> {
        match &self.data {
            JetData::Exact(c) => c.get(component)?.get(alpha).map(Scalar::to_f64),
            JetData::Approx(c) => c.get(component)?.get(alpha).copied(),
        }
    }

    pub fn derivative(&self, component: usize, alpha: &[u32]) -> Option<&Rational> {
        match &self.data {
            JetData::Exact(c) => c.get(component)?.get(alpha),
            JetData::Approx(_) => None,
        }
    }

    /// Taylor polynomial `sum_alpha D^alpha f(0) x^alpha / alpha!` (exact jets only).
    pub fn taylor(&self) -> Option<Vec<PolyExpr>> {
        let JetData::Exact(comps) = &self.data else {
            return None;
        };
        comps
            .iter()
            .map(|c| {
                PolyExpr::from_terms(
                    self.in_dim,
                    c.iter().map(|(a, v)| (a.clone(), v / factorial_product(a))),
                )
                .ok()
            })
            .collect()
    }

    /// Agreement of all coefficients; mixed modes compare in floating point.
    pub fn agrees_with(&self, other: &Jet, tol: f64) -> bool {
        if self.in_dim != other.in_dim || self.out_dim() != other.out_dim() {
            return false;
        }
        match (&self.data, &other.data) {
            (JetData::Exact(a), JetData::Exact(b)) => a == b,
            _ => {
                let order = self.order.min(other.order);
                (0..self.out_dim()).all(|i| {
                    multi_indices_up_to(self.in_dim, order).iter().all(|alpha| {
                        match (self.derivative_f64(i, alpha), other.derivative_f64(i, alpha)) {
                            (Some(x), Some(y)) => (x - y).abs() <= tol,
                            _ => false,
                        }
                    })
                })
            }
        }
    }
}

/// Derivatives of `f` at the origin up to `order`: exact for polynomial maps,
/// nested five-point central differences for black-box maps.
pub fn jet_at_zero(f: &SmoothMap, order: u32) -> Result<Jet, ExprError> {
    let m = f.in_dim();
    if !f.domain().contains_origin() {
        return Err(ExprError::OriginOutsideDomain);
    }
    let alphas = multi_indices_up_to(m, order);
    let data = match f.components() {
        Some(comps) => {
            f.eval(&vec![crate::scalar::zero(); m])?;
            JetData::Exact(
                comps
                    .iter()
                    .map(|c| {
                        alphas
                            .iter()
                            .map(|a| {
                                let coeff = c.coefficient(a);
                                (a.clone(), coeff * factorial_product(a))
                            })
                            .collect()
                    })
                    .collect(),
            )
        }
        None => {
            f.eval_f64(&vec![0.0; m])?;
            let h = f.step();
            let mut comps = vec![BTreeMap::new(); f.out_dim()];
            for a in &alphas {
                let vals = nested_derivative(f, a, h);
                for (i, v) in vals.into_iter().enumerate() {
                    comps[i].insert(a.clone(), v);
                }
            }
            JetData::Approx(comps)
        }
    };
    Ok(Jet { in_dim: m, order, data })
}

fn nested_derivative(f: &SmoothMap, alpha: &[u32], h: f64) -> Vec<f64> {
    let m = alpha.len();
    // Differentiate one variable at a time, innermost first.
    let mut dirs = Vec::new();
    for (j, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            dirs.push(j);
        }
    }
    fn go(f: &SmoothMap, x: &mut Vec<f64>, dirs: &[usize], h: f64) -> Vec<f64> {
        match dirs.split_first() {
            None => f.raw_f64(x),
            Some((&j, rest)) => stencil(
                |t| {
                    let mut y = x.clone();
                    y[j] += t;
                    go(f, &mut y, rest, h)
                },
                h,
            ),
        }
    }
    let mut x = vec![0.0; m];
    go(f, &mut x, &dirs, h)
}
