//! Alternating multilinear forms on `R^n` in the basis `x_I = x_{i1} ^ ... ^ x_{ik}`.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::scalar::{self, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("expected {expected} vectors, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("multi-index {0:?} is not strictly increasing within the ambient dimension")]
    InvalidIndex(Vec<usize>),
    #[error("basis is not orthonormal: gram entry ({0}, {1})")]
    NotOrthonormal(usize, usize),
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// Strictly increasing tuple of coordinate indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self, ExteriorError> {
        let increasing = indices.windows(2).all(|w| w[0] < w[1]);
        if !increasing || indices.last().is_some_and(|&m| m >= dim) {
            return Err(ExteriorError::InvalidIndex(indices));
        }
        Ok(MultiIndex(indices))
    }

    pub fn empty() -> Self {
        MultiIndex(vec![])
    }

    pub fn single(i: usize) -> Self {
        MultiIndex(vec![i])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All increasing `k`-subsets of `0..n` in lexicographic order.
    pub fn all(n: usize, k: usize) -> Vec<MultiIndex> {
        fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if cur.len() == k {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..n {
                if n - i < k - cur.len() {
                    break;
                }
                cur.push(i);
                go(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if k <= n {
            go(0, n, k, &mut Vec::with_capacity(k), &mut out);
        }
        out
    }

    /// Sorted union of disjoint indices and the sign of the sorting permutation;
    /// `None` when the two share an index.
    pub fn merge(a: &MultiIndex, b: &MultiIndex) -> Option<(bool, MultiIndex)> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let mut inversions = 0usize;
        while i < a.0.len() || j < b.0.len() {
            if j == b.0.len() || (i < a.0.len() && a.0[i] < b.0[j]) {
                out.push(a.0[i]);
                i += 1;
            } else if i == a.0.len() || b.0[j] < a.0[i] {
                // b[j] jumps over the remaining elements of a
                inversions += a.0.len() - i;
                out.push(b.0[j]);
                j += 1;
            } else {
                return None;
            }
        }
        Some((inversions % 2 == 1, MultiIndex(out)))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| format!("x{i}")).collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("^"))
        }
    }
}

/// An alternating `degree`-linear form on `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExteriorForm<S: Scalar = Rational> {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> ExteriorForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        ExteriorForm { dim, degree, coeffs: BTreeMap::new() }
    }

    /// Degree-0 form with value `c`.
    pub fn scalar(dim: usize, c: S) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(MultiIndex::empty(), c);
        }
        ExteriorForm { dim, degree: 0, coeffs }
    }

    /// The basis form `x_I`.
    pub fn basis(dim: usize, idx: MultiIndex) -> Self {
        let degree = idx.len();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(idx, S::one());
        ExteriorForm { dim, degree, coeffs }
    }

    /// The coordinate projection `x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        Self::basis(dim, MultiIndex::single(i))
    }

    /// The 1-form `xi -> (xi, y)`.
    pub fn covector(y: &[S]) -> Self {
        let coeffs = y
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (MultiIndex::single(i), c.clone()))
            .collect();
        ExteriorForm { dim: y.len(), degree: 1, coeffs }
    }

    /// The volume form `x_0 ^ ... ^ x_{n-1}`.
    pub fn volume(dim: usize) -> Self {
        Self::basis(dim, MultiIndex((0..dim).collect()))
    }

    pub fn from_coeffs<I>(dim: usize, degree: usize, coeffs: I) -> Result<Self, ExteriorError>
    where
        I: IntoIterator<Item = (Vec<usize>, S)>,
    {
        let mut out = Self::zero(dim, degree);
        for (idx, c) in coeffs {
            if idx.len() != degree {
                return Err(ExteriorError::InvalidIndex(idx));
            }
            let idx = MultiIndex::new(idx, dim)?;
            out.add_term(idx, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, idx: MultiIndex, c: S) {
        let sum = self.coefficient(&idx) + c;
        if sum.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, S> {
        &self.coeffs
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> S {
        self.coeffs.get(idx).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient vector of a 1-form.
    pub fn as_vector(&self) -> Option<Vec<S>> {
        (self.degree == 1).then(|| (0..self.dim).map(|i| self.coefficient(&MultiIndex::single(i))).collect())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim, self.degree);
        }
        ExteriorForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v.clone() * c.clone())).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.degree != other.degree {
            return Err(ExteriorError::Arity { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.add(&other.scale(&(-S::one())))
    }

    /// `omega(v_1, ..., v_k) = sum_I c_I det(v[I])`.
    pub fn evaluate(&self, vectors: &[Vec<S>]) -> Result<S, ExteriorError> {
        if vectors.len() != self.degree {
            return Err(ExteriorError::Arity { expected: self.degree, found: vectors.len() });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.dim) {
            return Err(ExteriorError::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let mut acc = S::zero();
        for (idx, c) in &self.coeffs {
            // rows = vectors, columns = selected coordinates
            let m: Matrix<S> = vectors
                .iter()
                .map(|v| idx.as_slice().iter().map(|&i| v[i].clone()).collect())
                .collect();
            acc = acc + c.clone() * linalg::det(&m);
        }
        Ok(acc)
    }

    /// Wedge product by merging multi-indices; no factorial normalization.
    pub fn wedge(&self, other: &Self) -> Result<Self, ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = Self::zero(self.dim, self.degree + other.degree);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if let Some((neg, idx)) = MultiIndex::merge(a, b) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(idx, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `L^* omega` for `L: R^m -> R^dim` given as a `dim x m` matrix (Cauchy-Binet).
    pub fn pullback_linear(&self, l: &Matrix<S>) -> Result<Self, ExteriorError> {
        let (rows, m) = linalg::shape(l);
        if rows != self.dim {
            return Err(ExteriorError::DimensionMismatch { expected: self.dim, found: rows });
        }
        if l.iter().any(|r| r.len() != m) {
            return Err(ExteriorError::DimensionMismatch { expected: m, found: 0 });
        }
        let mut out = Self::zero(m, self.degree);
        for j in MultiIndex::all(m, self.degree) {
            let mut acc = S::zero();
            for (i, c) in &self.coeffs {
                acc = acc + c.clone() * linalg::det(&linalg::submatrix(l, i.as_slice(), j.as_slice()));
            }
            if !acc.is_zero() {
                out.coeffs.insert(j, acc);
            }
        }
        Ok(out)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ExteriorForm<T> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        ExteriorForm { dim: self.dim, degree: self.degree, coeffs }
    }

    pub fn to_f64(&self) -> ExteriorForm<f64> {
        self.map_scalar(Scalar::to_f64)
    }

    /// Coefficientwise comparison with absolute tolerance (exact for rationals).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self.degree == other.degree
            && self
                .coeffs
                .keys()
                .chain(other.coeffs.keys())
                .all(|k| self.coefficient(k).approx_eq(&other.coefficient(k), tol))
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for ExteriorForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(k, v)| format!("{v}*{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl ExteriorForm<Rational> {
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(k, v)| {
                json!({
                    "idx": k.as_slice(),
                    "num": scalar::bigint_to_json(v.numer()),
                    "den": scalar::bigint_to_json(v.denom()),
                })
            })
            .collect();
        json!({ "dim": self.dim, "degree": self.degree, "coeffs": coeffs })
    }

    pub fn from_json(v: &Value) -> Result<Self, ExteriorError> {
        let bad = |m: &str| ExteriorError::Json(m.to_string());
        let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| bad("missing \"dim\""))? as usize;
        let degree = v.get("degree").and_then(Value::as_u64).ok_or_else(|| bad("missing \"degree\""))? as usize;
        let coeffs = v.get("coeffs").and_then(Value::as_array).ok_or_else(|| bad("missing \"coeffs\""))?;
        let mut terms = Vec::new();
        for c in coeffs {
            let idx = c
                .get("idx")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("coefficient missing \"idx\""))?
                .iter()
                .map(|i| i.as_u64().map(|i| i as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("index entries must be non-negative integers"))?;
            let val = scalar::rational_from_num_den(
                c.get("num").ok_or_else(|| bad("coefficient missing \"num\""))?,
                c.get("den").unwrap_or(&json!(1)),
            )
            .ok_or_else(|| bad("bad rational coefficient"))?;
            terms.push((idx, val));
        }
        Self::from_coeffs(dim, degree, terms)
    }
}

/// `det(omega_j(xi_i))` for covectors `omega_j` and vectors `xi_i`.
pub fn decomposable_eval<S: Scalar>(covectors: &[ExteriorForm<S>], vectors: &[Vec<S>]) -> Result<S, ExteriorError> {
    if covectors.len() != vectors.len() {
        return Err(ExteriorError::Arity { expected: covectors.len(), found: vectors.len() });
    }
    if let Some(c) = covectors.iter().find(|c| c.degree != 1) {
        return Err(ExteriorError::Arity { expected: 1, found: c.degree });
    }
    let m = vectors
        .iter()
        .map(|xi| {
            covectors
                .iter()
                .map(|w| w.evaluate(std::slice::from_ref(xi)))
                .collect::<Result<Vec<S>, _>>()
        })
        .collect::<Result<Matrix<S>, _>>()?;
    Ok(linalg::det(&m))
}

/// Wedge of a list of forms; the empty product is the scalar 1.
pub fn wedge_all<S: Scalar>(dim: usize, forms: &[ExteriorForm<S>]) -> Result<ExteriorForm<S>, ExteriorError> {
    forms.iter().try_fold(ExteriorForm::scalar(dim, S::one()), |acc, f| acc.wedge(f))
}

/// The form measuring the oriented volume of the projection onto `span(beta)`:
/// the wedge of the covectors `xi -> (xi, beta_j)`.
pub fn projection_volume_form<S: Scalar>(beta: &[Vec<S>], tol: f64) -> Result<ExteriorForm<S>, ExteriorError> {
    let dim = beta.first().map_or(0, Vec::len);
    if let Some(b) = beta.iter().find(|b| b.len() != dim) {
        return Err(ExteriorError::DimensionMismatch { expected: dim, found: b.len() });
    }
    for i in 0..beta.len() {
        for j in 0..=i {
            let g = linalg::dot(&beta[i], &beta[j]);
            let want = if i == j { S::one() } else { S::zero() };
            if !g.approx_eq(&want, tol) {
                return Err(ExteriorError::NotOrthonormal(i, j));
            }
        }
    }
    let covectors: Vec<ExteriorForm<S>> = beta.iter().map(|b| ExteriorForm::covector(b)).collect();
    wedge_all(dim, &covectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn cov(v: &[i64]) -> ExteriorForm {
        ExteriorForm::covector(&v.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    fn vecs(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn merge_signs() {
        let a = MultiIndex(vec![1]);
        let b = MultiIndex(vec![0]);
        assert_eq!(MultiIndex::merge(&a, &b), Some((true, MultiIndex(vec![0, 1]))));
        assert_eq!(MultiIndex::merge(&b, &a), Some((false, MultiIndex(vec![0, 1]))));
        assert_eq!(MultiIndex::merge(&a, &a), None);
        // (0,2) ^ (1,3): one inversion
        let (neg, m) = MultiIndex::merge(&MultiIndex(vec![0, 2]), &MultiIndex(vec![1, 3])).unwrap();
        assert!(neg);
        assert_eq!(m.as_slice(), &[0, 1, 2, 3]);
    }

    #[test]
    fn multi_index_validation() {
        assert!(MultiIndex::new(vec![0, 2], 3).is_ok());
        assert!(MultiIndex::new(vec![2, 0], 3).is_err());
        assert!(MultiIndex::new(vec![0, 3], 3).is_err());
        assert_eq!(MultiIndex::all(4, 2).len(), 6);
        assert!(MultiIndex::all(2, 3).is_empty());
    }

    #[test]
    fn basis_two_form_on_standard_pair() {
        let w = ExteriorForm::<Rational>::volume(2);
        assert_eq!(w.evaluate(&vecs(&[&[1, 0], &[0, 1]])).unwrap(), int(1));
        assert_eq!(w.evaluate(&vecs(&[&[3, 1], &[3, 1]])).unwrap(), int(0));
    }

    #[test]
    fn wedge_of_coordinates_is_basis_form() {
        let w = ExteriorForm::<Rational>::coordinate(3, 1).wedge(&ExteriorForm::coordinate(3, 2)).unwrap();
        assert_eq!(w, ExteriorForm::basis(3, MultiIndex(vec![1, 2])));
        assert!(w.wedge(&ExteriorForm::zero(3, 1)).unwrap().is_zero());
    }

    #[test]
    fn two_covectors_on_two_vectors() {
        let (a, b) = (cov(&[1, 2, 0]), cov(&[0, -1, 3]));
        let (x, y) = (vec![int(2), int(1), int(1)], vec![int(-1), int(0), int(4)]);
        let lhs = a.wedge(&b).unwrap().evaluate(&[x.clone(), y.clone()]).unwrap();
        let a_ = |v: &Vec<Rational>| a.evaluate(std::slice::from_ref(v)).unwrap();
        let b_ = |v: &Vec<Rational>| b.evaluate(std::slice::from_ref(v)).unwrap();
        let rhs = a_(&x) * b_(&y) - b_(&x) * a_(&y);
        assert_eq!(lhs, rhs);
        assert_eq!(decomposable_eval(&[a, b], &[x, y]).unwrap(), rhs);
    }

    #[test]
    fn arity_and_dimension_errors() {
        let w = ExteriorForm::<Rational>::volume(2);
        assert!(matches!(w.evaluate(&vecs(&[&[1, 0]])), Err(ExteriorError::Arity { .. })));
        assert!(matches!(w.evaluate(&vecs(&[&[1, 0, 0], &[0, 1, 0]])), Err(ExteriorError::DimensionMismatch { .. })));
        assert!(w.wedge(&ExteriorForm::coordinate(3, 0)).is_err());
    }

    #[test]
    fn pullback_by_diagonal() {
        let w = ExteriorForm::<Rational>::volume(2);
        let l = vec![vec![int(2), int(0)], vec![int(0), int(3)]];
        assert_eq!(w.pullback_linear(&l).unwrap(), w.scale(&int(6)));
        assert_eq!(w.pullback_linear(&linalg::identity(2)).unwrap(), w);
    }

    #[test]
    fn degree_above_dimension_is_zero() {
        let w = cov(&[1, 2]).wedge(&cov(&[3, 4])).unwrap().wedge(&cov(&[5, 6])).unwrap();
        assert!(w.is_zero());
        assert_eq!(w.degree(), 3);
    }

    #[test]
    fn projection_forms() {
        let b = vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]];
        assert_eq!(projection_volume_form(&b, 0.0).unwrap(), ExteriorForm::basis(3, MultiIndex(vec![0, 1])));
        let b = vec![vec![rat(3, 5), rat(4, 5)]];
        let w = projection_volume_form(&b, 0.0).unwrap();
        assert_eq!(w.evaluate(&[vec![int(1), int(0)]]).unwrap(), rat(3, 5));
        assert!(matches!(
            projection_volume_form(&[vec![int(1), int(1)]], 0.0),
            Err(ExteriorError::NotOrthonormal(0, 0))
        ));
    }

    #[test]
    fn json_round_trip() {
        let w = ExteriorForm::from_coeffs(3, 2, vec![(vec![0, 2], rat(-7, 3)), (vec![1, 2], int(5))]).unwrap();
        assert_eq!(ExteriorForm::from_json(&w.to_json()).unwrap(), w);
    }
}
