//! Points, jet signatures and first-order jet matrices, exact or floating.

use crate::expr::{jet_at_zero, JetData, SmoothMap};
use crate::linalg::{self, Matrix};
use crate::scalar::{self, Rational, Scalar};

use super::DiffError;

/// A coordinate vector; exact when every ingredient was exact.
#[derive(Clone, Debug, PartialEq)]
pub enum Coords {
    Exact(Vec<Rational>),
    Approx(Vec<f64>),
}

impl Coords {
    pub fn len(&self) -> usize {
        match self {
            Coords::Exact(v) => v.len(),
            Coords::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn zero(n: usize) -> Self {
        Coords::Exact(vec![scalar::zero(); n])
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Coords::Exact(v) => scalar::to_f64_vec(v),
            Coords::Approx(v) => v.clone(),
        }
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        match self {
            Coords::Exact(v) => Some(v),
            Coords::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coords::Exact(_))
    }

    /// Exact equality when both sides are exact, otherwise absolute tolerance.
    pub fn approx_eq(&self, other: &Coords, tol: f64) -> bool {
        match (self, other) {
            (Coords::Exact(a), Coords::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
            }
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.approx_eq(&Coords::zero(self.len()), tol)
    }

    pub fn add(&self, other: &Coords) -> Coords {
        match (self, other) {
            (Coords::Exact(a), Coords::Exact(b)) => Coords::Exact(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            _ => Coords::Approx(self.to_f64().iter().zip(other.to_f64()).map(|(x, y)| x + y).collect()),
        }
    }

    pub fn scale(&self, c: &Rational) -> Coords {
        match self {
            Coords::Exact(a) => Coords::Exact(a.iter().map(|x| x * c).collect()),
            Coords::Approx(a) => Coords::Approx(a.iter().map(|x| x * c.to_f64()).collect()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Coords::Exact(v) => v.iter().map(scalar::rational_to_json).collect(),
            Coords::Approx(v) => v.iter().map(|x| serde_json::json!(x)).collect(),
        }
    }
}

/// An `N x n` matrix of first derivatives, exact or floating.
#[derive(Clone, Debug, PartialEq)]
pub enum JetMatrix {
    Exact(Matrix<Rational>),
    Approx(Matrix<f64>),
}

impl JetMatrix {
    pub fn rows(&self) -> usize {
        match self {
            JetMatrix::Exact(m) => m.len(),
            JetMatrix::Approx(m) => m.len(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            JetMatrix::Exact(m) => linalg::shape(m).1,
            JetMatrix::Approx(m) => linalg::shape(m).1,
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        match self {
            JetMatrix::Exact(m) => m.iter().map(|r| scalar::to_f64_vec(r)).collect(),
            JetMatrix::Approx(m) => m.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Matrix<Rational>> {
        match self {
            JetMatrix::Exact(m) => Some(m),
            JetMatrix::Approx(_) => None,
        }
    }

    pub fn column(&self, j: usize) -> Coords {
        match self {
            JetMatrix::Exact(m) => Coords::Exact(m.iter().map(|r| r[j].clone()).collect()),
            JetMatrix::Approx(m) => Coords::Approx(m.iter().map(|r| r[j]).collect()),
        }
    }

    pub fn from_columns(cols: &[Coords], rows: usize) -> JetMatrix {
        if cols.iter().all(Coords::is_exact) {
            let c: Vec<Vec<Rational>> = cols.iter().map(|c| c.exact().expect("exact").to_vec()).collect();
            JetMatrix::Exact(if c.is_empty() { vec![vec![]; rows] } else { linalg::from_columns(&c) })
        } else {
            let c: Vec<Vec<f64>> = cols.iter().map(Coords::to_f64).collect();
            JetMatrix::Approx(if c.is_empty() { vec![vec![]; rows] } else { linalg::from_columns(&c) })
        }
    }

    /// Side-by-side concatenation `[self | other]`.
    pub fn hcat(&self, other: &JetMatrix) -> JetMatrix {
        let mut cols: Vec<Coords> = (0..self.cols()).map(|j| self.column(j)).collect();
        cols.extend((0..other.cols()).map(|j| other.column(j)));
        JetMatrix::from_columns(&cols, self.rows())
    }

    pub fn add(&self, other: &JetMatrix) -> JetMatrix {
        let cols: Vec<Coords> = (0..self.cols()).map(|j| self.column(j).add(&other.column(j))).collect();
        JetMatrix::from_columns(&cols, self.rows())
    }

    pub fn scale(&self, c: &Rational) -> JetMatrix {
        let cols: Vec<Coords> = (0..self.cols()).map(|j| self.column(j).scale(c)).collect();
        JetMatrix::from_columns(&cols, self.rows())
    }

    pub fn approx_eq(&self, other: &JetMatrix, tol: f64) -> bool {
        match (self, other) {
            (JetMatrix::Exact(a), JetMatrix::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                linalg::shape(&a) == linalg::shape(&b)
                    && a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).abs() <= tol)
            }
        }
    }

    /// Rank, with entries below `tol` (relative to the largest entry) treated as zero.
    pub fn rank(&self, tol: f64) -> usize {
        match self {
            JetMatrix::Exact(m) => linalg::rank(m, 0.0),
            JetMatrix::Approx(m) => {
                let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
                if scale == 0.0 {
                    0
                } else {
                    linalg::rank(m, tol * scale.max(1.0))
                }
            }
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        (0..self.cols()).all(|j| self.column(j).is_zero(tol))
    }
}

/// Value at the origin of a map, exact when polynomial.
pub fn base_point(p: &SmoothMap) -> Result<Coords, DiffError> {
    let n = p.in_dim();
    if p.is_polynomial() {
        Ok(Coords::Exact(p.eval(&vec![scalar::zero(); n])?))
    } else {
        Ok(Coords::Approx(p.eval_f64(&vec![0.0; n])?))
    }
}

/// Jacobian at the origin, exact when polynomial.
pub fn jacobian_at_zero(p: &SmoothMap) -> Result<JetMatrix, DiffError> {
    let jet = jet_at_zero(p, 1)?;
    let n = p.in_dim();
    let unit = |j: usize| -> Vec<u32> { (0..n).map(|i| u32::from(i == j)).collect() };
    Ok(match &jet.data {
        JetData::Exact(c) => JetMatrix::Exact(
            c.iter()
                .map(|comp| (0..n).map(|j| comp.get(&unit(j)).cloned().unwrap_or_else(scalar::zero)).collect())
                .collect(),
        ),
        JetData::Approx(c) => JetMatrix::Approx(
            c.iter()
                .map(|comp| (0..n).map(|j| comp.get(&unit(j)).copied().unwrap_or(0.0)).collect())
                .collect(),
        ),
    })
}

/// `A x` for an exact or floating matrix and vector.
pub fn mat_vec(a: &JetMatrix, x: &Coords) -> Coords {
    match (a, x) {
        (JetMatrix::Exact(m), Coords::Exact(v)) => Coords::Exact(linalg::mat_vec(m, v)),
        _ => Coords::Approx(linalg::mat_vec(&a.to_f64(), &x.to_f64())),
    }
}

/// `A B` for exact or floating matrices.
pub fn mat_mul(a: &JetMatrix, b: &JetMatrix) -> JetMatrix {
    match (a, b) {
        (JetMatrix::Exact(x), JetMatrix::Exact(y)) => JetMatrix::Exact(linalg::mul(x, y)),
        _ => JetMatrix::Approx(linalg::mul(&a.to_f64(), &b.to_f64())),
    }
}

/// A single number, exact or floating.
#[derive(Clone, Debug, PartialEq)]
pub enum Num {
    Exact(Rational),
    Approx(f64),
}

impl Num {
    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(r) => r.to_f64(),
            Num::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Num::Exact(r) => Some(r),
            Num::Approx(_) => None,
        }
    }

    pub fn approx_eq(&self, other: &Num, tol: f64) -> bool {
        match (self, other) {
            (Num::Exact(a), Num::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= tol,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Num::Exact(r) => scalar::rational_to_json(r),
            Num::Approx(x) => serde_json::json!(x),
        }
    }
}
