//! Dense row-major matrices over a [`Scalar`] field.
//!
//! Sizes here are tiny (ambient dimensions of a handful), so everything is
//! plain Gaussian elimination with partial pivoting.

use crate::scalar::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

pub fn identity<S: Scalar>(n: usize) -> Matrix<S> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect()
}

pub fn shape<S>(m: &Matrix<S>) -> (usize, usize) {
    (m.len(), m.first().map_or(0, Vec::len))
}

pub fn transpose<S: Clone>(m: &Matrix<S>) -> Matrix<S> {
    let (r, c) = shape(m);
    (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn mul<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let (ar, ac) = shape(a);
    let (_, bc) = shape(b);
    (0..ar)
        .map(|i| {
            (0..bc)
                .map(|j| {
                    (0..ac).fold(S::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone())
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<S: Scalar>(a: &Matrix<S>, v: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
        })
        .collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Matrix whose columns are the given vectors.
pub fn from_columns<S: Clone>(cols: &[Vec<S>]) -> Matrix<S> {
    let rows = cols.first().map_or(0, Vec::len);
    (0..rows)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

pub fn submatrix<S: Clone>(m: &Matrix<S>, rows: &[usize], cols: &[usize]) -> Matrix<S> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}

fn pivot_row<S: Scalar>(m: &Matrix<S>, col: usize, from: usize, tol: f64) -> Option<usize> {
    let mut best: Option<usize> = None;
    for r in from..m.len() {
        if m[r][col].negligible(tol) {
            continue;
        }
        match best {
            Some(b) if m[b][col].abs() >= m[r][col].abs() => {}
            _ => best = Some(r),
        }
    }
    best
}

/// Determinant of a square matrix; the empty matrix has determinant 1.
pub fn det<S: Scalar>(m: &Matrix<S>) -> S {
    let n = m.len();
    let mut a = m.clone();
    let mut sign = S::one();
    let mut acc = S::one();
    for col in 0..n {
        let Some(p) = pivot_row(&a, col, col, 0.0) else {
            return S::zero();
        };
        if p != col {
            a.swap(p, col);
            sign = -sign;
        }
        let pv = a[col][col].clone();
        acc = acc * pv.clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / pv.clone();
            for c in col..n {
                let t = a[col][c].clone() * factor.clone();
                a[r][c] = a[r][c].clone() - t;
            }
        }
    }
    sign * acc
}

/// Rank with pivots below `tol` treated as zero (exact for rationals).
pub fn rank<S: Scalar>(m: &Matrix<S>, tol: f64) -> usize {
    let (rows, cols) = shape(m);
    let mut a = m.clone();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pivot_row(&a, col, r, tol) else {
            continue;
        };
        a.swap(p, r);
        let pv = a[r][col].clone();
        for i in r + 1..rows {
            let factor = a[i][col].clone() / pv.clone();
            for c in col..cols {
                let t = a[r][c].clone() * factor.clone();
                a[i][c] = a[i][c].clone() - t;
            }
        }
        r += 1;
    }
    r
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse<S: Scalar>(m: &Matrix<S>, tol: f64) -> Option<Matrix<S>> {
    let n = m.len();
    let mut a: Matrix<S> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = pivot_row(&a, col, col, tol)?;
        a.swap(p, col);
        let pv = a[col][col].clone();
        for c in 0..2 * n {
            a[col][c] = a[col][c].clone() / pv.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..2 * n {
                let t = a[col][c].clone() * factor.clone();
                a[r][c] = a[r][c].clone() - t;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `m x = b` for square nonsingular `m`.
pub fn solve<S: Scalar>(m: &Matrix<S>, b: &[S], tol: f64) -> Option<Vec<S>> {
    inverse(m, tol).map(|inv| mat_vec(&inv, b))
}

pub fn is_symmetric<S: Scalar>(m: &Matrix<S>, tol: f64) -> bool {
    let n = m.len();
    m.iter().all(|r| r.len() == n)
        && (0..n).all(|i| (0..i).all(|j| m[i][j].approx_eq(&m[j][i], tol)))
}

/// Sylvester's criterion: all leading principal minors positive.
pub fn is_positive_definite<S: Scalar>(m: &Matrix<S>) -> bool {
    let n = m.len();
    (1..=n).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        det(&submatrix(m, &idx, &idx)).is_positive()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(det::<Rational>(&vec![]), int(1));
        assert_eq!(det(&m(&[&[2, 1], &[7, 4]])), int(1));
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), int(-1));
        assert_eq!(det(&m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), int(0));
        assert_eq!(det(&m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]])), int(0));
        assert_eq!(det(&m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]])), int(6));
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a, 0.0).unwrap();
        assert_eq!(mul(&a, &inv), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]]), 0.0).is_none());
    }

    #[test]
    fn rank_and_definiteness() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]]), 0.0), 1);
        assert_eq!(rank(&m(&[&[1, 0, 0], &[0, 0, 1]]), 0.0), 2);
        let g = vec![vec![int(2), int(0)], vec![int(0), rat(1, 2)]];
        assert!(is_positive_definite(&g));
        assert!(!is_positive_definite(&m(&[&[1, 2], &[2, 1]])));
    }
}
