//! Seeded random rationals and small integer matrices.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::scalar::Rational;

/// Uniform `a / b` with `|a / b| <= bound` and `1 <= b <= max_den`.
pub fn random_rational(rng: &mut ChaCha8Rng, bound: i64, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-bound * den..=bound * den);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A `rows x cols` matrix with integer entries in `[-bound, bound]`.
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Matrix<Rational> {
    (0..rows)
        .map(|_| (0..cols).map(|_| Rational::from_integer(BigInt::from(rng.gen_range(-bound..=bound)))).collect())
        .collect()
}

/// Random integer vector with entries in `[-bound, bound]`.
pub fn random_vector(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> Vec<Rational> {
    (0..len).map(|_| Rational::from_integer(BigInt::from(rng.gen_range(-bound..=bound)))).collect()
}
