//! Scalar abstraction shared by the exact (rational) and black-box (`f64`) paths.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

/// Exact arbitrary-precision rational, the coefficient type of every exact computation.
pub type Rational = BigRational;

/// Field scalars usable by exterior forms and the small linear-algebra helpers.
pub trait Scalar:
    Clone + fmt::Debug + PartialEq + PartialOrd + Signed + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact equality for rationals; absolute tolerance for floats.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    /// Whether the value should be treated as zero when pivoting.
    fn negligible(&self, tol: f64) -> bool;
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
    fn negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Nearest rational with a bounded denominator; used only to seed exact data from floats.
pub fn from_f64_approx(x: f64) -> Option<Rational> {
    Rational::from_f64(x)
}

/// Render a rational as `"p"` or `"p/q"`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// JSON integer when it fits in `i64`, otherwise a decimal string.
pub fn bigint_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(n.to_string()),
    }
}

pub fn bigint_from_json(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// `{"num": .., "den": ..}` encoding of an exact rational.
pub fn rational_to_json(r: &Rational) -> Value {
    serde_json::json!({ "num": bigint_to_json(r.numer()), "den": bigint_to_json(r.denom()) })
}

pub fn rational_from_num_den(num: &Value, den: &Value) -> Option<Rational> {
    let n = bigint_from_json(num)?;
    let d = bigint_from_json(den)?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Accepts a JSON integer, a `"p/q"` string, or a `{"num","den"}` object.
pub fn rational_from_json(v: &Value) -> Option<Rational> {
    match v {
        Value::Number(n) => n.as_i64().map(int),
        Value::String(s) => parse_rational(s),
        Value::Object(m) => rational_from_num_den(m.get("num")?, m.get("den")?),
        _ => None,
    }
}

/// Compact JSON for a rational used inside coordinate lists.
pub fn rational_to_compact_json(r: &Rational) -> Value {
    if r.denom().is_one() {
        bigint_to_json(r.numer())
    } else {
        Value::String(fmt_rational(r))
    }
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        for s in ["0", "-7", "3/4", "-12/5", "123456789012345678901234567890"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(fmt_rational(&r), s);
        }
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn json_accepts_big_values_as_strings() {
        let big: BigInt = "98765432109876543210".parse().unwrap();
        let r = Rational::new(big, BigInt::from(3));
        let v = rational_to_json(&r);
        assert!(v["num"].is_string());
        assert_eq!(rational_from_json(&v).unwrap(), r);
    }
}
