use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::ExprError;
use crate::scalar::{self, Rational};

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// Exact multivariate polynomial over the rationals in canonical sparse form.
///
/// Invariants: no stored coefficient is zero, and every exponent vector has
/// length `num_vars`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyExpr {
    num_vars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl PolyExpr {
    pub fn zero(num_vars: usize) -> Self {
        PolyExpr { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        Self::monomial(num_vars, vec![0; num_vars], c)
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Rational::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(num_vars: usize, i: usize) -> Self {
        assert!(i < num_vars, "variable x{i} out of range for {num_vars} variables");
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Self::monomial(num_vars, e, Rational::one())
    }

    pub fn monomial(num_vars: usize, exp: Exponents, c: Rational) -> Self {
        assert_eq!(exp.len(), num_vars, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        PolyExpr { num_vars, terms }
    }

    /// Builds a canonical polynomial, merging repeated exponents and dropping zeros.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self, ExprError>
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = PolyExpr::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(ExprError::DimensionMismatch { expected: num_vars, found: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.num_vars])
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_vars)
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        PolyExpr {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(self.num_vars);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn check_point_len(&self, len: usize) -> Result<(), ExprError> {
        if len != self.num_vars {
            return Err(ExprError::DimensionMismatch { expected: self.num_vars, found: len });
        }
        Ok(())
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ExprError> {
        self.check_point_len(point.len())?;
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &d) in point.iter().zip(e) {
                if d > 0 {
                    t *= num_traits::pow(x.clone(), d as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, ExprError> {
        self.check_point_len(point.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (x, &d) in point.iter().zip(e) {
                    t *= x.powi(d as i32);
                }
                t
            })
            .sum())
    }

    /// Exact formal partial derivative with respect to `x_var`.
    pub fn partial(&self, var: usize) -> Result<Self, ExprError> {
        if var >= self.num_vars {
            return Err(ExprError::IndexOutOfRange { index: var, num_vars: self.num_vars });
        }
        let mut p = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            p.add_term(e2, c * Rational::from_integer(e[var].into()));
        }
        Ok(p)
    }

    /// Iterated partial derivative `D^alpha`.
    pub fn derivative(&self, alpha: &[u32]) -> Result<Self, ExprError> {
        self.check_point_len(alpha.len())?;
        let mut p = self.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                p = p.partial(i)?;
            }
        }
        Ok(p)
    }

    pub fn gradient(&self) -> Vec<PolyExpr> {
        (0..self.num_vars)
            .map(|i| self.partial(i).expect("index in range"))
            .collect()
    }

    /// Formal substitution `x_i := subs[i]`; all substitutes share one variable count.
    pub fn substitute(&self, subs: &[PolyExpr]) -> Result<Self, ExprError> {
        self.check_point_len(subs.len())?;
        let target = match subs.first() {
            Some(s) => s.num_vars,
            None => {
                return Ok(Self::constant(0, self.constant_term()));
            }
        };
        if let Some(bad) = subs.iter().find(|s| s.num_vars != target) {
            return Err(ExprError::DimensionMismatch { expected: target, found: bad.num_vars });
        }
        // cache powers per variable
        let mut powers: Vec<Vec<PolyExpr>> = subs.iter().map(|s| vec![Self::one(target), s.clone()]).collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut t = Self::constant(target, c.clone());
            for (i, &d) in e.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                while powers[i].len() <= d as usize {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][d as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-expresses the polynomial in `new_num_vars` variables, sending `x_i` to `x_{map[i]}`.
    pub fn remap_vars(&self, new_num_vars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.num_vars);
        let mut p = Self::zero(new_num_vars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; new_num_vars];
            for (i, &d) in e.iter().enumerate() {
                e2[map[i]] += d;
            }
            p.add_term(e2, c.clone());
        }
        p
    }

    /// Embeds into more variables, keeping `x_i` as `x_i`.
    pub fn extend_vars(&self, new_num_vars: usize) -> Self {
        assert!(new_num_vars >= self.num_vars);
        let map: Vec<usize> = (0..self.num_vars).collect();
        self.remap_vars(new_num_vars, &map)
    }

    /// Drops trailing variables `x_n, x_{n+1}, ...`; `None` if any of them occurs.
    pub fn truncate_vars(&self, n: usize) -> Option<Self> {
        if self.terms.keys().any(|e| e[n..].iter().any(|&d| d > 0)) {
            return None;
        }
        let mut p = Self::zero(n);
        for (e, c) in &self.terms {
            p.add_term(e[..n].to_vec(), c.clone());
        }
        Some(p)
    }

    /// Exact division by `x_var`, or `None` if some term lacks that factor.
    pub fn divide_by_var(&self, var: usize) -> Option<Self> {
        let mut p = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                return None;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            p.add_term(e2, c.clone());
        }
        Some(p)
    }

    /// Sets `x_var := value`, keeping the variable count.
    pub fn specialize(&self, var: usize, value: &Rational) -> Self {
        let mut p = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let d = e2[var];
            e2[var] = 0;
            p.add_term(e2, c * num_traits::pow(value.clone(), d as usize));
        }
        p
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                json!({
                    "exp": e,
                    "num": scalar::bigint_to_json(c.numer()),
                    "den": scalar::bigint_to_json(c.denom()),
                })
            })
            .collect();
        json!({ "vars": self.num_vars, "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self, ExprError> {
        let bad = |m: &str| ExprError::Json(m.to_string());
        let n = v.get("vars").and_then(Value::as_u64).ok_or_else(|| bad("missing \"vars\""))? as usize;
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing \"terms\""))?;
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let exp: Exponents = t
                .get("exp")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("term without \"exp\""))?
                .iter()
                .map(|d| d.as_u64().and_then(|d| u32::try_from(d).ok()))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("exponent must be a non-negative integer"))?;
            let c = scalar::rational_from_num_den(
                t.get("num").ok_or_else(|| bad("term without \"num\""))?,
                t.get("den").unwrap_or(&Value::from(1)),
            )
            .ok_or_else(|| bad("invalid rational coefficient"))?;
            out.push((exp, c));
        }
        Self::from_terms(n, out)
    }
}

fn fmt_monomial(e: &[u32]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(i, &d)| if d == 1 { format!("x{i}") } else { format!("x{i}^{d}") })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for PolyExpr {
    /// Highest total degree first; the output re-parses to the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Exponents, &Rational)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (k, (e, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mono = fmt_monomial(e);
            if mono.is_empty() {
                write!(f, "{}", scalar::fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", scalar::fmt_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyExpr[{}]({})", self.num_vars, self)
    }
}

impl<'a> Add<&'a PolyExpr> for &'a PolyExpr {
    type Output = PolyExpr;
    fn add(self, rhs: &PolyExpr) -> PolyExpr {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomial variable counts differ");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<'a> Sub<&'a PolyExpr> for &'a PolyExpr {
    type Output = PolyExpr;
    fn sub(self, rhs: &PolyExpr) -> PolyExpr {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomial variable counts differ");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), -c.clone());
        }
        p
    }
}

impl<'a> Mul<&'a PolyExpr> for &'a PolyExpr {
    type Output = PolyExpr;
    fn mul(self, rhs: &PolyExpr) -> PolyExpr {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomial variable counts differ");
        let mut p = PolyExpr::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }
}

impl Neg for &PolyExpr {
    type Output = PolyExpr;
    fn neg(self) -> PolyExpr {
        PolyExpr {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<PolyExpr> for PolyExpr {
            type Output = PolyExpr;
            fn $m(self, rhs: PolyExpr) -> PolyExpr {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PolyExpr {
    type Output = PolyExpr;
    fn neg(self) -> PolyExpr {
        -&self
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion.
pub fn poly_det(m: &[Vec<PolyExpr>], num_vars: usize) -> PolyExpr {
    let n = m.len();
    match n {
        0 => PolyExpr::one(num_vars),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = PolyExpr::zero(num_vars);
            for row in 0..n {
                if m[row][0].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<PolyExpr>> = (0..n)
                    .filter(|&r| r != row)
                    .map(|r| m[r][1..].to_vec())
                    .collect();
                let term = &m[row][0] * &poly_det(&minor, num_vars);
                acc = if row % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// `x^alpha` monomial helper used by jets and tests.
pub fn factorial_product(alpha: &[u32]) -> Rational {
    alpha
        .iter()
        .flat_map(|&k| 1..=k)
        .fold(Rational::one(), |acc, f| acc * Rational::from_integer(f.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn x(n: usize, i: usize) -> PolyExpr {
        PolyExpr::var(n, i)
    }

    #[test]
    fn canonical_form_drops_cancelled_terms() {
        let p = &x(2, 0) - &x(2, 0);
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
        let q = PolyExpr::from_terms(1, vec![(vec![1], int(2)), (vec![1], int(-2)), (vec![0], int(5))]).unwrap();
        assert_eq!(q, PolyExpr::constant(1, int(5)));
    }

    #[test]
    fn eval_matches_hand_arithmetic() {
        // x0^2*x1 + 3 at (2,5) = 23
        let p = &(&x(2, 0).pow(2) * &x(2, 1)) + &PolyExpr::constant(2, int(3));
        assert_eq!(p.eval(&[int(2), int(5)]).unwrap(), int(23));
        assert_eq!(p.eval(&[int(0), int(0)]).unwrap(), int(3));
        assert!(matches!(p.eval(&[int(1)]), Err(ExprError::DimensionMismatch { .. })));
        assert_eq!(PolyExpr::zero(2).eval(&[rat(1, 3), int(9)]).unwrap(), int(0));
    }

    #[test]
    fn partial_derivatives() {
        let p = &x(2, 0).pow(2) * &x(2, 1);
        let expected = (&x(2, 0) * &x(2, 1)).scale(&int(2));
        assert_eq!(p.partial(0).unwrap(), expected);
        assert!(PolyExpr::constant(2, int(4)).partial(1).unwrap().is_zero());
        assert!(matches!(p.partial(2), Err(ExprError::IndexOutOfRange { .. })));
    }

    #[test]
    fn substitution_expands() {
        // y^2 with y = t + 1
        let f = x(1, 0).pow(2);
        let g = &x(1, 0) + &PolyExpr::one(1);
        let h = f.substitute(&[g]).unwrap();
        let expected = PolyExpr::from_terms(1, vec![(vec![2], int(1)), (vec![1], int(2)), (vec![0], int(1))]).unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn display_is_reparsable_text() {
        let p = PolyExpr::from_terms(
            2,
            vec![(vec![2, 1], int(1)), (vec![0, 0], int(3)), (vec![1, 0], rat(-3, 2))],
        )
        .unwrap();
        assert_eq!(p.to_string(), "x0^2*x1 - 3/2*x0 + 3");
        assert_eq!((-&x(1, 0)).to_string(), "-x0");
    }

    #[test]
    fn divide_by_var_requires_factor() {
        let p = &x(2, 0).pow(3) + &x(2, 0);
        assert_eq!(p.divide_by_var(0).unwrap(), &x(2, 0).pow(2) + &PolyExpr::one(2));
        assert!((&p + &PolyExpr::one(2)).divide_by_var(0).is_none());
    }

    #[test]
    fn poly_det_of_diagonal() {
        let n = 3;
        let m: Vec<Vec<PolyExpr>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { x(n, i) } else { PolyExpr::zero(n) }).collect())
            .collect();
        assert_eq!(poly_det(&m, n), &(&x(3, 0) * &x(3, 1)) * &x(3, 2));
    }

    #[test]
    fn json_round_trip() {
        let p = PolyExpr::from_terms(2, vec![(vec![1, 2], rat(7, 3)), (vec![0, 0], int(-1))]).unwrap();
        assert_eq!(PolyExpr::from_json(&p.to_json()).unwrap(), p);
        assert!(PolyExpr::from_json(&serde_json::json!({"vars": 2, "terms": [{"exp": [1], "num": 1, "den": 1}]})).is_err());
    }
}
