//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary ('*' unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' integer)*
//! atom    := integer ('/' integer)? | 'x' integer | '(' sum ')'
//! ```
//!
//! `/` only appears inside rational literals, and there is no implicit
//! multiplication.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{ExprError, PolyExpr};
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn syntax(pos: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax { pos, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("ascii digits");
                out.push((start, Tok::Num(n)));
                continue;
            }
            b'x' => {
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(syntax(start, "expected variable index after 'x'"));
                }
                let idx = text[ds..i]
                    .parse::<usize>()
                    .map_err(|_| syntax(ds, "variable index too large"))?;
                out.push((start, Tok::Var(idx)));
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'/' => out.push((start, Tok::Slash)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character '{ch}'")));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    num_vars: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.text.len(), |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn sum(&mut self) -> Result<PolyExpr, ExprError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.product()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<PolyExpr, ExprError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<PolyExpr, ExprError> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<PolyExpr, ExprError> {
        let mut base = self.atom()?;
        while let Some(Tok::Caret) = self.peek() {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Num(n)) => {
                    let k = n.to_u32().ok_or_else(|| syntax(pos, "exponent too large"))?;
                    base = base.pow(k);
                }
                _ => return Err(syntax(pos, "exponent must be a non-negative integer literal")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<PolyExpr, ExprError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(n)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            Ok(PolyExpr::constant(self.num_vars, Rational::new(n, d)))
                        }
                        Some(Tok::Num(_)) => Err(syntax(dpos, "zero denominator")),
                        _ => Err(syntax(dpos, "expected integer denominator after '/'")),
                    }
                } else {
                    Ok(PolyExpr::constant(self.num_vars, Rational::from_integer(n)))
                }
            }
            Some(Tok::Var(i)) => {
                if i >= self.num_vars {
                    return Err(ExprError::VarOutOfRange { index: i, num_vars: self.num_vars, pos });
                }
                Ok(PolyExpr::var(self.num_vars, i))
            }
            Some(Tok::LParen) => {
                let inner = self.sum()?;
                let cpos = self.pos();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(syntax(cpos, "expected ')'")),
                }
            }
            Some(Tok::Slash) => Err(syntax(pos, "'/' is only allowed inside rational literals")),
            Some(t) => Err(syntax(pos, format!("unexpected token {t:?}"))),
            None => Err(syntax(pos, "unexpected end of input")),
        }
    }
}

/// Parses `text` as a polynomial in `x0..x{num_vars-1}` into canonical form.
pub fn parse_expr(text: &str, num_vars: usize) -> Result<PolyExpr, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, num_vars, text };
    if p.peek().is_none() {
        return Err(syntax(0, "empty expression"));
    }
    let e = p.sum()?;
    if p.at < p.toks.len() {
        let pos = p.pos();
        return Err(match p.peek() {
            Some(Tok::Slash) => syntax(pos, "'/' is only allowed inside rational literals"),
            _ => syntax(pos, "unexpected trailing input"),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn reads_terms_directly() {
        let p = parse_expr("x0^2*x1 + 3", 2).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coefficient(&[2, 1]), int(1));
        assert_eq!(p.coefficient(&[0, 0]), int(3));
        assert!(parse_expr("0", 3).unwrap().is_zero());
    }

    #[test]
    fn expands_products() {
        let p = parse_expr("(x0+1)*(x0-1)", 1).unwrap();
        assert_eq!(p, PolyExpr::from_terms(1, vec![(vec![2], int(1)), (vec![0], int(-1))]).unwrap());
    }

    #[test]
    fn precedence_and_associativity() {
        // unary minus binds looser than ^
        assert_eq!(parse_expr("-x0^2", 1).unwrap(), -parse_expr("x0*x0", 1).unwrap());
        // left-associative power: (x0^2)^3
        assert_eq!(parse_expr("x0^2^3", 1).unwrap(), parse_expr("x0^6", 1).unwrap());
        assert_eq!(parse_expr("1 - 2 - 3", 1).unwrap(), PolyExpr::constant(1, int(-4)));
        assert_eq!(parse_expr("2*-x0", 1).unwrap(), parse_expr("-2*x0", 1).unwrap());
        assert_eq!(parse_expr("3/4*x0", 1).unwrap().coefficient(&[1]), rat(3, 4));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expr("x0 + x5", 2) {
            Err(ExprError::VarOutOfRange { index: 5, num_vars: 2, pos: 5 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_expr("x0 + * x1", 2) {
            Err(ExprError::Syntax { pos: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr("x0 x1", 2), Err(ExprError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_expr("x0/x1", 2), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("x0^x1", 2), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("(x0", 1), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("", 1), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("1/0", 1), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("y", 1), Err(ExprError::Syntax { pos: 0, .. })));
    }
}
