//! Expression grammar and canonical printing.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' nat)?
//! atom   := nat | 't' | 'z' | '(' expr ')'
//! ```
//!
//! Canonical output lists terms by ascending degree, e.g. `1+z-z^2`,
//! `3/4*z^2`, `(1/2-1/2*t)*z`, `z^2/(1-z^3)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::{Poly, RatFunc};
use crate::error::{Error, Result};
use crate::field::{CoeffFmt, Field, NfElem, NumberField, Ring, Q};

/// Parses an expression in `z` (and the generator `t` when a field is given).
pub fn parse_expression(text: &str, field: Option<&Arc<NumberField>>) -> Result<RatFunc<NfElem>> {
    let gen = field.map(|k| ('t', NfElem::generator(k)));
    Parser::new(text, 'z', gen).parse()
}

/// Parses a polynomial in `z`, rejecting genuine fractions.
pub fn parse_poly(text: &str, field: Option<&Arc<NumberField>>) -> Result<Poly<NfElem>> {
    let r = parse_expression(text, field)?;
    r.to_poly()
        .ok_or_else(|| Error::InvalidInput(format!("`{text}` is not a polynomial")))
}

/// Parses a rational-coefficient polynomial in the variable `var`.
pub fn parse_qpoly(text: &str, var: char) -> Result<Poly<Q>> {
    let r = Parser::<Q>::new(text, var, None).parse()?;
    r.to_poly()
        .ok_or_else(|| Error::InvalidInput(format!("`{text}` is not a polynomial")))
}

/// Parses a rational-coefficient rational function in `z`.
pub fn parse_qratfunc(text: &str) -> Result<RatFunc<Q>> {
    Parser::<Q>::new(text, 'z', None).parse()
}

struct Parser<F> {
    chars: Vec<char>,
    pos: usize,
    var: char,
    gen: Option<(char, F)>,
}

impl<F: Field> Parser<F> {
    fn new(text: &str, var: char, gen: Option<(char, F)>) -> Self {
        let chars = text.chars().map(|c| if c == '\u{2212}' { '-' } else { c }).collect();
        Parser { chars, pos: 0, var, gen }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::SyntaxError { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<RatFunc<F>> {
        if self.peek().is_none() {
            return self.err("empty expression");
        }
        let v = self.expr()?;
        if let Some(c) = self.peek() {
            return self.err(format!("unexpected `{c}`"));
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<RatFunc<F>> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc<F>> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                '/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let inv = d.recip().ok_or(Error::DivisionByZeroPolynomial)?;
                    acc = &acc * &inv;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc<F>> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc<F>> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let n = self.nat()?;
            let e: u32 = match n.try_into() {
                Ok(e) if e <= 1_000_000 => e,
                _ => {
                    self.pos = start;
                    return self.err("exponent too large");
                }
            };
            return Ok(crate::field::pow(&base, e as u64));
        }
        Ok(base)
    }

    fn nat(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a natural number");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<RatFunc<F>> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(c) if c.is_ascii_digit() => {
                let n = self.nat()?;
                Ok(RatFunc::constant(F::from_rational(&Q::from_integer(n))))
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c == self.var => {
                self.pos += 1;
                Ok(RatFunc::z())
            }
            Some(c) => {
                if let Some((g, v)) = &self.gen {
                    if *g == c {
                        self.pos += 1;
                        return Ok(RatFunc::constant(v.clone()));
                    }
                }
                if c == 't' {
                    return self.err("generator `t` needs a number field");
                }
                self.err(format!("unexpected `{c}`"))
            }
        }
    }
}

/// True when `s` has no top-level `+` or `-` after an optional leading sign,
/// so it can be a factor of a product without parentheses.
fn is_atomic(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let mut depth = 0i32;
    for c in body.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 => return false,
            _ => {}
        }
    }
    true
}

/// Joins `(coefficient, power)` pairs as a sum in the variable `var`.
pub(crate) fn format_terms<F: Ring>(coeffs: &[F], var: &str) -> String {
    let one = F::one();
    let minus_one = -F::one();
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        let term = if k == 0 {
            c.to_text()
        } else if *c == one {
            mono
        } else if *c == minus_one {
            format!("-{mono}")
        } else {
            let cs = c.to_text();
            if is_atomic(&cs) {
                format!("{cs}*{mono}")
            } else {
                format!("({cs})*{mono}")
            }
        };
        if !out.is_empty() && !term.starts_with('-') {
            out.push('+');
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

pub fn format_poly<F: Ring>(p: &Poly<F>) -> String {
    format_terms(p.coeffs(), "z")
}

pub fn format_ratfunc<F: Field>(r: &RatFunc<F>) -> String {
    let n = format_poly(r.num());
    if r.den().is_one() {
        return n;
    }
    let d = format_poly(r.den());
    let n = paren_if_needed(&n);
    let d = if r.den().coeffs().iter().filter(|c| !c.is_zero()).count() == 1 {
        d
    } else {
        format!("({d})")
    };
    format!("{n}/{d}")
}

/// Wraps `s` in parentheses unless it is a single factor.
pub fn paren_if_needed(s: &str) -> String {
    if is_atomic(s) {
        s.to_string()
    } else {
        format!("({s})")
    }
}

impl CoeffFmt for NfElem {
    fn to_text(&self) -> String {
        match self {
            NfElem::Rational(q) => crate::field::format_rational(q),
            NfElem::Algebraic(_, coords) => format_terms(coords, "t"),
        }
    }
}
