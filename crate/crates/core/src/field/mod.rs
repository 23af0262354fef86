//! Exact arithmetic foundation.
//!
//! Rationals are `num_rational::BigRational`. Number fields are simple
//! extensions `Q(t)` given by a monic irreducible minimal polynomial, with a
//! certified complex embedding. Balls are rectangles with rational endpoints.

mod factor;
mod interval;
mod number_field;
mod roots;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use factor::{factor_over_q, is_irreducible_over_q};
pub use interval::{ComplexBall, Interval};
pub use number_field::{
    conjugate_element, make_number_field, FieldAutomorphism, NfElem, NumberField,
};
pub use roots::{isolate_complex_roots, refine_root, RootDisc};

pub type Q = num_rational::BigRational;

/// Canonical text form, readable back by the expression grammar.
pub trait CoeffFmt {
    fn to_text(&self) -> String;
}

/// Commutative ring with unit, as needed by the polynomial containers.
pub trait Ring:
    CoeffFmt
    + Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_i64(n: i64) -> Self;
}

/// A commutative field of characteristic zero containing `Q`.
pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;
    fn from_rational(q: &Q) -> Self;
    /// `Some(q)` when the element is rational.
    fn to_rational(&self) -> Option<Q>;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * &i)
    }
}

impl CoeffFmt for Q {
    fn to_text(&self) -> String {
        format_rational(self)
    }
}

impl Ring for Q {
    fn from_i64(n: i64) -> Self {
        Q::from_integer(BigInt::from(n))
    }
}

impl Field for Q {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(q: &Q) -> Self {
        q.clone()
    }
    fn to_rational(&self) -> Option<Q> {
        Some(self.clone())
    }
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `a`, `-a`, or `a/b`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Approximate `log2 |q|`; `-inf` for zero. Works far outside the f64 range.
pub fn log2_abs(q: &Q) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    fn log2_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits <= 1000 {
            n.abs().to_f64().unwrap().log2()
        } else {
            let shift = bits - 64;
            let top: BigInt = n.abs() >> shift;
            top.to_f64().unwrap().log2() + shift as f64
        }
    }
    log2_int(q.numer()) - log2_int(q.denom())
}

pub fn to_f64(q: &Q) -> f64 {
    let l = log2_abs(q);
    if l.is_infinite() {
        return 0.0;
    }
    if l.abs() < 1000.0 {
        let v = q.to_f64().unwrap_or_else(|| l.exp2());
        if v.is_finite() {
            return v;
        }
    }
    let v = l.exp2();
    if q.is_negative() {
        -v
    } else {
        v
    }
}

/// Exact rational value of a finite f64.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

pub fn pow2(e: i64) -> Q {
    if e >= 0 {
        Q::from_integer(BigInt::one() << (e as u64))
    } else {
        Q::new(BigInt::one(), BigInt::one() << ((-e) as u64))
    }
}

pub fn floor_q(q: &Q) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn ceil_q(q: &Q) -> BigInt {
    -((-q.numer()).div_floor(q.denom()))
}

/// Rounds down to a dyadic rational keeping about `prec` significant bits.
pub fn round_down(q: &Q, prec: u32) -> Q {
    round_dyadic(q, prec, false)
}

/// Rounds up to a dyadic rational keeping about `prec` significant bits.
pub fn round_up(q: &Q, prec: u32) -> Q {
    round_dyadic(q, prec, true)
}

fn round_dyadic(q: &Q, prec: u32, up: bool) -> Q {
    if q.is_zero() {
        return Q::zero();
    }
    if q.denom().bits() + q.numer().bits() <= 2 * prec as u64 + 8 {
        return q.clone();
    }
    let e = log2_abs(q).floor() as i64;
    let shift = prec as i64 - e;
    let scaled = q * pow2(shift);
    let m = if up { ceil_q(&scaled) } else { floor_q(&scaled) };
    Q::from_integer(m) * pow2(-shift)
}

/// Smallest-effort rational `s >= sqrt(r)` with `s` close to the root.
pub fn sqrt_upper(r: &Q) -> Q {
    sqrt_bound(r, true)
}

/// Rational `s <= sqrt(r)` close to the root.
pub fn sqrt_lower(r: &Q) -> Q {
    sqrt_bound(r, false)
}

fn sqrt_bound(r: &Q, upper: bool) -> Q {
    assert!(!r.is_negative(), "square root of a negative rational");
    if r.is_zero() {
        return Q::zero();
    }
    let e = (log2_abs(r) / 2.0).floor() as i64;
    let scaled = r * pow2(-2 * e);
    let approx = to_f64(&scaled).sqrt();
    let mut s = from_f64(approx);
    let step = from_f64(approx * 1e-12) + pow2(-60);
    if upper {
        while &s * &s < scaled {
            s += &step;
        }
    } else {
        while &s * &s > scaled {
            s -= &step;
        }
        if s.is_negative() {
            s = Q::zero();
        }
    }
    s * pow2(e)
}

/// Determinant of a square rational matrix given as a list of columns (or
/// rows; the determinant is the same).
pub fn det_q(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            for j in c..n {
                let v = &f * &m[c][j];
                m[r][j] -= v;
            }
        }
    }
    det
}

/// Exact integer power of a field element.
pub fn pow<F: Ring>(x: &F, mut e: u64) -> F {
    let mut base = x.clone();
    let mut acc = F::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = base.clone() * &base;
        }
    }
    acc
}
