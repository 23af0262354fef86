//! Closed rational intervals and rectangular complex balls.
//!
//! Every operation returns an enclosure of the exact image. Endpoints are
//! kept exact unless a caller asks for outward rounding via `round_out`,
//! which is what keeps long Horner chains from growing huge denominators.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::{format_rational, round_down, round_up, to_f64, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(Q::zero())
    }

    /// `[c - r, c + r]`.
    pub fn around(c: &Q, r: &Q) -> Self {
        Interval::new(c - r, c + r)
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Upper bound on `|x|` over the interval.
    pub fn mag(&self) -> Q {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    /// Lower bound on `|x|` over the interval.
    pub fn mig(&self) -> Q {
        if self.contains_zero() {
            Q::zero()
        } else if self.lo.is_positive() {
            self.lo.clone()
        } else {
            -self.hi.clone()
        }
    }

    pub fn scale(&self, c: &Q) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn square(&self) -> Interval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains_zero() {
            Interval { lo: Q::zero(), hi: if a > b { a } else { b } }
        } else if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// Reciprocal, `None` when the interval contains zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            None
        } else {
            Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
        }
    }

    /// Widens the endpoints to dyadic rationals with about `prec` bits.
    pub fn round_out(&self, prec: u32) -> Interval {
        Interval { lo: round_down(&self.lo, prec), hi: round_up(&self.hi, prec) }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: if self.lo < other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi > other.hi { self.hi.clone() } else { other.hi.clone() },
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, o: &Interval) -> Interval {
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = p[0].clone();
        let mut hi = p[0].clone();
        for v in &p[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Interval { lo, hi }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

/// Rectangle `re × im` in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexBall {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexBall { re, im }
    }

    pub fn from_rational(x: &Q) -> Self {
        ComplexBall { re: Interval::point(x.clone()), im: Interval::zero() }
    }

    pub fn point(re: Q, im: Q) -> Self {
        ComplexBall { re: Interval::point(re), im: Interval::point(im) }
    }

    pub fn zero() -> Self {
        ComplexBall::from_rational(&Q::zero())
    }

    pub fn one() -> Self {
        ComplexBall::from_rational(&Q::from_integer(1.into()))
    }

    /// Larger of the two side lengths.
    pub fn width(&self) -> Q {
        let a = self.re.width();
        let b = self.im.width();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn contains(&self, re: &Q, im: &Q) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn intersects(&self, other: &ComplexBall) -> bool {
        self.re.intersects(&other.re) && self.im.intersects(&other.im)
    }

    pub fn is_subset_of(&self, other: &ComplexBall) -> bool {
        self.re.is_subset_of(&other.re) && self.im.is_subset_of(&other.im)
    }

    /// Enclosure of `|z|^2`.
    pub fn abs_sq(&self) -> Interval {
        &self.re.square() + &self.im.square()
    }

    pub fn scale(&self, c: &Q) -> ComplexBall {
        ComplexBall { re: self.re.scale(c), im: self.im.scale(c) }
    }

    /// Reciprocal through `conj(z) / |z|^2`; `None` if the ball may contain 0.
    pub fn recip(&self) -> Option<ComplexBall> {
        let n = self.abs_sq().recip()?;
        Some(ComplexBall { re: &self.re * &n, im: &(-&self.im) * &n })
    }

    pub fn pow(&self, mut e: u64) -> ComplexBall {
        let mut base = self.clone();
        let mut acc = ComplexBall::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn round_out(&self, prec: u32) -> ComplexBall {
        ComplexBall { re: self.re.round_out(prec), im: self.im.round_out(prec) }
    }

    pub fn hull(&self, other: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.hull(&other.re), im: self.im.hull(&other.im) }
    }

    /// Adds `[-r, r]` to both parts.
    pub fn inflate(&self, r: &Q) -> ComplexBall {
        ComplexBall {
            re: Interval::new(&self.re.lo - r, &self.re.hi + r),
            im: Interval::new(&self.im.lo - r, &self.im.hi + r),
        }
    }

    pub fn mid_f64(&self) -> (f64, f64) {
        (to_f64(&self.re.mid()), to_f64(&self.im.mid()))
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let re = decimal(&self.re.mid(), digits);
        if self.im.lo.is_zero() && self.im.hi.is_zero() {
            re
        } else {
            let im = self.im.mid();
            let sign = if im.is_negative() { "-" } else { "+" };
            format!("{re}{sign}{}i", decimal(&im.abs(), digits))
        }
    }
}

/// Decimal expansion truncated to `digits` fractional digits, trailing
/// zeros dropped.
pub fn decimal(q: &Q, digits: usize) -> String {
    let neg = q.is_negative();
    let scaled = q.abs() * num_traits::pow(Q::from_integer(10.into()), digits);
    let m = super::floor_q(&scaled).to_string();
    let m = format!("{}{}", "0".repeat((digits + 1).saturating_sub(m.len())), m);
    let (ip, fp) = m.split_at(m.len() - digits);
    let fp = fp.trim_end_matches('0');
    let s = if fp.is_empty() { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg && s != "0" {
        format!("-{s}")
    } else {
        s
    }
}

impl Add for &ComplexBall {
    type Output = ComplexBall;
    fn add(self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &ComplexBall {
    type Output = ComplexBall;
    fn sub(self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &ComplexBall {
    type Output = ComplexBall;
    fn mul(self, o: &ComplexBall) -> ComplexBall {
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        ComplexBall { re, im }
    }
}

impl Neg for &ComplexBall {
    type Output = ComplexBall;
    fn neg(self) -> ComplexBall {
        ComplexBall { re: -&self.re, im: -&self.im }
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{qi, qr};

    #[test]
    fn interval_product_covers_sign_changes() {
        let a = Interval::new(qi(-1), qi(2));
        let b = Interval::new(qi(-3), qi(1));
        let p = &a * &b;
        assert_eq!(p, Interval::new(qi(-6), qi(3)));
    }

    #[test]
    fn reciprocal_of_ball() {
        let z = ComplexBall::point(qi(0), qi(2));
        let r = z.recip().unwrap();
        assert!(r.contains(&qi(0), &qr(-1, 2)));
        assert!(ComplexBall::new(Interval::new(qi(-1), qi(1)), Interval::zero()).recip().is_none());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&qr(1, 3), 5), "0.33333");
        assert_eq!(decimal(&qr(-22, 7), 4), "-3.1428");
        assert_eq!(decimal(&qi(1234), 2), "1234");
    }

    #[test]
    fn rounding_only_widens() {
        let x = Interval::new(qr(1, 3), qr(2, 3));
        let r = x.round_out(8);
        assert!(x.is_subset_of(&r));
    }
}
