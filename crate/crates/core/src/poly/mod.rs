//! Dense univariate polynomials in `z`, rational functions, and sparse
//! multivariate polynomials in prolongation variables.

pub mod graeffe;
mod multi;
pub mod parse;
mod ratfunc;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::field::{CoeffFmt, Field, NfElem, Ring, Q};

pub use graeffe::{has_root_in_punctured_disk, min_root_modulus_bound, RootBound};
pub use multi::{Monomial, MonomialOrder, MultiPoly, Var};
pub use parse::{format_poly, parse_expression};
pub use ratfunc::RatFunc;

/// Dense polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

pub type QPoly = Poly<Q>;
pub type KPoly = Poly<NfElem>;

impl<F: Ring> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![F::one()] }
    }

    pub fn constant(c: F) -> Self {
        Poly::new(vec![c])
    }

    /// The variable `z`.
    pub fn z() -> Self {
        Poly { coeffs: vec![F::zero(), F::one()] }
    }

    pub fn monomial(c: F, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![F::zero(); k + 1];
        v[k] = c;
        Poly { coeffs: v }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| F::from_i64(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `-1` for the zero polynomial.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    /// Leading coefficient, zero for the zero polynomial.
    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    /// Order of vanishing at `z = 0`; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![F::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    /// Divides by `z^k`, dropping lower terms.
    pub fn unshift(&self, k: usize) -> Self {
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    /// Keeps the terms of degree `< n`.
    pub fn truncate(&self, n: usize) -> Self {
        Poly::new(self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `p(z^k)`.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        let mut v = vec![F::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        Poly { coeffs: v }
    }

    /// `p(g(z))`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * &F::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        crate::field::pow(self, e as u64)
    }

    pub fn map<G: Ring>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Product of `self` and `other` keeping only terms of degree `< n`.
    pub fn mul_trunc(&self, other: &Self, n: usize) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let len = (self.coeffs.len() + other.coeffs.len() - 1).min(n);
        let mut v = vec![F::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                v[i + j] = v[i + j].clone() + &(a.clone() * b);
            }
        }
        Poly::new(v)
    }
}

impl<F: Field> Poly<F> {
    pub fn from_rationals(cs: &[Q]) -> Self {
        Poly::new(cs.iter().map(F::from_rational).collect())
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let inv = d.lc().inv().expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() * &inv;
            if c.is_zero() {
                continue;
            }
            for (i, di) in d.coeffs.iter().enumerate() {
                r[k + i] = r[k + i].clone() - &(c.clone() * di);
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// `Some(q)` with `self = q * d` when the division is exact.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn monic(&self) -> Self {
        match self.lc().inv() {
            Some(i) if !self.is_zero() => self.scale(&i),
            _ => self.clone(),
        }
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// `(g, s, t)` with `g = s*self + t*other`, `g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lc().inv() {
            Some(i) if !r0.is_zero() => (r0.scale(&i), s0.scale(&i), t0.scale(&i)),
            _ => (r0, s0, t0),
        }
    }

    /// Inverse of `self` modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.ext_gcd(m);
        if g.is_one() {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn squarefree_part(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// Yun's algorithm: `self = lc * prod f_i^i`, returned as `(f_i, i)` with
    /// nonconstant monic `f_i`.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.deg() < 1 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.exact_div(&a).unwrap();
        let mut c = df.exact_div(&a).unwrap().monic_like(&f);
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.deg() >= 1 {
            a = b.gcd(&d);
            if a.deg() >= 1 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a).unwrap();
            c = d.exact_div(&a).unwrap();
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    fn monic_like(&self, f: &Self) -> Self {
        self.scale(&f.lc().inv().unwrap_or_else(F::one))
    }

    /// Is `alpha` a root.
    pub fn vanishes_at(&self, alpha: &F) -> bool {
        self.eval(alpha).is_zero()
    }

    /// Multiplicity of `alpha` as a root.
    pub fn root_multiplicity(&self, alpha: &F) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Poly::new(vec![-alpha.clone(), F::one()]);
        let mut p = self.clone();
        let mut k = 0;
        while let Some(q) = p.exact_div(&lin) {
            p = q;
            k += 1;
        }
        k
    }
}

impl Poly<Q> {
    /// Positive content-free integer multiple: `self = c * result` with
    /// `result` having coprime integer coefficients and positive leading one.
    pub fn primitive_part(&self) -> (Q, Self) {
        if self.is_zero() {
            return (Q::one(), Poly::zero());
        }
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(&(c * Q::from_integer(l.clone())).to_integer());
        }
        let mut content = Q::new(g, l);
        if self.lc().is_negative() {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    pub fn to_k(&self) -> KPoly {
        self.map(|c| NfElem::from_rational(c))
    }
}

impl KPoly {
    /// `Some` when every coefficient is rational.
    pub fn to_q(&self) -> Option<QPoly> {
        let v: Option<Vec<Q>> = self.coeffs.iter().map(|c| c.to_rational()).collect();
        v.map(Poly::new)
    }
}

impl<F: Ring> Zero for Poly<F> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<F: Ring> One for Poly<F> {
    fn one() -> Self {
        Poly::one()
    }
}

impl<F: Ring> Ring for Poly<F> {
    fn from_i64(n: i64) -> Self {
        Poly::constant(F::from_i64(n))
    }
}

fn add_vec<F: Ring>(a: &[F], b: &[F], neg: bool) -> Vec<F> {
    let n = a.len().max(b.len());
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(F::zero);
        v.push(match b.get(i) {
            Some(y) if neg => x - y,
            Some(y) => x + y,
            None => x,
        });
    }
    v
}

impl<F: Ring> Add<&Poly<F>> for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, o: &Poly<F>) -> Poly<F> {
        Poly::new(add_vec(&self.coeffs, &o.coeffs, false))
    }
}

impl<F: Ring> Sub<&Poly<F>> for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, o: &Poly<F>) -> Poly<F> {
        Poly::new(add_vec(&self.coeffs, &o.coeffs, true))
    }
}

impl<F: Ring> Mul<&Poly<F>> for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, o: &Poly<F>) -> Poly<F> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                v[i + j] = std::mem::replace(&mut v[i + j], F::zero()) + &(a.clone() * b);
            }
        }
        Poly::new(v)
    }
}

impl<F: Ring> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<F: Ring> $tr<Poly<F>> for Poly<F> {
            type Output = Poly<F>;
            fn $m(self, o: Poly<F>) -> Poly<F> { (&self).$m(&o) }
        }
        impl<'a, F: Ring> $tr<&'a Poly<F>> for Poly<F> {
            type Output = Poly<F>;
            fn $m(self, o: &'a Poly<F>) -> Poly<F> { (&self).$m(o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<F: Ring> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        -&self
    }
}

impl<F: Ring> CoeffFmt for Poly<F> {
    fn to_text(&self) -> String {
        format_poly(self)
    }
}

impl<F: Ring> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(self))
    }
}

impl<F: Ring> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{qi, qr};

    fn p(cs: &[i64]) -> QPoly {
        Poly::from_i64s(cs)
    }

    #[test]
    fn division_recomposes() {
        let a = p(&[1, 2, 3, 4, 5]);
        let b = p(&[-1, 0, 2]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.deg() < b.deg());
    }

    #[test]
    fn gcd_and_inverse() {
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[3, 0, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let m = p(&[-5, 0, 1]);
        let x = p(&[1, 1]);
        let i = x.inv_mod(&m).unwrap();
        assert_eq!((&x * &i).rem(&m), QPoly::one());
    }

    #[test]
    fn squarefree_decomposition_recovers_powers() {
        let f1 = p(&[1, 1]);
        let f2 = p(&[-2, 0, 1]);
        let f = &(&f1 * &f2.pow(2)) * &p(&[0, 1]).pow(3);
        let dec = f.squarefree_decomposition();
        let mut prod = QPoly::one();
        for (g, i) in &dec {
            prod = &prod * &g.pow(*i as u32);
        }
        assert_eq!(prod, f.monic());
        assert_eq!(dec.len(), 3);
    }

    #[test]
    fn substitution_and_composition() {
        let a = p(&[1, 1, -1]);
        assert_eq!(a.substitute_power(3), p(&[1, 0, 0, 1, 0, 0, -1]));
        assert_eq!(a.compose(&p(&[0, 0, 0, 1])), a.substitute_power(3));
        assert_eq!(a.eval(&qr(1, 2)), qr(5, 4));
    }

    #[test]
    fn primitive_part_normalizes_sign_and_content() {
        let a = Poly::new(vec![qr(-1, 2), qi(0), qr(-3, 4)]);
        let (c, pp) = a.primitive_part();
        assert_eq!(pp, p(&[2, 0, 3]));
        assert_eq!(c, qr(-1, 4));
    }

    #[test]
    fn root_multiplicity_counts() {
        let a = &p(&[-1, 1]).pow(3) * &p(&[1, 1]);
        assert_eq!(a.root_multiplicity(&qi(1)), 3);
        assert_eq!(a.root_multiplicity(&qi(2)), 0);
    }
}
