//! Root-modulus certificates by Graeffe root squaring.
//!
//! Coefficients are carried as intervals of extended-exponent dyadic numbers
//! (`m * 2^e` with a bounded mantissa and an unbounded exponent) so that the
//! doubly exponential growth of the iterates costs nothing. Every rounding is
//! directed outward; each decision is therefore a proof.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{KPoly, Poly};
use crate::error::{Error, Result};
use crate::field::{from_f64, refine_root, ComplexBall, isolate_complex_roots, pow2, NfElem, RootDisc, Q};

const PREC: u64 = 256;

/// Lower bound on the moduli of the nonzero roots.
#[derive(Clone, Debug, PartialEq)]
pub enum RootBound {
    Finite(Q),
    /// The polynomial is a monomial: no nonzero roots.
    Infinite,
}

impl RootBound {
    /// Is every nonzero root certified to have modulus `> r`.
    pub fn exceeds(&self, r: &Q) -> bool {
        match self {
            RootBound::Infinite => true,
            RootBound::Finite(b) => b > r,
        }
    }
}

/// `m * 2^e`.
#[derive(Clone, Debug)]
struct XF {
    m: BigInt,
    e: i64,
}

impl XF {
    fn zero() -> Self {
        XF { m: BigInt::zero(), e: 0 }
    }

    fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    /// Position of the leading bit: `|x|` lies in `[2^(top-1), 2^top)`.
    fn top(&self) -> i64 {
        self.e + self.m.bits() as i64
    }

    fn round(m: BigInt, e: i64, up: bool) -> XF {
        let b = m.bits();
        if b <= PREC {
            return XF { m, e };
        }
        let shift = b - PREC;
        let d = BigInt::one() << shift;
        let q = if up { ceil_div(&m, &d) } else { m.div_floor(&d) };
        XF { m: q, e: e + shift as i64 }
    }

    fn from_int(n: &BigInt) -> XF {
        XF { m: n.clone(), e: 0 }
    }

    fn from_q(q: &Q, up: bool) -> XF {
        XF::div(&XF::from_int(q.numer()), &XF::from_int(q.denom()), up)
    }

    fn neg(&self) -> XF {
        XF { m: -&self.m, e: self.e }
    }

    fn mul(a: &XF, b: &XF, up: bool) -> XF {
        XF::round(&a.m * &b.m, a.e + b.e, up)
    }

    fn add(a: &XF, b: &XF, up: bool) -> XF {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        let (big, small) = if a.top() >= b.top() { (a, b) } else { (b, a) };
        if small.top() < big.top() - PREC as i64 - 8 {
            // `small` is below the last kept bit of `big`: replace it by a
            // signed power of two that dominates it in the rounding direction.
            let tiny_e = big.top() - PREC as i64 - 8;
            let toward = if up { !small.is_negative() } else { small.is_negative() };
            if !toward {
                return big.clone();
            }
            let t = XF { m: if up { BigInt::one() } else { -BigInt::one() }, e: tiny_e };
            return XF::add_exact(big, &t, up);
        }
        XF::add_exact(a, b, up)
    }

    fn add_exact(a: &XF, b: &XF, up: bool) -> XF {
        let e = a.e.min(b.e);
        let am = &a.m << (a.e - e) as u64;
        let bm = &b.m << (b.e - e) as u64;
        XF::round(am + bm, e, up)
    }

    fn div(a: &XF, b: &XF, up: bool) -> XF {
        assert!(!b.is_zero());
        let shift = PREC + b.m.bits() + 2;
        let num = &a.m << shift;
        let q = if up { ceil_div(&num, &b.m) } else { num.div_floor(&b.m) };
        XF::round(q, a.e - b.e - shift as i64, up)
    }

    fn cmp(&self, o: &XF) -> Ordering {
        let sa = self.m.sign();
        let sb = o.m.sign();
        if sa != sb {
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let (ta, tb) = (self.top(), o.top());
        if ta != tb {
            let c = ta.cmp(&tb);
            return if sa == Sign::Plus { c } else { c.reverse() };
        }
        let e = self.e.min(o.e);
        let am = &self.m << (self.e - e) as u64;
        let bm = &o.m << (o.e - e) as u64;
        am.cmp(&bm)
    }

    fn log2(&self) -> f64 {
        let b = self.m.bits();
        let (m, sh) = if b > 60 { (&self.m.abs() >> (b - 60), (b - 60) as i64) } else { (self.m.abs(), 0) };
        m.to_f64().unwrap().log2() + (self.e + sh) as f64
    }

    /// `x^n` rounded in direction `up` (for `x >= 0`).
    fn powu(&self, mut n: u64, up: bool) -> XF {
        let mut base = self.clone();
        let mut acc = XF { m: BigInt::one(), e: 0 };
        while n > 0 {
            if n & 1 == 1 {
                acc = XF::mul(&acc, &base, up);
            }
            n >>= 1;
            if n > 0 {
                base = XF::mul(&base, &base, up);
            }
        }
        acc
    }
}

fn rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn max_xf(a: XF, b: XF) -> XF {
    if a.cmp(&b) == Ordering::Less {
        b
    } else {
        a
    }
}

fn min_xf(a: XF, b: XF) -> XF {
    if a.cmp(&b) == Ordering::Greater {
        b
    } else {
        a
    }
}

#[derive(Clone, Debug)]
struct XI {
    lo: XF,
    hi: XF,
}

impl XI {
    fn from_q(q: &Q) -> XI {
        XI { lo: XF::from_q(q, false), hi: XF::from_q(q, true) }
    }

    fn add(&self, o: &XI) -> XI {
        XI { lo: XF::add(&self.lo, &o.lo, false), hi: XF::add(&self.hi, &o.hi, true) }
    }

    fn neg(&self) -> XI {
        XI { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    fn mul(&self, o: &XI) -> XI {
        let c = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let mut lo = XF::mul(c[0].0, c[0].1, false);
        let mut hi = XF::mul(c[0].0, c[0].1, true);
        for (a, b) in &c[1..] {
            lo = min_xf(lo, XF::mul(a, b, false));
            hi = max_xf(hi, XF::mul(a, b, true));
        }
        XI { lo, hi }
    }

    fn scale2(&self) -> XI {
        XI { lo: XF { m: self.lo.m.clone(), e: self.lo.e + 1 }, hi: XF { m: self.hi.m.clone(), e: self.hi.e + 1 } }
    }

    fn contains_zero(&self) -> bool {
        !self.lo.m.is_positive() && !self.hi.m.is_negative()
    }

    /// Upper bound on `|x|`.
    fn mag(&self) -> XF {
        max_xf(
            XF { m: self.lo.m.abs(), e: self.lo.e },
            XF { m: self.hi.m.abs(), e: self.hi.e },
        )
    }

    /// Lower bound on `|x|`.
    fn mig(&self) -> XF {
        if self.contains_zero() {
            XF::zero()
        } else if self.lo.m.is_positive() {
            self.lo.clone()
        } else {
            self.hi.neg()
        }
    }
}

/// One root-squaring step: the roots of the result are the squares of the
/// roots of the input.
fn graeffe_step(a: &[XI]) -> Vec<XI> {
    let n = a.len() - 1;
    let mut b = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut s = a[k].mul(&a[k]);
        let mut l = 1;
        while l <= k && k + l <= n {
            let t = a[k - l].mul(&a[k + l]).scale2();
            s = if l % 2 == 1 { s.add(&t.neg()) } else { s.add(&t) };
            l += 1;
        }
        b.push(if k % 2 == 1 { s.neg() } else { s });
    }
    b
}

/// Largest dyadic `c` (within a small margin) with `c^n <= x`, or `None`.
fn root_lower(x: &XF, n: u64) -> Option<Q> {
    if x.is_zero() || x.is_negative() {
        return None;
    }
    let l = x.log2() / n as f64;
    let mut margin = 1e-12_f64.max(8.0 * f64::EPSILON * l.abs());
    for _ in 0..60 {
        let c = (l - margin).exp2();
        if c == 0.0 || !c.is_finite() {
            return None;
        }
        let cq = from_f64(c);
        let cx = XF::from_q(&cq, true);
        if cx.powu(n, true).cmp(x) != Ordering::Greater {
            return Some(cq);
        }
        margin *= 4.0;
    }
    None
}

fn strip(p: &Poly<Q>) -> Result<Poly<Q>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(p.unshift(p.valuation().unwrap()))
}

/// Certified lower bound on the moduli of the nonzero roots of `p`, improved
/// by `iterations` root-squaring steps. Monotone in `iterations`.
pub fn min_root_modulus_bound(p: &Poly<Q>, iterations: usize) -> Result<RootBound> {
    let s = strip(p)?;
    if s.deg() == 0 {
        return Ok(RootBound::Infinite);
    }
    let mut a: Vec<XI> = s.coeffs().iter().map(XI::from_q).collect();
    let mut best = Q::zero();
    let mut n: u64 = 1;
    for it in 0..=iterations {
        if let Some(b) = fujiwara_lower(&a, n) {
            if b > best {
                best = b;
            }
        }
        if it < iterations {
            a = graeffe_step(&a);
            n = n.saturating_mul(2);
            if n > 1 << 62 {
                break;
            }
        }
    }
    Ok(RootBound::Finite(best))
}

/// Every root `r` of the polynomial satisfies
/// `|r| >= min_j (|a_0| / (2^j |a_j|))^(1/j)`; the roots of the original are
/// the `n`-th roots of these.
fn fujiwara_lower(a: &[XI], n: u64) -> Option<Q> {
    let a0 = a[0].mig();
    if a0.is_zero() {
        return None;
    }
    let mut best: Option<Q> = None;
    for (j, aj) in a.iter().enumerate().skip(1) {
        let m = aj.mag();
        if m.is_zero() {
            continue;
        }
        let den = XF { m: m.m.clone(), e: m.e + j as i64 };
        let x = XF::div(&a0, &den, false);
        let c = root_lower(&x, n.checked_mul(j as u64)?)?;
        best = Some(match best {
            Some(b) if b < c => b,
            _ => c,
        });
    }
    best
}

/// Does `p` have a root in `0 < |z| < r`? Decided exactly by Pellet's test on
/// the root-squared iterates of `p(r z)`; roots of modulus exactly `r` make
/// the test inconclusive up to the cap.
pub fn has_root_in_punctured_disk_capped(p: &Poly<Q>, r: &Q, cap: usize) -> Result<bool> {
    if !r.is_positive() {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let s = strip(p)?;
    if s.deg() == 0 {
        return Ok(false);
    }
    let mut rp = Q::one();
    let mut a = Vec::with_capacity(s.coeffs().len());
    for c in s.coeffs() {
        a.push(XI::from_q(&(c * &rp)));
        rp *= r;
    }
    for _ in 0..=cap {
        if let Some(k) = pellet(&a) {
            return Ok(k > 0);
        }
        a = graeffe_step(&a);
    }
    Err(Error::BoundaryUndecided { iterations: cap })
}

/// Default cap of 40 root-squaring steps.
pub fn has_root_in_punctured_disk(p: &Poly<Q>, r: &Q) -> Result<bool> {
    has_root_in_punctured_disk_capped(p, r, 40)
}

/// `Some(k)` when `|a_k| > sum_{j != k} |a_j|`: then exactly `k` roots lie in
/// the open unit disc and none on the circle.
fn pellet(a: &[XI]) -> Option<usize> {
    let mags: Vec<XF> = a.iter().map(XI::mag).collect();
    for (k, ak) in a.iter().enumerate() {
        let lo = ak.mig();
        if lo.is_zero() {
            continue;
        }
        let mut rest = XF::zero();
        for (j, m) in mags.iter().enumerate() {
            if j != k {
                rest = XF::add(&rest, m, true);
            }
        }
        if lo.cmp(&rest) == Ordering::Greater {
            return Some(k);
        }
    }
    None
}

/// Norm polynomial `prod_sigma p^sigma` of a polynomial over a number field,
/// with rational coefficients. Its roots contain those of `p` under every
/// embedding.
pub fn norm_poly(p: &KPoly) -> Poly<Q> {
    if let Some(q) = p.to_q() {
        return q;
    }
    let d = p
        .coeffs()
        .iter()
        .find_map(|c| c.field().map(|k| k.degree()))
        .unwrap_or(1);
    let n = p.deg() as usize * d;
    let xs: Vec<Q> = (0..=n as i64).map(|i| Q::from_integer(i.into())).collect();
    let ys: Vec<Q> = xs.iter().map(|x| p.eval(&NfElem::Rational(x.clone())).norm()).collect();
    interpolate(&xs, &ys)
}

/// Newton interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Q], ys: &[Q]) -> Poly<Q> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = Poly::constant(dd[n - 1].clone());
    for i in (0..n - 1).rev() {
        let lin = Poly::new(vec![-xs[i].clone(), Q::one()]);
        p = &(&p * &lin) + &Poly::constant(dd[i].clone());
    }
    p
}

/// Lower bound on nonzero root moduli for a polynomial over a number field,
/// through its norm.
pub fn min_root_modulus_bound_k(p: &KPoly, iterations: usize) -> Result<RootBound> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    min_root_modulus_bound(&norm_poly(p), iterations)
}

/// Disk test for polynomials over a number field. The norm decides the
/// negative case; otherwise the roots of `p` are located among the isolated
/// roots of its norm.
pub fn has_root_in_punctured_disk_k(p: &KPoly, r: &Q) -> Result<bool> {
    if let Some(q) = p.to_q() {
        return has_root_in_punctured_disk(&q, r);
    }
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let np = norm_poly(p);
    if !has_root_in_punctured_disk(&np, r)? {
        return Ok(false);
    }
    let s = p.unshift(p.valuation().unwrap());
    if s.deg() == 0 {
        return Ok(false);
    }
    for disc in locate_roots_k(&s)? {
        let (lo, hi) = disc.modulus_bounds();
        if hi < *r {
            return Ok(true);
        }
        if lo <= *r {
            return Err(Error::BoundaryUndecided { iterations: 0 });
        }
    }
    Ok(false)
}

/// Certified discs for the distinct roots of `p` (over a number field) under
/// the distinguished embedding, refined until each modulus is separated
/// from the others' discs or a refinement cap is hit.
pub fn locate_roots_k(p: &KPoly) -> Result<Vec<RootDisc>> {
    let q = p.squarefree_part();
    let m = q.deg() as usize;
    let np = norm_poly(&q).squarefree_part();
    let mut discs = isolate_complex_roots(&np)?;
    let mut radius = pow2(-20);
    for _ in 0..12 {
        for d in discs.iter_mut() {
            if d.radius > radius {
                *d = refine_root(&np, d, &radius);
            }
        }
        let keep: Vec<_> = discs
            .iter()
            .filter(|d| {
                let b = d.ball();
                let w = pow2(-40).min(radius.clone());
                let mut acc = ComplexBall::zero();
                for c in q.coeffs().iter().rev() {
                    acc = &(&acc * &b) + &c.embed(&w);
                }
                acc.contains_zero()
            })
            .cloned()
            .collect();
        if keep.len() == m {
            return Ok(keep);
        }
        radius = &radius * pow2(-32);
    }
    Err(Error::BoundaryUndecided { iterations: 12 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{qr, to_f64};

    fn p(cs: &[i64]) -> Poly<Q> {
        Poly::from_i64s(cs)
    }

    fn bound(p: &Poly<Q>, it: usize) -> f64 {
        match min_root_modulus_bound(p, it).unwrap() {
            RootBound::Finite(b) => to_f64(&b),
            RootBound::Infinite => f64::INFINITY,
        }
    }

    #[test]
    fn golden_polynomial_bound() {
        let b = bound(&p(&[-1, -1, 1]), 8);
        assert!((0.6..=0.619).contains(&b), "{b}");
    }

    #[test]
    fn monomial_and_linear() {
        assert_eq!(min_root_modulus_bound(&p(&[0, 0, 0, 0, 0, 1]), 8).unwrap(), RootBound::Infinite);
        let b = bound(&p(&[1, -2]), 8);
        assert!(b > 0.49 && b <= 0.5, "{b}");
        assert_eq!(min_root_modulus_bound(&Poly::zero(), 3), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn disk_decisions() {
        let g = p(&[-1, -1, 1]);
        assert!(has_root_in_punctured_disk(&g, &qr(7, 10)).unwrap());
        assert!(!has_root_in_punctured_disk(&g, &qr(1, 2)).unwrap());
        assert!(!has_root_in_punctured_disk(&p(&[0, 0, 0, 1]), &qr(1, 2)).unwrap());
        assert!(matches!(
            has_root_in_punctured_disk(&p(&[-1, 2]), &qr(1, 2)),
            Err(Error::BoundaryUndecided { .. })
        ));
    }

    #[test]
    fn bound_is_monotone_and_sound() {
        let f = p(&[3, -7, 0, 2, 5]);
        let roots = isolate_complex_roots(&f).unwrap();
        let true_min = roots.iter().map(|d| d.center_f64().norm()).fold(f64::INFINITY, f64::min);
        let mut prev = 0.0;
        for it in 0..10 {
            let b = bound(&f, it);
            assert!(b >= prev && b <= true_min + 1e-12);
            prev = b;
        }
        assert!(prev > 0.95 * true_min);
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = p(&[1, -2, 0, 5]);
        let xs: Vec<Q> = (0..4).map(|i| Q::from_integer(i.into())).collect();
        let ys: Vec<Q> = xs.iter().map(|x| f.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), f);
    }
}
