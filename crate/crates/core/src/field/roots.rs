//! Certified isolation of the complex roots of a squarefree rational
//! polynomial.
//!
//! Approximations come from Aberth iteration in f64 and exact Newton steps;
//! certification uses the inclusion disc of radius `n |p(c) / p'(c)|`, which
//! always contains a root. Pairwise disjoint discs, one per root, each hold
//! exactly one root.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::{from_f64, pow2, sqrt_upper, to_f64, ComplexBall, Interval, Q};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Closed disc holding exactly one root of the polynomial it was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct RootDisc {
    pub re: Q,
    pub im: Q,
    pub radius: Q,
}

impl RootDisc {
    pub fn ball(&self) -> ComplexBall {
        ComplexBall::new(Interval::around(&self.re, &self.radius), Interval::around(&self.im, &self.radius))
    }

    pub fn center_f64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    /// Whether the disc is symmetric about the real axis, which for a real
    /// polynomial certifies a real root.
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Rational bounds `lo <= |root| <= hi`.
    pub fn modulus_bounds(&self) -> (Q, Q) {
        let c2 = &self.re * &self.re + &self.im * &self.im;
        let c = sqrt_upper(&c2);
        let cl = super::sqrt_lower(&c2);
        let lo = &cl - &self.radius;
        let lo = if lo.is_negative() { Q::zero() } else { lo };
        (lo, c + &self.radius)
    }

    fn disjoint_from(&self, other: &RootDisc) -> bool {
        let dr = &self.re - &other.re;
        let di = &self.im - &other.im;
        let d2 = &dr * &dr + &di * &di;
        let s = &self.radius + &other.radius;
        d2 > &s * &s
    }

    fn box_disjoint_from(&self, other: &RootDisc) -> bool {
        !self.ball().intersects(&other.ball())
    }

    fn contains_disc(&self, other: &RootDisc) -> bool {
        if other.radius > self.radius {
            return false;
        }
        let dr = &self.re - &other.re;
        let di = &self.im - &other.im;
        let d2 = &dr * &dr + &di * &di;
        let s = &self.radius - &other.radius;
        d2 <= &s * &s
    }
}

#[derive(Clone, Debug)]
struct CQ {
    re: Q,
    im: Q,
}

impl CQ {
    fn mul(&self, o: &CQ) -> CQ {
        CQ { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
    fn norm_sq(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
}

/// `(p(c), p'(c))` exactly.
fn eval_with_derivative(p: &Poly<Q>, re: &Q, im: &Q) -> (CQ, CQ) {
    let c = CQ { re: re.clone(), im: im.clone() };
    let mut v = CQ { re: Q::zero(), im: Q::zero() };
    let mut d = CQ { re: Q::zero(), im: Q::zero() };
    for a in p.coeffs().iter().rev() {
        d = d.mul(&c);
        d.re += &v.re;
        d.im += &v.im;
        v = v.mul(&c);
        v.re += a;
    }
    (v, d)
}

/// Inclusion radius `n |p(c)/p'(c)|`, `None` when `p'(c) = 0` and `p(c) != 0`.
fn inclusion_radius(p: &Poly<Q>, re: &Q, im: &Q) -> Option<Q> {
    let (v, d) = eval_with_derivative(p, re, im);
    let vn = v.norm_sq();
    if vn.is_zero() {
        return Some(Q::zero());
    }
    let dn = d.norm_sq();
    if dn.is_zero() {
        return None;
    }
    let n = Q::from_integer(p.deg().into());
    Some(sqrt_upper(&(&n * &n * vn / dn)))
}

fn round_abs(x: &Q, bits: u32) -> Q {
    let s = pow2(bits as i64);
    Q::from_integer(super::floor_q(&(x * &s + Q::new(1.into(), 2.into())))) / s
}

/// One exact Newton step from `(re, im)` rounded to `bits` fractional bits.
fn newton_step(p: &Poly<Q>, re: &Q, im: &Q, bits: u32, real: bool) -> Option<(Q, Q)> {
    let (v, d) = eval_with_derivative(p, re, im);
    let dn = d.norm_sq();
    if dn.is_zero() {
        return None;
    }
    // v / d = v * conj(d) / |d|^2
    let qre = (&v.re * &d.re + &v.im * &d.im) / &dn;
    let qim = (&v.im * &d.re - &v.re * &d.im) / &dn;
    let nre = round_abs(&(re - qre), bits);
    let nim = if real { Q::zero() } else { round_abs(&(im - qim), bits) };
    Some((nre, nim))
}

fn aberth(p: &Poly<Q>) -> Vec<Complex64> {
    let n = p.deg() as usize;
    let lc = to_f64(&p.lc());
    let c: Vec<Complex64> = p.coeffs().iter().map(|a| Complex64::new(to_f64(a) / lc, 0.0)).collect();
    let mut r0: f64 = 0.0;
    for (i, a) in c.iter().enumerate().take(n) {
        let m = a.norm();
        if m > 0.0 {
            r0 = r0.max(m.powf(1.0 / (n - i) as f64));
        }
    }
    if r0 == 0.0 || !r0.is_finite() {
        r0 = 1.0;
    }
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| {
        let mut v = Complex64::zero();
        let mut d = Complex64::zero();
        for a in c.iter().rev() {
            d = d * x + v;
            v = v * x + a;
        }
        (v, d)
    };
    for _ in 0..2000 {
        let mut done = true;
        for k in 0..n {
            let (v, d) = eval(z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let w = v / d;
            let mut s = Complex64::zero();
            for j in 0..n {
                if j != k {
                    s += Complex64::one() / (z[k] - z[j]);
                }
            }
            let corr = w / (Complex64::one() - w * s);
            if corr.is_finite() {
                z[k] -= corr;
                if corr.norm() > 1e-15 * z[k].norm().max(1e-300) {
                    done = false;
                }
            }
        }
        if done {
            break;
        }
    }
    z
}

/// Isolates all complex roots of a squarefree nonconstant polynomial.
pub fn isolate_complex_roots(p: &Poly<Q>) -> Result<Vec<RootDisc>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = p.deg() as usize;
    if n == 0 {
        return Ok(Vec::new());
    }
    if !p.gcd(&p.derivative()).is_one() {
        return Err(Error::PreconditionViolated("root isolation needs a squarefree polynomial".into()));
    }
    if n == 1 {
        let r = -p.coeff(0) / p.coeff(1);
        return Ok(vec![RootDisc { re: r, im: Q::zero(), radius: Q::zero() }]);
    }
    let approx = aberth(p);
    let mut centers: Vec<(Q, Q)> = approx
        .iter()
        .map(|z| {
            let re = if z.re.is_finite() { from_f64(z.re) } else { Q::zero() };
            let im = if z.im.is_finite() { from_f64(z.im) } else { Q::zero() };
            (re, im)
        })
        .collect();
    let mut bits = 60u32;
    for _ in 0..12 {
        if let Some(discs) = try_certify(p, &centers) {
            return Ok(discs);
        }
        for _ in 0..3 {
            for c in centers.iter_mut() {
                if let Some(nc) = newton_step(p, &c.0, &c.1, bits, false) {
                    *c = nc;
                }
            }
        }
        bits = bits.saturating_mul(2).min(1 << 14);
    }
    Err(Error::PreconditionViolated("root isolation did not converge".into()))
}

fn try_certify(p: &Poly<Q>, centers: &[(Q, Q)]) -> Option<Vec<RootDisc>> {
    let mut discs = Vec::with_capacity(centers.len());
    for (re, im) in centers {
        let r = inclusion_radius(p, re, im)?;
        discs.push(RootDisc { re: re.clone(), im: im.clone(), radius: r });
    }
    if !pairwise(&discs, RootDisc::disjoint_from) {
        return None;
    }
    // Collapse discs straddling the real axis onto it; the grown disc is
    // conjugation symmetric so its unique root is real.
    let mut out = discs.clone();
    for i in 0..out.len() {
        let d = &discs[i];
        if d.im.abs() <= d.radius && !d.im.is_zero() {
            out[i] = RootDisc { re: d.re.clone(), im: Q::zero(), radius: &d.radius + d.im.abs() };
        }
    }
    if !pairwise(&out, RootDisc::disjoint_from) || !pairwise(&out, RootDisc::box_disjoint_from) {
        return None;
    }
    Some(out)
}

fn pairwise(d: &[RootDisc], ok: impl Fn(&RootDisc, &RootDisc) -> bool) -> bool {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if !ok(&d[i], &d[j]) {
                return false;
            }
        }
    }
    true
}

/// Shrinks an isolating disc of `p` until its radius is at most `target`.
/// Each accepted step lands inside the previous disc, so the enclosed root
/// never changes.
pub fn refine_root(p: &Poly<Q>, disc: &RootDisc, target: &Q) -> RootDisc {
    let mut cur = disc.clone();
    let mut bits = 64u32;
    while cur.radius > *target && !cur.radius.is_zero() {
        let want = (-super::log2_abs(&cur.radius)).max(0.0) as u32 * 2 + 32;
        bits = bits.max(want);
        let real = cur.is_real();
        let next = newton_step(p, &cur.re, &cur.im, bits, real).and_then(|(re, im)| {
            inclusion_radius(p, &re, &im).map(|radius| RootDisc { re, im, radius })
        });
        match next {
            Some(nd) if cur.contains_disc(&nd) && &nd.radius * Q::from_integer(2.into()) <= cur.radius => {
                cur = nd;
            }
            Some(nd) if cur.contains_disc(&nd) && nd.radius < cur.radius => {
                cur = nd;
                bits = bits.saturating_mul(2);
            }
            _ => {
                bits = bits.saturating_mul(2);
                if bits > 1 << 20 {
                    panic!("root refinement stalled");
                }
            }
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{qi, qr};

    fn count_inside(discs: &[RootDisc], re: f64, im: f64) -> usize {
        discs
            .iter()
            .filter(|d| {
                let c = d.center_f64();
                let r = to_f64(&d.radius);
                (c.re - re).hypot(c.im - im) <= r + 1e-12
            })
            .count()
    }

    #[test]
    fn golden_ratio_roots() {
        let p = Poly::from_i64s(&[-1, -1, 1]);
        let d = isolate_complex_roots(&p).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|x| x.is_real()));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(count_inside(&d, phi, 0.0), 1);
        assert_eq!(count_inside(&d, 1.0 - phi, 0.0), 1);
    }

    #[test]
    fn cube_roots_of_unity_and_refinement() {
        let p = Poly::from_i64s(&[1, 1, 1]);
        let d = isolate_complex_roots(&p).unwrap();
        assert_eq!(d.len(), 2);
        for x in &d {
            let r = refine_root(&p, x, &pow2(-100));
            assert!(r.radius <= pow2(-100));
            let b = r.ball();
            assert!(b.re.contains(&qr(-1, 2)));
            assert!(!b.im.contains_zero());
        }
    }

    #[test]
    fn exact_rational_roots() {
        let p = Poly::new(vec![qi(-1), qi(2)]);
        let d = isolate_complex_roots(&p).unwrap();
        assert_eq!(d[0].re, qr(1, 2));
        let p = Poly::from_i64s(&[-2, 1, 1]);
        let d = isolate_complex_roots(&p).unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn rejects_repeated_roots() {
        let p = Poly::from_i64s(&[1, -2, 1]);
        assert!(isolate_complex_roots(&p).is_err());
    }

    #[test]
    fn degree_twelve_cyclotomic_like() {
        // z^12 - 2: roots on a circle of radius 2^(1/12)
        let mut cs = vec![0i64; 13];
        cs[0] = -2;
        cs[12] = 1;
        let p = Poly::from_i64s(&cs);
        let d = isolate_complex_roots(&p).unwrap();
        assert_eq!(d.len(), 12);
        let r = 2f64.powf(1.0 / 12.0);
        for x in &d {
            assert!((x.center_f64().norm() - r).abs() < 1e-9);
        }
    }
}
