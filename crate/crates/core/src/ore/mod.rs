//! Skew operators in `sigma_q` (f -> f(z^q)) or `delta` (f -> f').
//!
//! Coefficients are stored as polynomials over a single global denominator.

mod laplace;
mod series;
mod system;

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, NfElem, Ring};
use crate::poly::{KPoly, RatFunc};

pub use laplace::{fourier_laplace, inverse_fourier_laplace};
pub use series::{PowerSeries, Rule};
pub use system::SystemMatrix;

type K = NfElem;
pub type KRat = RatFunc<K>;

/// The skew variable: `Sigma(q)` or `Delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Sigma(u64),
    Delta,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Sigma(_) => "sigma",
            Kind::Delta => "delta",
        }
    }

    pub fn q(&self) -> Option<u64> {
        match self {
            Kind::Sigma(q) => Some(*q),
            Kind::Delta => None,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Kind::Sigma(_) => "S",
            Kind::Delta => "D",
        }
    }

    /// Image of a coefficient under the skew variable's automorphism part:
    /// `c(z^q)` for sigma; identity for delta.
    pub fn twist(&self, c: &KPoly, times: usize) -> KPoly {
        match self {
            Kind::Sigma(q) => c.substitute_power(pow_usize(*q, times)),
            Kind::Delta => c.clone(),
        }
    }

    /// Applies `Theta^j` to a series.
    pub fn apply_power(&self, f: &PowerSeries, j: usize) -> PowerSeries {
        match self {
            Kind::Sigma(q) => f.subst_power(pow_usize(*q, j)),
            Kind::Delta => {
                let mut g = f.clone();
                for _ in 0..j {
                    g = g.derivative();
                }
                g
            }
        }
    }
}

pub fn pow_usize(q: u64, e: usize) -> usize {
    (q as usize).checked_pow(e as u32).expect("exponent overflow")
}

fn binom(n: usize, k: usize) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

/// `sum_i (coeffs[i] / den) Theta^i`.
#[derive(Clone, PartialEq)]
pub struct Operator {
    kind: Kind,
    coeffs: Vec<KPoly>,
    den: KPoly,
}

impl Operator {
    pub fn new(kind: Kind, coeffs: Vec<KPoly>) -> Self {
        Self::with_den(kind, coeffs, KPoly::one())
    }

    pub fn with_den(kind: Kind, mut coeffs: Vec<KPoly>, den: KPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let mut op = Operator { kind, coeffs, den };
        op.reduce();
        op
    }

    pub fn zero(kind: Kind) -> Self {
        Self::new(kind, Vec::new())
    }

    pub fn one(kind: Kind) -> Self {
        Self::new(kind, vec![KPoly::one()])
    }

    /// `Theta`.
    pub fn theta(kind: Kind) -> Self {
        Self::new(kind, vec![KPoly::zero(), KPoly::one()])
    }

    pub fn from_ratfuncs(kind: Kind, cs: &[KRat]) -> Self {
        let mut den = KPoly::one();
        for c in cs {
            let g = den.gcd(c.den());
            den = &den * &c.den().exact_div(&g).expect("gcd divides");
        }
        let coeffs = cs.iter().map(|c| c.num() * &den.exact_div(c.den()).expect("lcm")).collect();
        Self::with_den(kind, coeffs, den)
    }

    fn reduce(&mut self) {
        if self.coeffs.is_empty() {
            self.den = KPoly::one();
            return;
        }
        let mut g = self.den.clone();
        for c in &self.coeffs {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_constant() {
            self.den = self.den.exact_div(&g).unwrap();
            for c in self.coeffs.iter_mut() {
                *c = c.exact_div(&g).unwrap();
            }
        }
        let l = self.den.lc().inv().unwrap();
        if !l.is_one() {
            self.den = self.den.scale(&l);
            for c in self.coeffs.iter_mut() {
                *c = c.scale(&l);
            }
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Numerator coefficients (index = power of Theta).
    pub fn coeffs(&self) -> &[KPoly] {
        &self.coeffs
    }

    pub fn den(&self) -> &KPoly {
        &self.den
    }

    pub fn coeff(&self, i: usize) -> KRat {
        let n = self.coeffs.get(i).cloned().unwrap_or_else(KPoly::zero);
        KRat::new(n, self.den.clone()).expect("nonzero denominator")
    }

    pub fn ratfuncs(&self) -> Vec<KRat> {
        (0..self.coeffs.len()).map(|i| self.coeff(i)).collect()
    }

    pub fn leading_coeff(&self) -> KPoly {
        self.coeffs.last().cloned().unwrap_or_else(KPoly::zero)
    }

    pub fn max_coeff_degree(&self) -> usize {
        self.coeffs.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
    }

    /// Polynomial-coefficient form with coprime coefficients. Rational
    /// coefficients are scaled to integers with content 1 and a positive
    /// lowest nonzero coefficient; algebraic ones are scaled to make that
    /// coefficient 1.
    pub fn primitive(&self) -> Operator {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = KPoly::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        let mut cs: Vec<KPoly> = self.coeffs.iter().map(|c| c.exact_div(&g).unwrap()).collect();
        let first = cs
            .iter()
            .flat_map(|c| c.coeffs().iter())
            .find(|x| !x.is_zero())
            .cloned()
            .unwrap();
        let all_rational = cs.iter().all(|c| c.coeffs().iter().all(|x| x.is_rational()));
        let s = if all_rational {
            let qs: Vec<crate::field::Q> = cs
                .iter()
                .flat_map(|c| c.coeffs().iter().map(|x| x.to_rational().unwrap()))
                .collect();
            let mut s = integer_scale(&qs);
            if (first.to_rational().unwrap() * &s) < crate::field::Q::zero() {
                s = -s;
            }
            K::Rational(s)
        } else {
            first.inv().unwrap()
        };
        for c in cs.iter_mut() {
            *c = c.scale(&s);
        }
        Operator::new(self.kind, cs)
    }

    pub fn scale(&self, r: &KRat) -> Operator {
        let cs: Vec<KRat> = self.ratfuncs().iter().map(|c| c * r).collect();
        Operator::from_ratfuncs(self.kind, &cs)
    }

    pub fn add(&self, o: &Operator) -> Result<Operator> {
        self.check_kind(o)?;
        let n = self.coeffs.len().max(o.coeffs.len());
        let cs: Vec<KRat> = (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect();
        Ok(Operator::from_ratfuncs(self.kind, &cs))
    }

    pub fn sub(&self, o: &Operator) -> Result<Operator> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Operator {
        Operator { kind: self.kind, coeffs: self.coeffs.iter().map(|c| -c).collect(), den: self.den.clone() }
    }

    fn check_kind(&self, o: &Operator) -> Result<()> {
        if self.kind != o.kind {
            return Err(Error::KindMismatch);
        }
        Ok(())
    }

    /// `Theta^i * c` written as `sum_k c_k Theta^k`.
    fn commute(&self, i: usize, c: &KRat) -> Vec<(usize, KRat)> {
        match self.kind {
            Kind::Sigma(q) => vec![(i, c.substitute_power(pow_usize(q, i)))],
            Kind::Delta => {
                let mut out = Vec::new();
                let mut d = c.clone();
                for k in 0..=i {
                    if !d.is_zero() {
                        let b = K::from_i64(binom(i, k));
                        out.push((i - k, &d * &KRat::constant(b)));
                    }
                    d = d.derivative();
                }
                out
            }
        }
    }

    /// Skew product `self * o`.
    pub fn skew_mul(&self, o: &Operator) -> Result<Operator> {
        self.check_kind(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Operator::zero(self.kind));
        }
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut acc = vec![KRat::zero(); n];
        let bs = o.ratfuncs();
        for (i, a) in self.ratfuncs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in bs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for (k, c) in self.commute(i, b) {
                    acc[k + j] = &acc[k + j] + &(a * &c);
                }
            }
        }
        Ok(Operator::from_ratfuncs(self.kind, &acc))
    }

    /// `Theta^s * self` for sigma kind: `sum a_i(z^(q^s)) Theta^(i+s)`.
    pub fn sigma_shift(&self, s: usize) -> Operator {
        let mut cs = vec![KPoly::zero(); s];
        cs.extend(self.coeffs.iter().map(|c| self.kind.twist(c, s)));
        Operator::with_den(self.kind, cs, self.kind.twist(&self.den, s))
    }

    /// `L(f) mod z^n`. The denominator must not vanish at the origin.
    pub fn apply(&self, f: &PowerSeries, n: usize) -> Result<Vec<K>> {
        let num = self.apply_numerator(f, n);
        if self.den.is_one() {
            return Ok(num);
        }
        if self.den.coeff(0).is_zero() {
            return Err(Error::DenominatorSingularAtOrigin);
        }
        Ok(PowerSeries::from_vec(num).div_poly(&self.den)?.coeffs(n))
    }

    /// `(den * L)(f) mod z^n`, always defined.
    pub fn apply_numerator(&self, f: &PowerSeries, n: usize) -> Vec<K> {
        let mut out = vec![K::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let g = self.kind.apply_power(f, i).coeffs(n);
            for (k, ak) in a.coeffs().iter().enumerate().take(n) {
                if ak.is_zero() {
                    continue;
                }
                for t in k..n {
                    if !g[t - k].is_zero() {
                        out[t] = out[t].clone() + &(ak.clone() * &g[t - k]);
                    }
                }
            }
        }
        out
    }

    /// Right Euclidean division: `self = Q * b + R` with `ord R < ord b`.
    pub fn right_divide(&self, b: &Operator) -> Result<(Operator, Operator)> {
        self.check_kind(b)?;
        let Some(nb) = b.order() else {
            return Err(Error::DivisionByZeroOperator);
        };
        let lb = b.coeff(nb);
        let mut q = Operator::zero(self.kind);
        let mut r = self.clone();
        while let Some(nr) = r.order() {
            if nr < nb {
                break;
            }
            let k = nr - nb;
            let lead = match self.kind {
                Kind::Sigma(qq) => lb.substitute_power(pow_usize(qq, k)),
                Kind::Delta => lb.clone(),
            };
            let c = &r.coeff(nr) * &lead.recip().expect("nonzero leading coefficient");
            let mut cs = vec![KRat::zero(); k + 1];
            cs[k] = c;
            let t = Operator::from_ratfuncs(self.kind, &cs);
            q = q.add(&t)?;
            r = r.sub(&t.skew_mul(b)?)?;
            if r.order().is_some_and(|o| o >= nr) {
                // exact arithmetic makes the leading term cancel
                unreachable!("leading term did not cancel");
            }
        }
        Ok((q, r))
    }

    /// Greatest common right divisor, made monic in its leading coefficient.
    pub fn gcrd(&self, o: &Operator) -> Result<Operator> {
        self.check_kind(o)?;
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.right_divide(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        let l = a.coeff(a.order().unwrap()).recip().unwrap();
        Ok(a.scale(&l))
    }

    /// Companion system for the vector `(f, Theta f, ..., Theta^(m-1) f)`.
    pub fn companion(&self) -> Result<SystemMatrix> {
        let Some(m) = self.order() else {
            return Err(Error::ZeroOperator);
        };
        if m == 0 {
            return Err(Error::ZeroOperator);
        }
        let am = self.coeff(m);
        let inv = am.recip().ok_or(Error::ZeroOperator)?;
        let mut rows = vec![vec![KRat::zero(); m]; m];
        for (i, row) in rows.iter_mut().enumerate().take(m - 1) {
            row[i + 1] = KRat::one();
        }
        for j in 0..m {
            rows[m - 1][j] = -(&self.coeff(j) * &inv);
        }
        let labels = (0..m).map(|j| format!("{}^{}f", self.kind.symbol(), j)).collect();
        SystemMatrix::new(self.kind, rows, labels)
    }

    pub fn map_coeffs(&self, f: impl Fn(&K) -> K) -> Operator {
        Operator::with_den(self.kind, self.coeffs.iter().map(|c| c.map(&f)).collect(), self.den.map(&f))
    }

    /// Human-readable form, e.g. `1 + (-z)*S - S^2`.
    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let sym = self.kind.symbol();
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let t = match i {
                0 => cs,
                _ => {
                    let th = if i == 1 { sym.to_string() } else { format!("{sym}^{i}") };
                    if c.is_one() {
                        th
                    } else {
                        format!("({cs})*{th}")
                    }
                }
            };
            parts.push(t);
        }
        let body = parts.join(" + ");
        if self.den.is_one() {
            body
        } else {
            format!("({body}) / ({})", self.den)
        }
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.kind.name(), self.display())
    }
}

/// Positive rational `s` such that `s * x` are coprime integers.
fn integer_scale(xs: &[crate::field::Q]) -> crate::field::Q {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut den = BigInt::one();
    for x in xs {
        den = den.lcm(x.denom());
    }
    let mut g = BigInt::zero();
    for x in xs {
        let v = x.numer() * (&den / x.denom());
        g = g.gcd(&v);
    }
    if g.is_zero() {
        return crate::field::Q::one();
    }
    crate::field::Q::new(den, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> KPoly {
        KPoly::from_i64s(c)
    }

    fn op(kind: Kind, cs: &[&[i64]]) -> Operator {
        Operator::new(kind, cs.iter().map(|c| p(c)).collect())
    }

    #[test]
    fn commutation_laws() {
        let s = Operator::theta(Kind::Sigma(2));
        let z = op(Kind::Sigma(2), &[&[0, 1]]);
        assert_eq!(s.skew_mul(&z).unwrap(), op(Kind::Sigma(2), &[&[], &[0, 0, 1]]));
        let d = Operator::theta(Kind::Delta);
        let zd = op(Kind::Delta, &[&[0, 1]]);
        assert_eq!(d.skew_mul(&zd).unwrap(), op(Kind::Delta, &[&[1], &[0, 1]]));
        let a = op(Kind::Sigma(3), &[&[1], &[1]]);
        let b = op(Kind::Sigma(3), &[&[1], &[-1]]);
        assert_eq!(a.skew_mul(&b).unwrap(), op(Kind::Sigma(3), &[&[1], &[], &[-1]]));
        assert!(matches!(a.skew_mul(&d), Err(Error::KindMismatch)));
    }

    #[test]
    fn right_division_examples() {
        for kind in [Kind::Sigma(2), Kind::Delta] {
            let a = op(kind, &[&[], &[], &[1]]);
            let b = op(kind, &[&[-1], &[1]]);
            let (q, r) = a.right_divide(&b).unwrap();
            assert_eq!(q, op(kind, &[&[1], &[1]]));
            assert_eq!(r, op(kind, &[&[1]]));
            let (q, r) = b.right_divide(&b).unwrap();
            assert_eq!(q, Operator::one(kind));
            assert!(r.is_zero());
        }
        let z = Operator::zero(Kind::Delta);
        assert!(matches!(Operator::one(Kind::Delta).right_divide(&z), Err(Error::DivisionByZeroOperator)));
    }

    #[test]
    fn companion_matrices() {
        let bs = op(Kind::Sigma(2), &[&[1], &[0, -1], &[-1]]);
        let a = bs.companion().unwrap();
        assert_eq!(a.entry(1, 0), &KRat::one());
        assert_eq!(a.entry(1, 1), &KRat::from_poly(p(&[0, -1])));
        let e = op(Kind::Delta, &[&[-1], &[1]]).companion().unwrap();
        assert_eq!(e.dim(), 1);
        assert_eq!(e.entry(0, 0), &KRat::one());
    }

    #[test]
    fn shift_of_baum_sweet_operator() {
        let bs = op(Kind::Sigma(2), &[&[1], &[0, -1], &[-1]]);
        assert_eq!(bs.sigma_shift(0), bs);
        assert_eq!(bs.sigma_shift(1), op(Kind::Sigma(2), &[&[], &[1], &[0, 0, -1], &[-1]]));
    }

    #[test]
    fn gcrd_of_multiples() {
        let k = Kind::Sigma(2);
        let b = op(k, &[&[1], &[0, -1]]);
        let x = op(k, &[&[2], &[1, 1]]).skew_mul(&b).unwrap();
        let y = op(k, &[&[0, 1], &[3]]).skew_mul(&b).unwrap();
        let g = x.gcrd(&y).unwrap();
        let (_, r) = g.right_divide(&b).unwrap();
        assert!(r.is_zero());
        assert_eq!(g.order(), Some(1));
    }

    #[test]
    fn primitive_normalization() {
        let l = Operator::new(Kind::Sigma(2), vec![p(&[-2]), p(&[0, 2]), p(&[2])]);
        assert_eq!(l.primitive(), op(Kind::Sigma(2), &[&[1], &[0, -1], &[-1]]));
    }
}
