//! Lazily extended power series with exact coefficients.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, NfElem, Ring};
use crate::mahler::AutomatonSeq;
use crate::poly::{KPoly, RatFunc};

type K = NfElem;
type CoeffFn = Arc<dyn Fn(usize) -> K + Send + Sync>;

/// Rule producing the coefficients of a series.
#[derive(Clone)]
pub enum Rule {
    /// Finitely many coefficients, zero afterwards.
    Fixed(Vec<K>),
    /// Closed-form coefficient formula.
    Closed(CoeffFn),
    Automaton(Arc<AutomatonSeq>),
    /// Expansion of a rational function regular at the origin.
    Rational(RatFunc<K>),
    /// Solution of `sum_i a_i(z) f(z^(q^i)) + b(z) = 0` with given initial
    /// terms.
    SigmaRecurrence { q: u64, coeffs: Vec<KPoly>, inhom: KPoly, initial: Vec<K> },
    /// Solution of `sum_i a_i(z) f^(i)(z) = 0` with given initial terms.
    DeltaRecurrence { coeffs: Vec<KPoly>, initial: Vec<K>, shift: i64 },
    /// `sum_j p_j(z) f_j(z)`.
    Linear(Vec<(KPoly, PowerSeries)>),
    Product(PowerSeries, PowerSeries),
    /// `f(z^k)`.
    SubstPower(PowerSeries, usize),
    Derivative(PowerSeries),
    /// `f(z) / p(z)` with `p(0) != 0`.
    DivPoly(PowerSeries, KPoly),
    /// Coefficient-wise image.
    Map(PowerSeries, Arc<dyn Fn(&K) -> K + Send + Sync>),
}

struct Inner {
    rule: Rule,
    desc: String,
    cache: Mutex<Vec<K>>,
}

/// Power series whose prefix is computed on demand. Extending the prefix
/// never changes already produced coefficients; the cache is shared between
/// clones and guarded by a mutex.
#[derive(Clone)]
pub struct PowerSeries(Arc<Inner>);

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowerSeries({})", self.0.desc)
    }
}

impl PowerSeries {
    fn with_rule(rule: Rule, desc: impl Into<String>) -> Self {
        PowerSeries(Arc::new(Inner { rule, desc: desc.into(), cache: Mutex::new(Vec::new()) }))
    }

    pub fn description(&self) -> &str {
        &self.0.desc
    }

    pub fn rule(&self) -> &Rule {
        &self.0.rule
    }

    pub fn from_vec(coeffs: Vec<K>) -> Self {
        Self::with_rule(Rule::Fixed(coeffs), "polynomial")
    }

    pub fn polynomial(p: &KPoly) -> Self {
        Self::from_vec(p.coeffs().to_vec())
    }

    pub fn one() -> Self {
        Self::with_rule(Rule::Fixed(vec![K::one()]), "1")
    }

    pub fn from_fn(desc: impl Into<String>, f: impl Fn(usize) -> K + Send + Sync + 'static) -> Self {
        Self::with_rule(Rule::Closed(Arc::new(f)), desc)
    }

    pub fn automaton(a: AutomatonSeq) -> Self {
        Self::with_rule(Rule::Automaton(Arc::new(a)), "automaton")
    }

    pub fn rational(r: RatFunc<K>) -> Result<Self> {
        if r.den().coeff(0).is_zero() {
            return Err(Error::DenominatorSingularAtOrigin);
        }
        let d = format!("{r}");
        Ok(Self::with_rule(Rule::Rational(r), d))
    }

    /// Solution of the Mahler equation `sum_i a_i f(z^(q^i)) + b = 0`
    /// determined by `initial`. Fails when a coefficient beyond the initial
    /// ones is not determined by the equation.
    pub fn sigma_recurrence(q: u64, coeffs: Vec<KPoly>, inhom: KPoly, initial: Vec<K>) -> Result<Self> {
        let v = coeffs
            .first()
            .and_then(|p| p.valuation())
            .ok_or_else(|| Error::PreconditionViolated("constant coefficient must be nonzero".into()))?;
        let need = v / (q as usize - 1) + 1;
        if initial.len() < need {
            return Err(Error::PreconditionViolated(format!(
                "at least {need} initial coefficients are needed"
            )));
        }
        let s = Self::with_rule(Rule::SigmaRecurrence { q, coeffs, inhom, initial }, "sigma recurrence");
        s.coeffs(need + 1);
        Ok(s)
    }

    /// Solution of `sum_i a_i(z) f^(i) = 0` determined by `initial`.
    pub fn delta_recurrence(coeffs: Vec<KPoly>, initial: Vec<K>) -> Result<Self> {
        let mut shift = i64::MIN;
        for (i, a) in coeffs.iter().enumerate() {
            if let Some(v) = a.valuation() {
                shift = shift.max(i as i64 - v as i64);
            }
        }
        if shift == i64::MIN {
            return Err(Error::ZeroOperator);
        }
        // the coefficient of f_t in the equation producing it is a
        // polynomial in t; its nonnegative integer roots must be covered by
        // the initial terms
        let c = indicial(&coeffs, shift);
        let bound = root_bound(&c);
        for t in initial.len()..=bound {
            if c.eval(&K::from_i64(t as i64)).is_zero() {
                return Err(Error::PreconditionViolated(format!(
                    "coefficient {t} is not determined; give more initial terms"
                )));
            }
        }
        Ok(Self::with_rule(Rule::DeltaRecurrence { coeffs, initial, shift }, "delta recurrence"))
    }

    pub fn linear(terms: Vec<(KPoly, PowerSeries)>) -> Self {
        Self::with_rule(Rule::Linear(terms), "linear combination")
    }

    pub fn add(&self, o: &PowerSeries) -> Self {
        Self::linear(vec![(KPoly::one(), self.clone()), (KPoly::one(), o.clone())])
    }

    pub fn sub(&self, o: &PowerSeries) -> Self {
        Self::linear(vec![(KPoly::one(), self.clone()), (-KPoly::one(), o.clone())])
    }

    pub fn mul_poly(&self, p: &KPoly) -> Self {
        Self::linear(vec![(p.clone(), self.clone())])
    }

    pub fn mul(&self, o: &PowerSeries) -> Self {
        Self::with_rule(Rule::Product(self.clone(), o.clone()), "product")
    }

    pub fn subst_power(&self, k: usize) -> Self {
        if k == 1 {
            return self.clone();
        }
        Self::with_rule(Rule::SubstPower(self.clone(), k), format!("f(z^{k})"))
    }

    pub fn derivative(&self) -> Self {
        Self::with_rule(Rule::Derivative(self.clone()), "derivative")
    }

    pub fn div_poly(&self, p: &KPoly) -> Result<Self> {
        if p.coeff(0).is_zero() {
            return Err(Error::DenominatorSingularAtOrigin);
        }
        Ok(Self::with_rule(Rule::DivPoly(self.clone(), p.clone()), "quotient"))
    }

    pub fn map(&self, f: impl Fn(&K) -> K + Send + Sync + 'static) -> Self {
        Self::with_rule(Rule::Map(self.clone(), Arc::new(f)), "mapped")
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs(i + 1)[i].clone()
    }

    /// The first `n` coefficients.
    pub fn coeffs(&self, n: usize) -> Vec<K> {
        let mut cache = self.0.cache.lock().expect("series cache poisoned");
        if cache.len() < n {
            let start = cache.len();
            self.extend(&mut cache, start, n);
        }
        cache[..n].to_vec()
    }

    /// Truncation to a polynomial of degree `< n`.
    pub fn truncated(&self, n: usize) -> KPoly {
        KPoly::new(self.coeffs(n))
    }

    fn extend(&self, cache: &mut Vec<K>, start: usize, n: usize) {
        match &self.0.rule {
            Rule::Fixed(v) => {
                for i in start..n {
                    cache.push(v.get(i).cloned().unwrap_or_else(K::zero));
                }
            }
            Rule::Closed(f) => {
                for i in start..n {
                    cache.push(f(i));
                }
            }
            Rule::Automaton(a) => {
                for i in start..n {
                    cache.push(a.term(i as u64));
                }
            }
            Rule::Rational(r) => {
                let num = r.num();
                let den = r.den();
                let inv = den.coeff(0).inv().expect("regular at origin");
                for i in start..n {
                    let mut acc = num.coeff(i);
                    for (k, d) in den.coeffs().iter().enumerate().skip(1).take(i) {
                        if !d.is_zero() {
                            acc = acc - &(d.clone() * &cache[i - k]);
                        }
                    }
                    cache.push(acc * &inv);
                }
            }
            Rule::SigmaRecurrence { q, coeffs, inhom, initial } => {
                for t in start..n {
                    let c = if t < initial.len() {
                        initial[t].clone()
                    } else {
                        sigma_solve(*q, coeffs, inhom, t, cache)
                    };
                    cache.push(c);
                }
            }
            Rule::DeltaRecurrence { coeffs, initial, shift } => {
                for t in start..n {
                    let c = if t < initial.len() {
                        initial[t].clone()
                    } else {
                        delta_solve(coeffs, *shift, t, cache)
                    };
                    cache.push(c);
                }
            }
            Rule::Linear(terms) => {
                let parts: Vec<(Vec<K>, &KPoly)> = terms.iter().map(|(p, f)| (f.coeffs(n), p)).collect();
                for i in start..n {
                    let mut acc = K::zero();
                    for (fc, p) in &parts {
                        for (k, pk) in p.coeffs().iter().enumerate().take(i + 1) {
                            if !pk.is_zero() {
                                acc = acc + &(pk.clone() * &fc[i - k]);
                            }
                        }
                    }
                    cache.push(acc);
                }
            }
            Rule::Product(a, b) => {
                let x = a.coeffs(n);
                let y = b.coeffs(n);
                for i in start..n {
                    let mut acc = K::zero();
                    for j in 0..=i {
                        if !x[j].is_zero() && !y[i - j].is_zero() {
                            acc = acc + &(x[j].clone() * &y[i - j]);
                        }
                    }
                    cache.push(acc);
                }
            }
            Rule::SubstPower(f, k) => {
                let x = f.coeffs((n + k - 1) / k);
                for i in start..n {
                    cache.push(if i % k == 0 { x[i / k].clone() } else { K::zero() });
                }
            }
            Rule::Derivative(f) => {
                let x = f.coeffs(n + 1);
                for i in start..n {
                    cache.push(x[i + 1].clone() * &K::from_i64(i as i64 + 1));
                }
            }
            Rule::DivPoly(f, p) => {
                let x = f.coeffs(n);
                let inv = p.coeff(0).inv().expect("regular at origin");
                for i in start..n {
                    let mut acc = x[i].clone();
                    for (k, d) in p.coeffs().iter().enumerate().skip(1).take(i) {
                        if !d.is_zero() {
                            acc = acc - &(d.clone() * &cache[i - k]);
                        }
                    }
                    cache.push(acc * &inv);
                }
            }
            Rule::Map(f, g) => {
                let x = f.coeffs(n);
                for xi in x.iter().take(n).skip(start) {
                    cache.push(g(xi));
                }
            }
        }
    }
}

/// Solves the coefficient equation at `z^(t+v)` for `f_t`.
fn sigma_solve(q: u64, coeffs: &[KPoly], inhom: &KPoly, t: usize, prefix: &[K]) -> K {
    let v = coeffs[0].valuation().expect("nonzero constant coefficient");
    let e = t + v;
    let mut lead = K::zero();
    let mut rest = inhom.coeff(e);
    let mut qi: usize = 1;
    for a in coeffs {
        for (k, ak) in a.coeffs().iter().enumerate().take(e + 1) {
            if ak.is_zero() || (e - k) % qi != 0 {
                continue;
            }
            let idx = (e - k) / qi;
            if idx == t {
                lead = lead + ak;
            } else {
                debug_assert!(idx < t);
                rest = rest + &(ak.clone() * &prefix[idx]);
            }
        }
        qi = qi.saturating_mul(q as usize);
    }
    let inv = lead.inv().expect("coefficient determined by the recurrence");
    -(rest * &inv)
}

fn falling(t: i64, i: usize) -> K {
    let mut acc = K::one();
    for j in 0..i as i64 {
        acc = acc * &K::from_i64(t - j);
    }
    acc
}

/// Coefficient of `f_t` in the equation that produces it, as a polynomial
/// in `t`.
fn indicial(coeffs: &[KPoly], shift: i64) -> KPoly {
    let mut c = KPoly::zero();
    for (i, a) in coeffs.iter().enumerate() {
        let k = i as i64 - shift;
        if k < 0 {
            continue;
        }
        let ak = a.coeff(k as usize);
        if ak.is_zero() {
            continue;
        }
        // t (t - 1) ... (t - i + 1)
        let mut f = KPoly::one();
        for j in 0..i as i64 {
            f = &f * &KPoly::new(vec![K::from_i64(-j), K::one()]);
        }
        c = &c + &f.scale(&ak);
    }
    c
}

fn root_bound(c: &KPoly) -> usize {
    let Some(d) = c.degree() else { return 0 };
    if d == 0 {
        return 0;
    }
    let lc = c.lc();
    let mut m = 0f64;
    for a in &c.coeffs()[..d] {
        let r = (a.clone() * &lc.inv().unwrap()).to_complex().norm();
        m = m.max(r);
    }
    (m + 2.0).ceil() as usize
}

/// Solves the coefficient equation at `z^(t - shift)` for `f_t`.
fn delta_solve(coeffs: &[KPoly], shift: i64, t: usize, prefix: &[K]) -> K {
    let e = t as i64 - shift;
    let mut lead = K::zero();
    let mut rest = K::zero();
    for (i, a) in coeffs.iter().enumerate() {
        for (k, ak) in a.coeffs().iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            // a_{i,k} z^k f^(i) contributes f_{e-k+i} (e-k+i)!/(e-k)! at z^e
            let idx = e - k as i64 + i as i64;
            if idx < 0 || e - (k as i64) < 0 {
                continue;
            }
            let w = ak.clone() * &falling(idx, i);
            if idx as usize == t {
                lead = lead + &w;
            } else {
                rest = rest + &(w * &prefix[idx as usize]);
            }
        }
    }
    let inv = lead.inv().expect("coefficient determined by the recurrence");
    -(rest * &inv)
}
