//! Certified evaluation of Mahler functions and E-functions at algebraic
//! points.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{log2_abs, pow2, sqrt_lower, sqrt_upper, ComplexBall, Field, NfElem, Q};
use crate::mahler::MahlerFunction;
use crate::ore::{pow_usize, PowerSeries};
use crate::poly::KPoly;

type K = NfElem;

/// Where a coefficient bound comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundProvenance {
    /// Maximum modulus of an automaton's outputs.
    Automaton,
    /// Derived by induction from a functional equation with `a_0(0) != 0`.
    Equation,
    UserSupplied,
    /// Not certified; flagged in every report using it.
    Heuristic,
}

impl BoundProvenance {
    pub fn name(&self) -> &'static str {
        match self {
            BoundProvenance::Automaton => "automaton",
            BoundProvenance::Equation => "equation",
            BoundProvenance::UserSupplied => "user-supplied",
            BoundProvenance::Heuristic => "heuristic",
        }
    }

    pub fn is_certified(&self) -> bool {
        !matches!(self, BoundProvenance::Heuristic)
    }
}

/// `|a_n| <= c rho^n` for all `n >= n0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientBound {
    pub c: Q,
    pub rho: Q,
    pub n0: usize,
    pub provenance: BoundProvenance,
}

impl fmt::Display for CoefficientBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} C={} rho={} n0={}",
            self.provenance.name(),
            crate::field::format_rational(&self.c),
            crate::field::format_rational(&self.rho),
            self.n0
        )
    }
}

/// Upper bound for `|x|`.
pub fn abs_upper(x: &K) -> Q {
    if let Some(q) = x.to_rational() {
        return num_traits::Signed::abs(&q);
    }
    sqrt_upper(&x.embed(&pow2(-40)).abs_sq().mag())
}

/// Lower bound for `|x|`.
pub fn abs_lower(x: &K) -> Q {
    if let Some(q) = x.to_rational() {
        return num_traits::Signed::abs(&q);
    }
    sqrt_lower(&x.embed(&pow2(-80)).abs_sq().mig())
}

/// Coefficients `(a_0, ..., a_m)` and `b` of `sum a_i sigma^i f + b = 0`.
fn equation_of(f: &MahlerFunction) -> Option<(Vec<KPoly>, KPoly)> {
    match (f.equation(), f.annihilator()) {
        (Some(eq), _) => Some((eq.coeffs().to_vec(), eq.inhom().clone())),
        (None, Some(l)) => Some((l.coeffs().to_vec(), KPoly::zero())),
        (None, None) => None,
    }
}

/// Certified bound from the automaton or the functional equation.
pub fn coefficient_bound(f: &MahlerFunction) -> Result<CoefficientBound> {
    if let Some(a) = f.automaton() {
        let c = a.output().iter().map(abs_upper).max().unwrap_or_else(Q::zero);
        return Ok(CoefficientBound { c, rho: Q::one(), n0: 0, provenance: BoundProvenance::Automaton });
    }
    let (coeffs, inhom) = equation_of(f).ok_or_else(|| Error::NoBoundAvailable("no automaton or equation".into()))?;
    equation_bound(f.q(), &coeffs, &inhom, f.series())
}

/// Induction `|f_n| <= C rho^n`: the recurrence read off from the equation
/// gives `|f_n| <= C rho^n (S_0 + A rho^(floor(n/q) - n))` beyond the
/// support of `b`, and `rho` is chosen with `S_0 <= 1/2`.
pub fn equation_bound(q: u64, coeffs: &[KPoly], inhom: &KPoly, series: &PowerSeries) -> Result<CoefficientBound> {
    let c0 = coeffs[0].coeff(0);
    if c0.is_zero() {
        return Err(Error::NoBoundAvailable("leading equation coefficient vanishes at 0".into()));
    }
    let c0l = abs_lower(&c0);
    if c0l.is_zero() {
        return Err(Error::NoBoundAvailable("could not bound a_0(0) away from 0".into()));
    }
    let s0 = |rho: &Q| -> Q {
        let mut s = Q::zero();
        let mut p = Q::one();
        for k in 1..coeffs[0].coeffs().len() {
            p = &p / rho;
            s += abs_upper(&coeffs[0].coeff(k)) * &p;
        }
        s / &c0l
    };
    let a: Q = coeffs[1..].iter().flat_map(|c| c.coeffs().iter().map(abs_upper)).fold(Q::zero(), |x, y| x + y) / &c0l;
    let half = Q::new(1.into(), 2.into());
    let mut base = Q::from_integer(2.into());
    let mut tries = 0;
    while s0(&base) > half {
        base *= Q::from_integer(2.into());
        tries += 1;
        if tries > 64 {
            return Err(Error::NoBoundAvailable("no admissible growth rate".into()));
        }
    }
    let q = q as usize;
    let start = inhom.degree().map_or(0, |d| d + 1);
    // smallest admissible rate among base/2 (1 + 2^-j) and base
    let threshold = |rho: &Q| -> Option<usize> {
        let slack = Q::one() - s0(rho);
        if slack <= Q::zero() {
            return None;
        }
        let mut n0 = start;
        while !a.is_zero() && &a / num_traits::pow(rho.clone(), n0 - n0 / q) > slack {
            n0 += 1;
            if n0 > 4096 {
                return None;
            }
        }
        Some(n0)
    };
    let mut choice = (base.clone(), threshold(&base).ok_or_else(|| Error::NoBoundAvailable("threshold too large".into()))?);
    for j in (0..=6).rev() {
        let rho = &base / Q::from_integer(2.into()) * (Q::one() + pow2(-j));
        if rho <= Q::one() {
            continue;
        }
        if let Some(n0) = threshold(&rho) {
            choice = (rho, n0);
            break;
        }
    }
    let (rho, n0) = choice;
    let mut c = Q::zero();
    let mut p = Q::one();
    for x in series.coeffs(n0) {
        let v = abs_upper(&x) / &p;
        if v > c {
            c = v;
        }
        p *= &rho;
    }
    Ok(CoefficientBound { c, rho, n0: 0, provenance: BoundProvenance::Equation })
}

/// `f(alpha) = r + sum_j c_j f(alpha^(q^j))` after `k` unfoldings.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackExpression {
    pub r: K,
    /// Level `j` and coefficient `c_j`.
    pub terms: Vec<(usize, K)>,
    pub depth: usize,
}

fn power_of(alpha: &K, q: u64, j: usize) -> K {
    let mut x = alpha.clone();
    for _ in 0..j {
        x = x.pow(q);
    }
    x
}

/// Unfolds the equation `k` times at `alpha`.
pub fn pullback_expression(f: &MahlerFunction, alpha: &K, k: usize) -> Result<PullbackExpression> {
    let (coeffs, inhom) = equation_of(f).ok_or_else(|| Error::PreconditionViolated("no equation known".into()))?;
    pullback_with(f.q(), &coeffs, &inhom, alpha, k)
}

fn pullback_with(q: u64, coeffs: &[KPoly], inhom: &KPoly, alpha: &K, k: usize) -> Result<PullbackExpression> {
    let mut state: BTreeMap<usize, K> = BTreeMap::new();
    state.insert(0, K::one());
    let mut r = K::zero();
    let mut beta = alpha.clone();
    for ell in 0..k {
        let a0 = coeffs[0].eval(&beta);
        if a0.is_zero() {
            return Err(Error::OrbitHitsSingularity { ell });
        }
        if let Some(c) = state.remove(&ell) {
            if !c.is_zero() {
                let s = -(c.div(&a0).expect("nonzero"));
                r = &r + &(&s * &inhom.eval(&beta));
                for (i, a) in coeffs.iter().enumerate().skip(1) {
                    let e = state.entry(ell + i).or_insert_with(K::zero);
                    *e = &*e + &(&s * &a.eval(&beta));
                }
            }
        }
        beta = beta.pow(q);
    }
    let terms = state.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    Ok(PullbackExpression { r, terms, depth: k })
}

/// Evaluation with its parameter trail.
#[derive(Clone, Debug)]
pub struct EvalReport {
    pub ball: ComplexBall,
    pub depth: usize,
    pub truncation: usize,
    pub bound: CoefficientBound,
    pub certified: bool,
}

impl EvalReport {
    pub fn method(&self) -> String {
        if self.depth == 0 {
            format!("direct(N={})", self.truncation)
        } else {
            format!("pullback(k={},N={})", self.depth, self.truncation)
        }
    }
}

/// Ball of `sum_{n<N} a_n w^n` with the tail `C x^N / (1 - x)`, `x = rho |w|`.
pub fn direct_sum(series: &PowerSeries, w: &ComplexBall, bound: &CoefficientBound, n: usize, prec: u32) -> Result<ComplexBall> {
    let wabs = sqrt_upper(&w.abs_sq().mag());
    let x = &bound.rho * &wabs;
    if x >= Q::one() {
        return Err(Error::NoBoundAvailable("growth rate times |w| is not below 1".into()));
    }
    let width = pow2(-(prec as i64));
    let mut acc = ComplexBall::zero();
    for c in series.coeffs(n).iter().rev() {
        acc = (&(&acc * w) + &c.embed(&width)).round_out(prec);
    }
    let tail = &bound.c * num_traits::pow(x.clone(), n) / (Q::one() - &x);
    Ok(acc.inflate(&tail))
}

fn bits_for(width: &Q) -> u32 {
    ((-log2_abs(width)).max(0.0) as u32) + 40
}

/// Truncation with `C x^N / (1 - x) <= eps`.
fn truncation_for(bound: &CoefficientBound, wabs: &Q, eps: &Q) -> Result<usize> {
    let x = &bound.rho * wabs;
    if x >= Q::one() {
        return Err(Error::NoBoundAvailable("growth rate times |w| is not below 1".into()));
    }
    if bound.c.is_zero() || x.is_zero() {
        return Ok(bound.n0.max(1));
    }
    let lhs = eps * (Q::one() - &x) / &bound.c;
    let step = -log2_abs(&x);
    let guess = ((-log2_abs(&lhs)) / step).ceil().max(1.0) as usize;
    let mut n = guess.max(bound.n0);
    while num_traits::pow(x.clone(), n) > lhs {
        n += 1 + n / 8;
        if n > 1 << 20 {
            return Err(Error::IterationCapExceeded("truncation exceeds 2^20 terms".into()));
        }
    }
    Ok(n)
}

/// Depth after which every inner point has modulus below `2^-16`.
fn auto_depth(alpha: &K, q: u64) -> usize {
    let u = abs_upper(alpha);
    if u.is_zero() {
        return 0;
    }
    let target = pow2(-16);
    let mut k = 0;
    let mut qk = 1usize;
    while num_traits::pow(u.clone(), qk) > target && k < 8 {
        k += 1;
        qk = pow_usize(q, k);
    }
    k
}

/// Ball of width `<= width` containing `f(alpha)`, `0 <= |alpha| < 1`.
pub fn eval_ball(f: &MahlerFunction, alpha: &K, width: &Q) -> Result<EvalReport> {
    let bound = coefficient_bound(f)?;
    let depth = match equation_of(f) {
        Some(_) if !alpha.is_zero() => auto_depth(alpha, f.q()),
        _ => 0,
    };
    eval_ball_at_depth(f, alpha, width, depth, &bound)
}

/// Same with an explicit pullback depth and coefficient bound. A depth past
/// a singularity of the orbit is lowered to the singular level.
pub fn eval_ball_at_depth(f: &MahlerFunction, alpha: &K, width: &Q, depth: usize, bound: &CoefficientBound) -> Result<EvalReport> {
    if !alpha.is_zero() {
        let (_, hi) = crate::mahler::regular::modulus_sq_bounds(alpha)?;
        if hi >= Q::one() {
            return Err(Error::PointOnBoundary);
        }
    }
    let x = &bound.rho * &abs_upper(alpha);
    if x >= Q::one() {
        return Err(Error::NoBoundAvailable("the series is not certified to converge at the point".into()));
    }
    let expr = if depth == 0 {
        PullbackExpression { r: K::zero(), terms: vec![(0, K::one())], depth: 0 }
    } else {
        match pullback_expression(f, alpha, depth) {
            Ok(e) => e,
            Err(Error::OrbitHitsSingularity { ell }) => pullback_expression(f, alpha, ell)?,
            Err(e) => return Err(e),
        }
    };
    let mut prec = bits_for(width);
    for _ in 0..6 {
        let w = pow2(-(prec as i64));
        let mut total = expr.r.embed(&w);
        let scale: Q = expr.terms.iter().map(|(_, c)| abs_upper(c) + Q::one()).fold(Q::one(), |a, b| a + b);
        let eps = width / (Q::from_integer(8.into()) * &scale);
        let mut trunc = 0;
        for (j, c) in &expr.terms {
            let inner = power_of(alpha, f.q(), *j);
            let wb = inner.embed(&w);
            let n = truncation_for(bound, &sqrt_upper(&wb.abs_sq().mag()), &eps)?;
            trunc = trunc.max(n);
            let v = direct_sum(f.series(), &wb, bound, n, prec)?;
            total = &total + &(&c.embed(&w) * &v);
        }
        let total = total.round_out(prec);
        if total.width() <= *width {
            return Ok(EvalReport {
                ball: total,
                depth: expr.depth,
                truncation: trunc,
                bound: bound.clone(),
                certified: bound.provenance.is_certified(),
            });
        }
        prec += prec / 2 + 16;
    }
    Err(Error::IterationCapExceeded("ball width target not reached".into()))
}

#[derive(Clone, Debug)]
pub enum ValueCheck {
    /// The balls intersect; never a proof of equality.
    Consistent { value: ComplexBall, candidate: ComplexBall },
    /// Disjoint balls: the candidate is not the value.
    Refuted { value: ComplexBall, candidate: ComplexBall },
}

impl ValueCheck {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ValueCheck::Consistent { .. })
    }
}

pub fn check_algebraic_value(f: &MahlerFunction, alpha: &K, candidate: &K, width: &Q) -> Result<ValueCheck> {
    let value = eval_ball(f, alpha, width)?.ball;
    compare(value, candidate, width)
}

fn compare(value: ComplexBall, candidate: &K, width: &Q) -> Result<ValueCheck> {
    let cb = candidate.embed(&(width / Q::from_integer(4.into())));
    Ok(if value.intersects(&cb) {
        ValueCheck::Consistent { value, candidate: cb }
    } else {
        ValueCheck::Refuted { value, candidate: cb }
    })
}

/// `|a_n| <= c m^n / n!` for all `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorialBound {
    pub c: Q,
    pub m: Q,
    pub note: String,
}

impl FactorialBound {
    /// `c (m u)^N / N! / (1 - m u / (N + 1))` bounds the tail from index `N`.
    pub fn tail(&self, u: &Q, n: usize) -> Option<Q> {
        let x = &self.m * u;
        let ratio = &x / Q::from_integer((n as i64 + 1).into());
        if ratio >= Q::one() {
            return None;
        }
        let mut t = self.c.clone();
        for k in 1..=n {
            t = t * &x / Q::from_integer((k as i64).into());
        }
        Some(t / (Q::one() - ratio))
    }
}

/// Ball of width `<= width` for an entire series with a factorial bound.
pub fn eval_entire(series: &PowerSeries, bound: &FactorialBound, alpha: &K, width: &Q) -> Result<EvalReport> {
    let mut prec = bits_for(width);
    for _ in 0..6 {
        let w = pow2(-(prec as i64));
        let wb = alpha.embed(&w);
        let u = sqrt_upper(&wb.abs_sq().mag());
        let eps = width / Q::from_integer(8.into());
        let mut n = 1usize;
        loop {
            if let Some(t) = bound.tail(&u, n) {
                if t <= eps {
                    break;
                }
            }
            n += 1 + n / 4;
            if n > 1 << 16 {
                return Err(Error::IterationCapExceeded("truncation exceeds 2^16 terms".into()));
            }
        }
        let mut acc = ComplexBall::zero();
        for c in series.coeffs(n).iter().rev() {
            acc = (&(&acc * &wb) + &c.embed(&w)).round_out(prec);
        }
        let ball = acc.inflate(&bound.tail(&u, n).expect("checked")).round_out(prec);
        if ball.width() <= *width {
            return Ok(EvalReport {
                ball,
                depth: 0,
                truncation: n,
                bound: CoefficientBound { c: bound.c.clone(), rho: bound.m.clone(), n0: 0, provenance: BoundProvenance::UserSupplied },
                certified: true,
            });
        }
        prec += prec / 2 + 16;
    }
    Err(Error::IterationCapExceeded("ball width target not reached".into()))
}

pub fn check_entire_value(series: &PowerSeries, bound: &FactorialBound, alpha: &K, candidate: &K, width: &Q) -> Result<ValueCheck> {
    compare(eval_entire(series, bound, alpha, width)?.ball, candidate, width)
}
