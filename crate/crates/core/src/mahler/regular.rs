//! Regular points, iterated systems, multiplicity bounds and order
//! reduction at a point.

use num_traits::{One, Zero};

use super::guess::{guess_sigma_relations, DegreeBounds};
use crate::error::{Error, Result};
use crate::field::{pow2, round_up, ComplexBall, Field, NfElem, Q};
use crate::linalg;
use crate::ore::{pow_usize, KRat, Kind, Operator, PowerSeries, SystemMatrix};
use crate::poly::graeffe::{min_root_modulus_bound_k, RootBound};
use crate::poly::KPoly;

type K = NfElem;

#[derive(Clone, Copy, Debug)]
pub enum RegularityTarget<'a> {
    Operator(&'a Operator),
    System(&'a SystemMatrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub regular: bool,
    /// Least `l` with `alpha^(q^l)` singular.
    pub first_failure: Option<usize>,
    /// Orbit points `alpha^(q^l)`, `l < ell_star`, checked exactly; beyond
    /// that the orbit stays inside a disk free of nonzero roots.
    pub ell_star: usize,
}

/// Certified bounds `lo <= |alpha|^2 <= hi`, refined until they separate
/// from 1.
pub fn modulus_sq_bounds(alpha: &K) -> Result<(Q, Q)> {
    if alpha.is_zero() {
        return Err(Error::PointOnBoundary);
    }
    if let Some(a) = alpha.to_rational() {
        let s = &a * &a;
        return Ok((s.clone(), s));
    }
    for e in [20i64, 60, 120, 200] {
        let b = alpha.embed(&pow2(-e));
        let s = b.abs_sq();
        let (lo, hi) = (s.mig(), s.mag());
        if hi < Q::one() || lo > Q::one() {
            return Ok((lo, hi));
        }
    }
    Err(Error::PointOnBoundary)
}

fn check_inside(alpha: &K) -> Result<Q> {
    let (lo, hi) = modulus_sq_bounds(alpha)?;
    if lo.is_zero() && hi.is_zero() {
        return Err(Error::PointOnBoundary);
    }
    if hi >= Q::one() {
        return Err(Error::PointOnBoundary);
    }
    Ok(hi)
}

fn target_data(t: RegularityTarget<'_>) -> Result<(u64, Vec<KPoly>)> {
    match t {
        RegularityTarget::Operator(l) => {
            let Kind::Sigma(q) = l.kind() else { return Err(Error::KindMismatch) };
            if l.is_zero() {
                return Err(Error::ZeroOperator);
            }
            Ok((q, vec![l.coeffs()[0].clone(), l.leading_coeff()]))
        }
        RegularityTarget::System(a) => {
            let Kind::Sigma(q) = a.kind() else { return Err(Error::KindMismatch) };
            Ok((q, a.singular_polys()))
        }
    }
}

/// Lower bound on the squared modulus of all nonzero roots of `polys`;
/// `None` when they have no nonzero roots.
fn root_modulus_sq_bound(polys: &[KPoly]) -> Result<Option<Q>> {
    let mut best: Option<Q> = None;
    for p in polys {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let s = p.unshift(p.valuation().unwrap());
        if s.is_constant() {
            continue;
        }
        match min_root_modulus_bound_k(&s, 8)? {
            RootBound::Infinite => {}
            RootBound::Finite(b) => {
                let b2 = &b * &b;
                if best.as_ref().is_none_or(|x| b2 < *x) {
                    best = Some(b2);
                }
            }
        }
    }
    Ok(best)
}

/// Decides whether the whole orbit `alpha^(q^l)` avoids the singularities.
pub fn is_regular_point(target: RegularityTarget<'_>, alpha: &K) -> Result<RegularityReport> {
    let (q, polys) = target_data(target)?;
    let hi = check_inside(alpha)?;
    let ell_star = match root_modulus_sq_bound(&polys)? {
        None => 0,
        Some(b) => {
            let mut x = hi;
            let mut ell = 0usize;
            while x >= b {
                x = round_up(&crate::field::pow(&x, q), 128);
                ell += 1;
                if ell > 64 {
                    return Err(Error::IterationCapExceeded("orbit does not enter the root-free disk".into()));
                }
            }
            ell
        }
    };
    let mut w = alpha.clone();
    for ell in 0..ell_star {
        if polys.iter().any(|p| p.eval(&w).is_zero()) {
            return Ok(RegularityReport { regular: false, first_failure: Some(ell), ell_star });
        }
        w = w.pow(q);
    }
    Ok(RegularityReport { regular: true, first_failure: None, ell_star })
}

pub fn iterate_system(a: &SystemMatrix, ell: usize) -> Result<SystemMatrix> {
    a.iterate(ell)
}

/// Pole order of `alpha` in `det A`, which bounds the multiplicity of the
/// system's functions at `alpha`, after checking that the component series
/// satisfy no linear relation within `bounds` and that `alpha^q` is regular.
pub fn multiplicity_bound(a: &SystemMatrix, funcs: &[PowerSeries], alpha: &K, bounds: &DegreeBounds) -> Result<usize> {
    let Kind::Sigma(q) = a.kind() else { return Err(Error::KindMismatch) };
    if funcs.len() != a.dim() {
        return Err(Error::InvalidInput("one series per system component is required".into()));
    }
    let rels = guess_sigma_relations(q, funcs, &[0], bounds.max_degree, bounds.truncation, false)?;
    if !rels.is_empty() {
        return Err(Error::IndependenceNotCertified);
    }
    let aq = alpha.pow(q);
    let rep = is_regular_point(RegularityTarget::System(a), &aq)?;
    if !rep.regular {
        return Err(Error::RegularityFails(format!("orbit of alpha^{q} is singular at step {}", rep.first_failure.unwrap())));
    }
    Ok(usize::try_from(-a.det().order_at(alpha)).unwrap_or(0))
}

/// One step of the multiplicity reduction: with `g = (f - v) / (z - alpha)`
/// replacing component `idx`, returns `B = P(z^q) A P^(-1)` and `g`.
/// Component 0 must be the constant function 1. When `value_ball` encloses
/// `f(alpha)` it must meet the embedding of `value`.
pub fn reduce_multiplicity_step(
    a: &SystemMatrix,
    idx: usize,
    alpha: &K,
    value: &K,
    f: &PowerSeries,
    value_ball: Option<&ComplexBall>,
) -> Result<(SystemMatrix, PowerSeries)> {
    let Kind::Sigma(q) = a.kind() else { return Err(Error::KindMismatch) };
    if a.labels().first().map(String::as_str) != Some("1") {
        return Err(Error::PreconditionViolated("first component must be the constant 1".into()));
    }
    if idx == 0 || idx >= a.dim() {
        return Err(Error::InvalidInput("component index out of range".into()));
    }
    if alpha.is_zero() {
        return Err(Error::PreconditionViolated("alpha must be nonzero".into()));
    }
    if let Some(ball) = value_ball {
        let w = ball.width().max(pow2(-64));
        if !value.embed(&(w / Q::from_integer(4.into()))).intersects(ball) {
            return Err(Error::ValueNotAttained);
        }
    }
    let lin = KPoly::new(vec![-alpha.clone(), K::one()]);
    let inv_lin = KRat::from_poly(lin.clone()).inv().unwrap();
    let mut p: Vec<Vec<KRat>> = linalg::identity(a.dim());
    p[idx][0] = -(KRat::constant(value.clone()) * &inv_lin);
    p[idx][idx] = inv_lin;
    let pq: Vec<Vec<KRat>> = p.iter().map(|r| r.iter().map(|c| c.substitute_power(q as usize)).collect()).collect();
    let pinv = linalg::inverse(&p).expect("P is invertible");
    let b = linalg::mat_mul(&linalg::mat_mul(&pq, a.entries()), &pinv);
    let mut labels = a.labels().to_vec();
    labels[idx] = format!("({}-v)/(z-a)", labels[idx]);
    let bsys = SystemMatrix::new(a.kind(), b, labels)?;
    let linq = KRat::from_poly(lin.substitute_power(q as usize));
    let lhs = bsys.det() * &linq;
    let rhs = a.det() * &KRat::from_poly(lin.clone());
    assert_eq!(lhs, rhs, "determinant identity");
    let g = f.sub(&PowerSeries::polynomial(&KPoly::constant(value.clone()))).div_poly(&lin)?;
    Ok((bsys, g))
}

/// `b_m sigma^(m-n) L1 - sigma^(m-n)(lead L1) L2`, of order `< m`, for `L1`
/// of order `n` whose coefficients `c_i` vanish on `z^(q^i) = alpha` and
/// `L2` of order `m >= n` with `b_0(alpha) != 0`.
pub fn order_reduce_at_point(l1: &Operator, l2: &Operator, alpha: &K) -> Result<Operator> {
    let Kind::Sigma(q) = l1.kind() else { return Err(Error::KindMismatch) };
    if l2.kind() != l1.kind() {
        return Err(Error::KindMismatch);
    }
    let (Some(n), Some(m)) = (l1.order(), l2.order()) else {
        return Err(Error::ZeroOperator);
    };
    if m < n {
        return Err(Error::OrderMismatch(format!("second operator has order {m} < {n}")));
    }
    for (i, c) in l1.coeffs().iter().enumerate() {
        let qi = pow_usize(q, i);
        let factor = &KPoly::monomial(K::one(), qi) - &KPoly::constant(alpha.clone());
        if !c.rem(&factor).is_zero() {
            return Err(Error::PreconditionViolated(format!("coefficient {i} is not divisible by z^{qi} - alpha")));
        }
    }
    let b0 = l2.coeff(0);
    if b0.eval(alpha).is_none_or(|v| v.is_zero()) {
        return Err(Error::PreconditionViolated("constant coefficient of the second operator vanishes at alpha".into()));
    }
    let s = m - n;
    let bm = l2.coeff(m);
    let lead1 = l1.coeff(n).substitute_power(pow_usize(q, s));
    let a = l1.sigma_shift(s).scale(&bm);
    let b = l2.scale(&lead1);
    a.sub(&b)
}
