//! Mahler denominators, level-R operators and removal of singularities.

use num_traits::{One, Zero};

use super::guess::{minimal_operator, solve_shift_witness, DegreeBounds};
use super::MahlerFunction;
use crate::error::{Error, Result};
use crate::field::{factor_over_q, pow, Q};
use crate::ore::{Kind, Operator};
use crate::poly::graeffe::has_root_in_punctured_disk_k;
use crate::poly::KPoly;

/// Monic `d` with a witness `d f = sum_{k >= 1} b_k f(z^(q^k))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Denominator {
    pub den: KPoly,
    /// `b_k` at index `k`; index 0 is zero.
    pub witness: Vec<KPoly>,
    pub caveat: String,
}

impl Denominator {
    /// `d - sum_k b_k Theta^k`.
    pub fn operator(&self, q: u64) -> Operator {
        let mut cs: Vec<KPoly> = self.witness.iter().map(|b| -b).collect();
        cs[0] = self.den.clone();
        Operator::new(Kind::Sigma(q), cs)
    }
}

/// Candidate irreducible factors of `p` (over the rationals when possible,
/// otherwise the squarefree parts).
fn prime_factors(p: &KPoly) -> Vec<KPoly> {
    match p.to_q() {
        Some(pq) => factor_over_q(&pq).into_iter().map(|(f, _)| f.to_k().monic()).collect(),
        None => p.squarefree_decomposition().into_iter().map(|(f, _)| f.monic()).collect(),
    }
}

pub fn mahler_denominator(f: &MahlerFunction, bounds: &DegreeBounds) -> Result<Denominator> {
    let l0 = match f.annihilator() {
        Some(l) => l.clone(),
        None => minimal_operator(f, bounds.max_order, bounds.max_degree, bounds.truncation)?.0,
    };
    let q = f.q();
    let m = bounds.max_order.max(l0.order().unwrap_or(0)).max(1);
    let mut cur = l0.coeffs()[0].monic();
    let mut witness: Vec<KPoly> = {
        let a0 = l0.coeffs()[0].lc();
        let inv = crate::field::Field::inv(&a0).expect("nonzero");
        let mut w: Vec<KPoly> = l0.coeffs().iter().map(|c| -&c.scale(&inv)).collect();
        w[0] = KPoly::zero();
        w.resize(m + 1, KPoly::zero());
        w
    };
    let d = bounds.max_degree;
    let exact = f.series().clone();
    'outer: loop {
        for p in prime_factors(&cur) {
            let cand = cur.exact_div(&p).expect("factor divides");
            let target = exact.mul_poly(&cand);
            if let Some(w) = solve_shift_witness(q, &exact, &target, m, d, bounds.truncation)? {
                cur = cand;
                witness = w;
                continue 'outer;
            }
        }
        break;
    }
    let caveat = format!(
        "no proper divisor admits a witness with shifts 1..={m}, coefficient degree <= {d}, truncation {}",
        bounds.truncation
    );
    Ok(Denominator { den: cur, witness, caveat })
}

/// Operator annihilating `f` whose constant coefficient has no root in the
/// punctured disk of radius `r`.
pub fn make_level_r(f: &MahlerFunction, r: &Q, bounds: &DegreeBounds) -> Result<Operator> {
    if *r <= Q::zero() || *r > Q::one() {
        return Err(Error::InvalidInput("radius must lie in (0, 1]".into()));
    }
    let den = mahler_denominator(f, bounds)?;
    if has_root_in_punctured_disk_k(&den.den, r)? {
        return Err(Error::NotAnalyticOnDisk(format!("denominator {} has a root in the disk", den.den)));
    }
    Ok(den.operator(f.q()).primitive())
}

const SHIFT_CAP: usize = 4096;

/// `L + sigma^s L` for the least `s` such that the leading coefficient of
/// `sigma^s L` has no root in the punctured disk of radius `r`.
pub fn remove_singularities(l: &Operator, r: &Q) -> Result<(Operator, usize)> {
    let Kind::Sigma(q) = l.kind() else {
        return Err(Error::KindMismatch);
    };
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    if has_root_in_punctured_disk_k(&l.coeffs()[0], r)? {
        return Err(Error::NotLevelR);
    }
    let lead = l.leading_coeff();
    let mut s = 0usize;
    let mut radius = r.clone();
    let mut qs: usize = 1;
    loop {
        if !has_root_in_punctured_disk_k(&lead, &radius)? {
            break;
        }
        s += 1;
        qs = qs.saturating_mul(q as usize);
        if qs > SHIFT_CAP {
            return Err(Error::IterationCapExceeded(format!("shift search stopped at s = {s}")));
        }
        radius = pow(r, qs as u64);
    }
    let out = l.add(&l.sigma_shift(s))?;
    Ok((out, s))
}
