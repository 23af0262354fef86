//! Buchberger's algorithm over `K(z)` and elimination bad sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::One;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::ore::KRat;
use crate::poly::{KPoly, Monomial, MonomialOrder, MultiPoly, Var};

pub type GPoly = MultiPoly<KRat>;

const MAX_VARS: usize = 6;
const MAX_GENS: usize = 12;
const MAX_BASIS: usize = 80;
const MAX_PAIRS: usize = 4000;

fn lead(p: &GPoly, order: &MonomialOrder) -> (Monomial, KRat) {
    let (m, c) = p.leading_term(order).expect("nonzero polynomial");
    (m.clone(), c.clone())
}

fn monic(p: &GPoly, order: &MonomialOrder) -> GPoly {
    let (_, c) = lead(p, order);
    p.scale(&c.inv().expect("nonzero leading coefficient"))
}

/// Remainder of `p` after full reduction by `basis` (all monic).
pub fn reduce(p: &GPoly, basis: &[GPoly], order: &MonomialOrder) -> GPoly {
    let leads: Vec<Monomial> = basis.iter().map(|b| lead(b, order).0).collect();
    let mut rem = GPoly::zero();
    let mut cur = p.clone();
    while let Some((m, c)) = cur.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
        match leads.iter().position(|l| l.divides(&m)) {
            Some(i) => {
                let t = leads[i].quotient_of(&m);
                let sub = basis[i].mul_monomial(&t).scale(&c);
                cur = &cur - &sub;
            }
            None => {
                rem.add_term(m.clone(), c.clone());
                cur = &cur - &GPoly::term(c, m);
            }
        }
    }
    rem
}

pub fn s_polynomial(f: &GPoly, g: &GPoly, order: &MonomialOrder) -> GPoly {
    let (mf, cf) = lead(f, order);
    let (mg, cg) = lead(g, order);
    let l = mf.lcm(&mg);
    let a = f.mul_monomial(&mf.quotient_of(&l)).scale(&cf.inv().unwrap());
    let b = g.mul_monomial(&mg.quotient_of(&l)).scale(&cg.inv().unwrap());
    &a - &b
}

fn check_size(gens: &[GPoly]) -> Result<()> {
    let vars: BTreeSet<Var> = gens.iter().flat_map(|g| g.vars()).collect();
    if vars.len() > MAX_VARS {
        return Err(Error::SizeGuardExceeded(format!("{} variables (limit {MAX_VARS})", vars.len())));
    }
    if gens.len() > MAX_GENS {
        return Err(Error::SizeGuardExceeded(format!("{} generators (limit {MAX_GENS})", gens.len())));
    }
    Ok(())
}

/// Reduced Groebner basis with monic leading coefficients, sorted by
/// decreasing leading monomial.
pub fn buchberger(gens: &[GPoly], order: &MonomialOrder) -> Result<Vec<GPoly>> {
    check_size(gens)?;
    let mut basis: Vec<GPoly> = Vec::new();
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let r = reduce(g, &basis, order);
        if !r.is_zero() {
            basis.push(monic(&r, order));
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut processed = 0usize;
    while let Some((i, j)) = pairs.pop() {
        processed += 1;
        if processed > MAX_PAIRS {
            return Err(Error::SizeGuardExceeded(format!("more than {MAX_PAIRS} critical pairs")));
        }
        let (mi, _) = lead(&basis[i], order);
        let (mj, _) = lead(&basis[j], order);
        // coprime leading monomials give S-polynomials reducing to zero
        if mi.lcm(&mj).degree() == mi.degree() + mj.degree() {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], order);
        let r = reduce(&s, &basis, order);
        if r.is_zero() {
            continue;
        }
        basis.push(monic(&r, order));
        if basis.len() > MAX_BASIS {
            return Err(Error::SizeGuardExceeded(format!("basis exceeds {MAX_BASIS} elements")));
        }
        let k = basis.len() - 1;
        pairs.extend((0..k).map(|i| (i, k)));
    }
    Ok(interreduce(basis, order))
}

fn interreduce(basis: Vec<GPoly>, order: &MonomialOrder) -> Vec<GPoly> {
    let leads: Vec<Monomial> = basis.iter().map(|b| lead(b, order).0).collect();
    let mut keep: Vec<GPoly> = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        let redundant = leads.iter().enumerate().any(|(j, l)| {
            j != i && l.divides(&leads[i]) && (l != &leads[i] || j < i)
        });
        if !redundant {
            keep.push(b.clone());
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<GPoly> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        let (m, _) = lead(&keep[i], order);
        let tail = &keep[i] - &GPoly::term(KRat::one(), m.clone());
        let r = reduce(&tail, &others, order);
        let mut p = r;
        p.add_term(m, KRat::one());
        out.push(p);
    }
    out.sort_by(|a, b| order.cmp(&lead(b, order).0, &lead(a, order).0));
    out
}

/// Multiplies by the lcm of the denominators, removes the `z`-content and
/// makes the leading coefficient monic in `z`.
pub fn clear_denominators(p: &GPoly, order: &MonomialOrder) -> MultiPoly<KPoly> {
    if p.is_zero() {
        return MultiPoly::zero();
    }
    let mut den = KPoly::one();
    for (_, c) in p.terms() {
        let g = den.gcd(c.den());
        den = &den * &c.den().exact_div(&g).unwrap();
    }
    let q: MultiPoly<KPoly> = p.map_coeffs(|c| c.num() * &den.exact_div(c.den()).unwrap());
    let mut g = KPoly::zero();
    for (_, c) in q.terms() {
        g = g.gcd(c);
    }
    let q = q.map_coeffs(|c| c.exact_div(&g).unwrap());
    let (_, lc) = q.leading_term(order).unwrap();
    let s = lc.lc().inv().unwrap();
    q.map_coeffs(|c| c.scale(&s))
}

#[derive(Clone, Debug)]
pub struct EliminationResult {
    /// Squarefree monic product of the leading-coefficient numerators.
    pub bad: KPoly,
    pub basis: Vec<GPoly>,
    pub cleared: Vec<MultiPoly<KPoly>>,
    /// Cleared basis elements involving only the kept variables.
    pub eliminant: Vec<MultiPoly<KPoly>>,
    pub order: MonomialOrder,
}

/// Groebner basis for a block order eliminating every variable outside
/// `keep`, with the polynomial whose roots contain the points where
/// evaluation fails to commute with elimination.
pub fn elimination_bad_set(gens: &[GPoly], keep: &[Var]) -> Result<EliminationResult> {
    let vars: BTreeSet<Var> = gens.iter().flat_map(|g| g.vars()).collect();
    let first: Vec<Var> = vars.iter().copied().filter(|v| !keep.contains(v)).collect();
    let order = MonomialOrder::Block { first: first.clone(), second: keep.to_vec() };
    let basis = buchberger(gens, &order)?;
    let cleared: Vec<MultiPoly<KPoly>> = basis.iter().map(|b| clear_denominators(b, &order)).collect();
    let mut bad = KPoly::one();
    for c in &cleared {
        let (_, lc) = c.leading_term(&order).unwrap();
        bad = &bad * lc;
    }
    let bad = if bad.is_constant() { KPoly::one() } else { bad.squarefree_part().monic() };
    let eliminant = cleared.iter().filter(|c| c.vars().iter().all(|v| !first.contains(v))).cloned().collect();
    Ok(EliminationResult { bad, basis, cleared, eliminant, order })
}

/// Orders polynomials by leading monomial, largest first.
pub fn cmp_lead(a: &GPoly, b: &GPoly, order: &MonomialOrder) -> Ordering {
    order.cmp(&lead(a, order).0, &lead(b, order).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Var {
        Var::new(i, 0)
    }

    fn rp(cs: &[i64]) -> KRat {
        KRat::from_poly(KPoly::from_i64s(cs))
    }

    #[test]
    fn toy_elimination() {
        // (z - 1) X2 - X1
        let g = GPoly::from_terms([(Monomial::var(x(2)), rp(&[-1, 1])), (Monomial::var(x(1)), rp(&[-1]))]);
        let res = elimination_bad_set(&[g.clone()], &[x(1)]).unwrap();
        assert_eq!(res.bad, KPoly::from_i64s(&[-1, 1]));
        assert_eq!(res.basis.len(), 1);
        assert!(res.eliminant.is_empty());
        let gb = buchberger(&[g.clone()], &MonomialOrder::Lex(vec![x(2), x(1)])).unwrap();
        assert_eq!(gb, vec![monic(&g, &MonomialOrder::Lex(vec![x(2), x(1)]))]);
    }

    #[test]
    fn eliminant_appears() {
        // X1^2 - z, X1 X2 - 1 eliminating X1
        let g1 = GPoly::from_terms([(Monomial::from_pairs([(x(1), 2)]), rp(&[1])), (Monomial::one(), rp(&[0, -1]))]);
        let g2 = GPoly::from_terms([(Monomial::from_pairs([(x(1), 1), (x(2), 1)]), rp(&[1])), (Monomial::one(), rp(&[-1]))]);
        let order = MonomialOrder::Lex(vec![x(1), x(2)]);
        let gb = buchberger(&[g1.clone(), g2.clone()], &order).unwrap();
        let target = GPoly::from_terms([(Monomial::from_pairs([(x(2), 2)]), rp(&[0, 1])), (Monomial::one(), rp(&[-1]))]);
        let t = monic(&target, &order);
        assert!(gb.contains(&t));
        for g in [&g1, &g2] {
            assert!(reduce(g, &gb, &order).is_zero());
        }
        for i in 0..gb.len() {
            for j in 0..i {
                assert!(reduce(&s_polynomial(&gb[i], &gb[j], &order), &gb, &order).is_zero());
            }
        }
        assert_eq!(buchberger(&gb, &order).unwrap(), gb);
    }

    #[test]
    fn size_guard() {
        let gens: Vec<GPoly> = (0..7).map(|i| GPoly::var(x(i))).collect();
        assert!(matches!(buchberger(&gens, &MonomialOrder::Lex(vec![])), Err(Error::SizeGuardExceeded(_))));
    }
}
