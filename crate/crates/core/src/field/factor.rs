//! Factorization over `Q` by root grouping.
//!
//! Each squarefree part is scaled to a monic integer polynomial, its roots
//! are isolated, and subsets of roots are multiplied in ball arithmetic. A
//! subset whose product has integer-enclosing coefficient balls gives a
//! candidate factor, accepted only after exact division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::roots::refine_root;
use super::{ceil_q, floor_q, isolate_complex_roots, pow2, ComplexBall, RootDisc, Q};
use crate::poly::Poly;

/// Monic irreducible factors with multiplicities, sorted by degree then
/// coefficients. Constants yield an empty list.
pub fn factor_over_q(p: &Poly<Q>) -> Vec<(Poly<Q>, usize)> {
    let mut out = Vec::new();
    for (s, mult) in p.squarefree_decomposition() {
        for f in factor_squarefree(&s) {
            out.push((f, mult));
        }
    }
    out.sort_by(|a, b| {
        a.0.deg().cmp(&b.0.deg()).then_with(|| {
            let ka: Vec<Q> = a.0.coeffs().to_vec();
            let kb: Vec<Q> = b.0.coeffs().to_vec();
            ka.cmp(&kb)
        })
    });
    out
}

pub fn is_irreducible_over_q(p: &Poly<Q>) -> bool {
    if p.deg() < 1 {
        return false;
    }
    let f = factor_over_q(p);
    f.len() == 1 && f[0].1 == 1
}

fn factor_squarefree(s: &Poly<Q>) -> Vec<Poly<Q>> {
    let s = s.monic();
    if s.deg() <= 1 {
        return vec![s];
    }
    let mut out = Vec::new();
    let mut s = s;
    if s.coeff(0).is_zero() {
        out.push(Poly::z());
        s = s.unshift(1);
        if s.deg() < 1 {
            return out;
        }
    }
    // P(y) = D^d s(y / D) is monic with integer coefficients.
    let mut den = BigInt::one();
    for c in s.coeffs() {
        den = den.lcm(c.denom());
    }
    let d = s.deg() as usize;
    let dq = Q::from_integer(den.clone());
    let scaled: Vec<Q> = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * num_traits::pow(dq.clone(), d - i))
        .collect();
    let big = Poly::new(scaled);
    for g in split_integer(&big) {
        // g(y) divides P(y); its preimage is g(D x) / D^deg g.
        let k = g.deg() as usize;
        let back: Vec<Q> = g
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * num_traits::pow(dq.clone(), i) / num_traits::pow(dq.clone(), k))
            .collect();
        out.push(Poly::new(back));
    }
    out
}

/// Splits a monic squarefree integer polynomial into monic irreducible
/// integer factors.
fn split_integer(p: &Poly<Q>) -> Vec<Poly<Q>> {
    let n = p.deg() as usize;
    if n <= 1 {
        return vec![p.clone()];
    }
    let mut discs = isolate_complex_roots(p).expect("squarefree input");
    let mut max_mod = Q::zero();
    for dsc in &discs {
        let (_, hi) = dsc.modulus_bounds();
        if hi > max_mod {
            max_mod = hi;
        }
    }
    let mut eps = eps_for(n, &max_mod);
    refine_all(p, &mut discs, &eps);

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rest = p.clone();
    let mut factors = Vec::new();
    let mut k = 1;
    while 2 * k <= remaining.len() {
        let mut found = None;
        let mut combo: Vec<usize> = (0..k).collect();
        'search: loop {
            let idx: Vec<usize> = combo.iter().map(|&c| remaining[c]).collect();
            loop {
                match candidate(&idx, &discs) {
                    Candidate::Integer(g) => {
                        if let Some(q) = rest.exact_div(&g) {
                            found = Some((g, q, idx.clone()));
                            break 'search;
                        }
                        break;
                    }
                    Candidate::No => break,
                    Candidate::TooWide => {
                        eps = &eps * pow2(-8);
                        refine_all(p, &mut discs, &eps);
                    }
                }
            }
            if !next_combination(&mut combo, remaining.len()) {
                break;
            }
        }
        match found {
            Some((g, q, idx)) => {
                factors.push(g);
                rest = q;
                remaining.retain(|i| !idx.contains(i));
            }
            None => k += 1,
        }
    }
    if rest.deg() >= 1 {
        factors.push(rest);
    }
    factors
}

fn eps_for(n: usize, max_mod: &Q) -> Q {
    let base = max_mod + Q::from_integer(2.into());
    let mut e = Q::one() / Q::from_integer((4 * n).into());
    for _ in 0..n {
        e = e / &base;
    }
    e
}

fn refine_all(p: &Poly<Q>, discs: &mut [RootDisc], eps: &Q) {
    for d in discs.iter_mut() {
        if d.radius > *eps {
            *d = refine_root(p, d, eps);
        }
    }
}

enum Candidate {
    Integer(Poly<Q>),
    No,
    TooWide,
}

fn candidate(idx: &[usize], discs: &[RootDisc]) -> Candidate {
    // coefficients of prod (y - r_i), ascending
    let mut coeffs = vec![ComplexBall::one()];
    for &i in idx {
        let r = discs[i].ball();
        let mut next = vec![ComplexBall::zero(); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j + 1] = &next[j + 1] + c;
            next[j] = &next[j] - &(c * &r);
        }
        coeffs = next;
    }
    let mut ints = Vec::with_capacity(coeffs.len());
    let half = Q::new(1.into(), 2.into());
    for c in &coeffs {
        if !c.im.contains_zero() {
            return Candidate::No;
        }
        let lo = ceil_q(&c.re.lo);
        let hi = floor_q(&c.re.hi);
        if lo > hi {
            return Candidate::No;
        }
        if c.width() >= half {
            return Candidate::TooWide;
        }
        debug_assert!(lo == hi);
        ints.push(Q::from_integer(lo));
    }
    Candidate::Integer(Poly::new(ints))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::qr;

    fn p(cs: &[i64]) -> Poly<Q> {
        Poly::from_i64s(cs)
    }

    #[test]
    fn irreducibility_checks() {
        assert!(is_irreducible_over_q(&p(&[-1, -1, 1])));
        assert!(!is_irreducible_over_q(&p(&[-1, 0, 1])));
        assert!(is_irreducible_over_q(&p(&[-3, 1])));
        // x^4 + 1 is irreducible although it factors modulo every prime
        assert!(is_irreducible_over_q(&p(&[1, 0, 0, 0, 1])));
        // x^4 + 4 = (x^2 + 2x + 2)(x^2 - 2x + 2)
        assert!(!is_irreducible_over_q(&p(&[4, 0, 0, 0, 1])));
    }

    #[test]
    fn factors_multiply_back() {
        let a = p(&[1, 1, -1]);
        let b = p(&[-1, 0, 0, 1]);
        let c = Poly::new(vec![qr(1, 3), Q::one()]);
        let f = &(&a * &b.pow(2)) * &c;
        let fs = factor_over_q(&f);
        let mut prod = Poly::one();
        for (g, m) in &fs {
            assert!(is_irreducible_over_q(g));
            prod = &prod * &g.pow(*m as u32);
        }
        assert_eq!(prod, f.monic());
        assert_eq!(fs.len(), 4);
    }

    #[test]
    fn sextic_minimal_polynomial() {
        // x^6 - x^3 - 1 is the minimal polynomial of a cube root of phi
        assert!(is_irreducible_over_q(&p(&[-1, 0, 0, -1, 0, 0, 1])));
        // z^9 - 1 splits into cyclotomic factors of degrees 1, 2, 6
        let fs = factor_over_q(&p(&[-1, 0, 0, 0, 0, 0, 0, 0, 0, 1]));
        let degs: Vec<i64> = fs.iter().map(|f| f.0.deg()).collect();
        assert_eq!(degs, vec![1, 2, 6]);
    }
}
