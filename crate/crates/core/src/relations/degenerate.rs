//! Degeneration of relations at algebraic points.

use num_traits::{One, Zero};

use super::{check_field, ev_alpha, guess_algebraic_relations, var_name, verify_relation, RelationPoly};
use crate::error::{Error, Result};
use crate::field::{factor_over_q, isolate_complex_roots, pow2, refine_root, ComplexBall, NfElem, Q, RootDisc};
use crate::linalg::Echelon;
use crate::mahler::regular::modulus_sq_bounds;
use crate::ore::{Kind, PowerSeries};
use crate::poly::graeffe::{locate_roots_k, norm_poly};
use crate::poly::{KPoly, Monomial, MultiPoly, Var};

type K = NfElem;

/// Relation specialized at a point where all coefficients of shifted or
/// differentiated variables vanish.
#[derive(Clone, Debug)]
pub struct DegenerationReport {
    pub kind: Kind,
    pub labels: Vec<String>,
    pub point: K,
    /// Polynomial in the `X_{i,0}` over the field of the point.
    pub p: MultiPoly<K>,
    /// Monomials whose nonzero `z`-coefficient vanishes at the point.
    pub witnesses: Vec<(Monomial, KPoly)>,
    /// `Some(true)` when `p` is the specialization of a relation among the
    /// functions themselves within the searched bounds.
    pub banal_within_bounds: Option<bool>,
    pub banality_bounds: Option<(usize, usize)>,
    /// Whether `p` evaluated on enclosures of the function values contains 0.
    pub numeric_consistent: Option<bool>,
}

impl DegenerationReport {
    pub fn display_p(&self) -> String {
        let names = |v: Var| var_name(self.kind, &self.labels, v);
        self.p.format_with(&names)
    }
}

#[derive(Clone, Debug)]
pub enum Degeneration {
    Degenerate(DegenerationReport),
    NotDegenerate { reason: String },
}

impl Degeneration {
    pub fn report(&self) -> Option<&DegenerationReport> {
        match self {
            Degeneration::Degenerate(r) => Some(r),
            Degeneration::NotDegenerate { .. } => None,
        }
    }
}

/// Evaluates `p` on enclosures of `X_{i,0}`; true when the result contains 0.
pub fn numeric_check(p: &MultiPoly<K>, values: &[ComplexBall], width: &Q) -> bool {
    let mut acc = ComplexBall::zero();
    for (m, c) in p.terms() {
        let mut t = c.embed(width);
        for &(v, e) in m.pairs() {
            t = &t * &values[v.func].pow(e as u64);
        }
        acc = &acc + &t;
    }
    acc.contains_zero()
}

/// Specializes a relation at `alpha`. `values` are enclosures of the
/// function values at `alpha` for the numeric check; `banality` gives the
/// coefficient degree and truncation of the bounded banality search.
pub fn detect_degeneration(
    q: &RelationPoly,
    funcs: &[PowerSeries],
    alpha: &K,
    values: Option<&[ComplexBall]>,
    banality: Option<(usize, usize)>,
) -> Result<Degeneration> {
    check_field(q.poly(), alpha)?;
    if matches!(q.kind(), Kind::Sigma(_)) {
        let (lo, hi) = modulus_sq_bounds(alpha)?;
        if hi >= Q::one() || (lo.is_zero() && hi.is_zero()) {
            return Err(Error::PointOnBoundary);
        }
    }
    if verify_relation(q, funcs, 128.max(q.poly().terms().filter_map(|(_, c)| c.degree()).max().unwrap_or(0) + 1))?
        .is_some()
    {
        return Err(Error::PreconditionViolated("relation does not hold for the functions".into()));
    }
    let ev = ev_alpha(q, alpha)?;
    let mut witnesses = Vec::new();
    let mut p = MultiPoly::zero();
    for (m, c) in q.poly().terms() {
        let shifted = m.vars().any(|v| v.depth > 0);
        let val = ev.coeff(m);
        if shifted {
            if !val.is_zero() {
                return Ok(Degeneration::NotDegenerate {
                    reason: format!("coefficient of {} does not vanish at the point", m.format_with(&|v| var_name(q.kind(), q.labels(), v))),
                });
            }
            witnesses.push((m.clone(), c.clone()));
        } else if !val.is_zero() {
            p.add_term(m.clone(), val);
        }
    }
    if p.is_zero() {
        return Ok(Degeneration::NotDegenerate { reason: "specialization is zero".into() });
    }
    let numeric_consistent = values.map(|v| numeric_check(&p, v, &pow2(-100)));
    let banal_within_bounds = match banality {
        Some((d, n)) => Some(is_banal_within(q, funcs, alpha, &p, d, n)?),
        None => None,
    };
    Ok(Degeneration::Degenerate(DegenerationReport {
        kind: q.kind(),
        labels: q.labels().to_vec(),
        point: alpha.clone(),
        p,
        witnesses,
        banal_within_bounds,
        banality_bounds: banality,
        numeric_consistent,
    }))
}

/// Is `p` in the span of the specializations of relations among the
/// unshifted functions with coefficient degree `<= d`?
fn is_banal_within(q: &RelationPoly, funcs: &[PowerSeries], alpha: &K, p: &MultiPoly<K>, d: usize, n: usize) -> Result<bool> {
    let total = p.total_degree();
    let rels = guess_algebraic_relations(q.kind(), q.labels(), funcs, 0, total, d, n)?;
    let vars: Vec<Var> = (0..funcs.len()).map(|i| Var::new(i, 0)).collect();
    let monos = super::monomials_up_to(&vars, total);
    let coords = |mp: &MultiPoly<K>| -> Vec<K> { monos.iter().map(|m| mp.coeff(m)).collect() };
    let mut ech = Echelon::new(monos.len());
    for r in &rels {
        ech.add_row(coords(&ev_alpha(r, alpha)?));
    }
    Ok(ech.contains(&coords(p)))
}

/// Irreducible factor of the degeneration locus with enclosures of its
/// roots in the punctured disk.
#[derive(Clone, Debug)]
pub struct ScanHit {
    pub factor: KPoly,
    pub roots: Vec<ComplexBall>,
}

/// Factors of the gcd of the coefficients of shifted monomials having roots
/// in the punctured disk of radius `r`, with enclosures of those roots.
pub fn scan_degeneration_points(q: &RelationPoly, r: &Q) -> Result<Vec<ScanHit>> {
    let mut g = KPoly::zero();
    let mut any = false;
    for (m, c) in q.poly().terms() {
        if m.vars().any(|v| v.depth > 0) {
            g = g.gcd(c);
            any = true;
        }
    }
    if !any || g.is_constant() {
        return Ok(Vec::new());
    }
    let g = g.unshift(g.valuation().unwrap());
    let factors: Vec<KPoly> = match g.to_q() {
        Some(gq) => factor_over_q(&gq).into_iter().map(|(f, _)| f.to_k().monic()).collect(),
        None => g.squarefree_decomposition().into_iter().map(|(f, _)| f.monic()).collect(),
    };
    let mut out = Vec::new();
    for f in factors {
        if f.is_constant() {
            continue;
        }
        let (np, discs) = match f.to_q() {
            Some(fq) => (fq.clone(), isolate_complex_roots(&fq)?),
            None => (norm_poly(&f).squarefree_part(), locate_roots_k(&f)?),
        };
        let mut boxes = Vec::new();
        for d in discs {
            if let (true, ball) = in_disk(&np, d, r)? {
                boxes.push(ball);
            }
        }
        if !boxes.is_empty() {
            out.push(ScanHit { factor: f, roots: boxes });
        }
    }
    Ok(out)
}

/// Decides `0 < |root| < r` for the root isolated by `d`, refining it.
fn in_disk(p: &crate::poly::QPoly, d: RootDisc, r: &Q) -> Result<(bool, ComplexBall)> {
    let mut d = d;
    for k in 0..12 {
        let (lo, hi) = d.modulus_bounds();
        if hi < *r && lo > Q::zero() {
            return Ok((true, d.ball()));
        }
        if lo >= *r {
            return Ok((false, d.ball()));
        }
        let target = &d.radius * pow2(-(4 << k.min(6)));
        d = refine_root(p, &d, &target);
    }
    Err(Error::BoundaryUndecided { iterations: 12 })
}

/// `Q_0(z, D(z^(q^j)) X_{i,j})`.
pub fn transport_clear_poles(q0: &RelationPoly, d: &KPoly) -> Result<RelationPoly> {
    let Kind::Sigma(q) = q0.kind() else {
        return Err(Error::KindMismatch);
    };
    let mut out = MultiPoly::zero();
    for (m, c) in q0.poly().terms() {
        let mut c = c.clone();
        for &(v, e) in m.pairs() {
            let dj = d.substitute_power(crate::ore::pow_usize(q, v.depth));
            for _ in 0..e {
                c = &c * &dj;
            }
        }
        out.add_term(m.clone(), c);
    }
    Ok(q0.with_poly(out))
}
