//! Polynomial relations among prolongations of functions.

pub mod degenerate;
pub mod descent;
pub mod groebner;
pub mod ideal;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, NfElem};
use crate::mahler::guess::{series_kernel, SAFETY_MARGIN};
use crate::ore::{Kind, PowerSeries};
use crate::poly::{KPoly, Monomial, MultiPoly, Var};

pub use degenerate::{
    detect_degeneration, numeric_check, scan_degeneration_points, transport_clear_poles, Degeneration,
    DegenerationReport, ScanHit,
};
pub use descent::{conjugate_object, decompose_function, descend_relation, Conjugable, Decomposition};
pub use groebner::{buchberger, clear_denominators, elimination_bad_set, EliminationResult};
pub use ideal::{prolong_ideal, IdealPresentation};

type K = NfElem;

/// `Q(z, X_{i,j})` with polynomial coefficients in `z`; `X_{i,j}` stands for
/// `Theta^j f_i`.
#[derive(Clone, PartialEq)]
pub struct RelationPoly {
    kind: Kind,
    labels: Vec<String>,
    poly: MultiPoly<KPoly>,
}

impl RelationPoly {
    pub fn new(kind: Kind, labels: Vec<String>, poly: MultiPoly<KPoly>) -> Result<Self> {
        if poly.vars().iter().any(|v| v.func >= labels.len()) {
            return Err(Error::InvalidInput("variable refers to an unknown function".into()));
        }
        Ok(RelationPoly { kind, labels, poly })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn poly(&self) -> &MultiPoly<KPoly> {
        &self.poly
    }

    pub fn with_poly(&self, poly: MultiPoly<KPoly>) -> RelationPoly {
        RelationPoly { kind: self.kind, labels: self.labels.clone(), poly }
    }

    /// Largest `j` used for each function (`None` when unused).
    pub fn multi_depth(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.labels.len()];
        for v in self.poly.vars() {
            let e: &mut Option<usize> = &mut out[v.func];
            *e = Some(e.map_or(v.depth, |d: usize| d.max(v.depth)));
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.multi_depth().into_iter().flatten().max().unwrap_or(0)
    }

    /// Scaled to coprime coefficients; rational coefficients become
    /// integers with a positive first coefficient, algebraic ones get a
    /// first coefficient 1.
    pub fn normalized(&self) -> RelationPoly {
        let mut g = KPoly::zero();
        for (_, c) in self.poly.terms() {
            g = g.gcd(c);
        }
        if g.is_zero() {
            return self.clone();
        }
        let mut p = self.poly.map_coeffs(|c| c.exact_div(&g).unwrap());
        let first = p.terms().flat_map(|(_, c)| c.coeffs().iter()).find(|x| !x.is_zero()).cloned().unwrap();
        let all_rational = p.terms().all(|(_, c)| c.coeffs().iter().all(|x| x.is_rational()));
        let s = if all_rational {
            let mut den = num_bigint::BigInt::one();
            let mut num = num_bigint::BigInt::zero();
            for (_, c) in p.terms() {
                for x in c.coeffs() {
                    let x = x.to_rational().unwrap();
                    den = num_integer::Integer::lcm(&den, x.denom());
                    num = num_integer::Integer::gcd(&num, x.numer());
                }
            }
            let mut s = crate::field::Q::new(den, num);
            if first.to_rational().unwrap() * &s < crate::field::Q::zero() {
                s = -s;
            }
            K::Rational(s)
        } else {
            first.inv().unwrap()
        };
        p = p.map_coeffs(|c| c.scale(&s));
        self.with_poly(p)
    }

    /// `Theta` applied to the relation: ring endomorphism (sigma) or
    /// derivation (delta).
    pub fn theta(&self) -> RelationPoly {
        self.with_poly(theta_action(self.kind, &self.poly))
    }

    pub fn display(&self) -> String {
        let names = |v: Var| var_name(self.kind, &self.labels, v);
        self.poly.format_with(&names)
    }

    /// Series of `Q(z, Theta^j f_i)` for the given functions.
    pub fn series(&self, funcs: &[PowerSeries], n: usize) -> Vec<K> {
        let mut cache: BTreeMap<Var, Vec<K>> = BTreeMap::new();
        let mut acc = vec![K::zero(); n];
        for (m, c) in self.poly.terms() {
            let mut prod = c.truncate(n);
            for &(v, e) in m.pairs() {
                let s = cache
                    .entry(v)
                    .or_insert_with(|| self.kind.apply_power(&funcs[v.func], v.depth).coeffs(n));
                let sp = KPoly::new(s.clone());
                for _ in 0..e {
                    prod = prod.mul_trunc(&sp, n);
                }
            }
            for (a, b) in acc.iter_mut().zip(prod.coeffs()) {
                *a = a.clone() + b;
            }
        }
        acc
    }
}

impl fmt::Debug for RelationPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// Display name of `X_{i,j}`: `f`, `f(z^9)` or `f''` style.
pub fn var_name(kind: Kind, labels: &[String], v: Var) -> String {
    let base = labels.get(v.func).cloned().unwrap_or_else(|| format!("f{}", v.func));
    if v.depth == 0 {
        return base;
    }
    match kind {
        Kind::Sigma(q) => format!("{base}(z^{})", crate::ore::pow_usize(q, v.depth)),
        Kind::Delta => format!("{base}{}", "'".repeat(v.depth)),
    }
}

/// `Theta` on polynomials in `z` and the `X_{i,j}`.
pub fn theta_action(kind: Kind, p: &MultiPoly<KPoly>) -> MultiPoly<KPoly> {
    let up = |v: Var| Var::new(v.func, v.depth + 1);
    match kind {
        Kind::Sigma(q) => {
            MultiPoly::from_terms(p.terms().map(|(m, c)| (m.map_vars(up), c.substitute_power(q as usize))))
        }
        Kind::Delta => {
            let mut out = MultiPoly::zero();
            for (m, c) in p.terms() {
                let dc = c.derivative();
                if !dc.is_zero() {
                    out.add_term(m.clone(), dc);
                }
                for &(v, e) in m.pairs() {
                    let rest = Monomial::var(v).quotient_of(m);
                    let nm = rest.mul(&Monomial::var(up(v)));
                    out.add_term(nm, c.scale(&K::from_rational(&crate::field::qi(e as i64))));
                }
            }
            out
        }
    }
}

/// First order at which the relation fails modulo `z^n`, or `None` when it
/// holds.
pub fn verify_relation(q: &RelationPoly, funcs: &[PowerSeries], n: usize) -> Result<Option<usize>> {
    if funcs.len() != q.labels.len() {
        return Err(Error::InvalidInput(format!("expected {} functions, got {}", q.labels.len(), funcs.len())));
    }
    let guard = q.poly.terms().filter_map(|(_, c)| c.degree()).max().unwrap_or(0) + 1;
    if n < guard {
        return Err(Error::TruncationTooSmall { given: n, required: guard });
    }
    Ok(q.series(funcs, n).iter().position(|c| !c.is_zero()))
}

/// Monomials of total degree `<= total` in `vars`, including 1.
pub fn monomials_up_to(vars: &[Var], total: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut layer = vec![(Monomial::one(), 0usize)];
    for _ in 0..total {
        let mut next = Vec::new();
        for (m, start) in &layer {
            for (k, &v) in vars.iter().enumerate().skip(*start) {
                next.push((m.mul(&Monomial::var(v)), k));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        layer = next;
    }
    out
}

/// Basis of relations with multi-depth `<= depth`, total degree `<= total`
/// (1 included) and coefficient degree `<= d`, valid modulo `z^n` and
/// re-verified modulo `z^(2n)`.
pub fn guess_algebraic_relations(
    kind: Kind,
    labels: &[String],
    funcs: &[PowerSeries],
    depth: usize,
    total: u32,
    d: usize,
    n: usize,
) -> Result<Vec<RelationPoly>> {
    if funcs.len() != labels.len() {
        return Err(Error::InvalidInput("one label per function is required".into()));
    }
    let vars: Vec<Var> = (0..funcs.len()).flat_map(|i| (0..=depth).map(move |j| Var::new(i, j))).collect();
    let monos = monomials_up_to(&vars, total);
    let unknowns = monos.len() * (d + 1);
    let required = unknowns + SAFETY_MARGIN;
    if n < required {
        return Err(Error::TruncationTooSmall { given: n, required });
    }
    let n2 = 2 * n;
    let var_series: BTreeMap<Var, KPoly> =
        vars.iter().map(|&v| (v, KPoly::new(kind.apply_power(&funcs[v.func], v.depth).coeffs(n2)))).collect();
    let mut bases = Vec::with_capacity(monos.len());
    for m in &monos {
        let mut p = KPoly::one();
        for &(v, e) in m.pairs() {
            for _ in 0..e {
                p = p.mul_trunc(&var_series[&v], n2);
            }
        }
        let mut c = p.into_coeffs();
        c.resize(n2, K::zero());
        bases.push(c);
    }
    let cols: Vec<(usize, usize)> = (0..monos.len()).flat_map(|b| (0..=d).map(move |k| (b, k))).collect();
    let ker = series_kernel(&bases, &cols, n, n2);
    let out = ker
        .into_iter()
        .map(|v| {
            let terms = monos
                .iter()
                .zip(v.chunks(d + 1))
                .map(|(m, c)| (m.clone(), KPoly::new(c.to_vec())))
                .filter(|(_, c)| !c.is_zero());
            RelationPoly { kind, labels: labels.to_vec(), poly: MultiPoly::from_terms(terms) }.normalized()
        })
        .collect();
    Ok(out)
}

/// Checks that every coefficient lives in `Q` or in the field of `alpha`.
pub(crate) fn check_field(p: &MultiPoly<KPoly>, alpha: &K) -> Result<()> {
    for (_, c) in p.terms() {
        for x in c.coeffs() {
            if let Some(k) = x.field() {
                match alpha.field() {
                    Some(ka) if **ka == **k => {}
                    _ => {
                        return Err(Error::FieldTooSmall(format!(
                            "coefficient {x} does not lie in the field of the point"
                        )))
                    }
                }
            }
        }
    }
    Ok(())
}

/// Coefficient-wise evaluation at `z = alpha`.
pub fn ev_alpha(q: &RelationPoly, alpha: &K) -> Result<MultiPoly<K>> {
    check_field(&q.poly, alpha)?;
    Ok(q.poly.map_coeffs(|c| c.eval(alpha)))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::field::qr;
    use crate::mahler::ternary_twos;

    pub(crate) fn ternary_relation() -> RelationPoly {
        let poly = MultiPoly::from_terms([
            (Monomial::one(), KPoly::from_i64s(&[0, 0, 1])),
            (Monomial::var(Var::new(0, 0)), KPoly::from_i64s(&[-1, 0, 0, 1])),
            (Monomial::var(Var::new(0, 1)), KPoly::from_i64s(&[1, 1, -1, -1, -1, 1])),
        ]);
        RelationPoly::new(Kind::Sigma(3), vec!["f".into()], poly).unwrap()
    }

    #[test]
    fn verification() {
        let f = PowerSeries::automaton(ternary_twos());
        let r = ternary_relation();
        assert_eq!(verify_relation(&r, &[f.clone()], 243).unwrap(), None);
        let mut p = r.poly().clone();
        p.add_term(Monomial::one(), KPoly::from_i64s(&[0, 0, -1, 1]));
        assert_eq!(verify_relation(&r.with_poly(p), &[f], 243).unwrap(), Some(2));
    }

    #[test]
    fn evaluation_at_half() {
        let e = ev_alpha(&ternary_relation(), &K::Rational(qr(1, 2))).unwrap();
        assert_eq!(e.coeff(&Monomial::var(Var::new(0, 1))), K::Rational(qr(35, 32)));
    }

    #[test]
    fn exp_relation() {
        let e = PowerSeries::from_fn("exp", |n| {
            let mut f = crate::field::qi(1);
            for k in 1..=n {
                f /= crate::field::qi(k as i64);
            }
            K::Rational(f)
        });
        let rels = guess_algebraic_relations(Kind::Delta, &["e".into()], &[e], 1, 1, 0, 64).unwrap();
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].display(), "e-e'");
        let expect = MultiPoly::from_terms([
            (Monomial::var(Var::new(0, 0)), KPoly::from_i64s(&[1])),
            (Monomial::var(Var::new(0, 1)), KPoly::from_i64s(&[-1])),
        ]);
        assert_eq!(rels[0].poly(), &expect);
    }

    #[test]
    fn theta_is_derivation() {
        let x = MultiPoly::var(Var::new(0, 0));
        let p = &x * &x;
        let d = theta_action(Kind::Delta, &p);
        let expect = MultiPoly::term(KPoly::from_i64s(&[2]), Monomial::from_pairs([(Var::new(0, 0), 1), (Var::new(0, 1), 1)]));
        assert_eq!(d, expect);
    }
}
