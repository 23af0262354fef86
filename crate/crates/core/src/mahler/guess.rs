//! Guessing linear Mahler relations from truncated expansions.

use std::fmt;

use num_traits::{One, Zero};

use super::MahlerFunction;
use crate::error::{Error, Result};
use crate::field::{Field, NfElem};
use crate::linalg::{canonical_basis, Echelon};
use crate::ore::{pow_usize, Kind, Operator, PowerSeries};
use crate::poly::KPoly;

type K = NfElem;

/// Rows required beyond the number of unknowns.
pub const SAFETY_MARGIN: usize = 8;

/// Search box for relations: order, coefficient degree and truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBounds {
    pub max_order: usize,
    pub max_degree: usize,
    pub truncation: usize,
}

impl DegreeBounds {
    pub fn new(max_order: usize, max_degree: usize) -> Self {
        DegreeBounds { max_order, max_degree, truncation: default_truncation(max_order, max_degree) }
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.truncation = n;
        self
    }
}

pub fn default_truncation(m: usize, d: usize) -> usize {
    512.max(4 * (m + 1) * (d + 1))
}

/// `sum_i sum_j p_ij(z) f_i(z^(q^j)) + p(z) = 0`.
#[derive(Clone, PartialEq)]
pub struct SigmaRelation {
    q: u64,
    coeffs: Vec<Vec<KPoly>>,
    constant: KPoly,
}

impl SigmaRelation {
    pub fn new(q: u64, coeffs: Vec<Vec<KPoly>>, constant: KPoly) -> Self {
        SigmaRelation { q, coeffs, constant }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `coeffs()[i][j]` multiplies `f_i(z^(q^j))`.
    pub fn coeffs(&self) -> &[Vec<KPoly>] {
        &self.coeffs
    }

    pub fn constant(&self) -> &KPoly {
        &self.constant
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant.is_zero()
    }

    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(|c| c.iter().rposition(|p| !p.is_zero())).max()
    }

    /// Operator acting on the `i`-th function.
    pub fn operator(&self, i: usize) -> Operator {
        Operator::new(Kind::Sigma(self.q), self.coeffs[i].clone())
    }

    /// Left-hand side as a series.
    pub fn series(&self, funcs: &[PowerSeries]) -> PowerSeries {
        let mut terms = vec![(self.constant.clone(), PowerSeries::one())];
        for (f, row) in funcs.iter().zip(&self.coeffs) {
            for (j, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    terms.push((p.clone(), f.subst_power(pow_usize(self.q, j))));
                }
            }
        }
        PowerSeries::linear(terms)
    }

    /// Does the relation hold modulo `z^n`?
    pub fn check(&self, funcs: &[PowerSeries], n: usize) -> bool {
        self.series(funcs).coeffs(n).iter().all(|c| c.is_zero())
    }

    pub fn display(&self, labels: &[&str]) -> String {
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(format!("({})", self.constant));
        }
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let name = labels.get(i).copied().unwrap_or("f");
                let arg = if j == 0 { "z".to_string() } else { format!("z^{}", pow_usize(self.q, j)) };
                parts.push(format!("({p})*{name}({arg})"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Debug for SigmaRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = (0..self.coeffs.len()).map(|i| format!("f{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        write!(f, "{} = 0", self.display(&refs))
    }
}

/// Kernel of the coefficient matrix whose column `c` is `z^s * bases[b]`
/// for `cols[c] = (b, s)`: solved on the first `n` rows, then restricted
/// to vectors that survive rows `n..n2`.
pub fn series_kernel(bases: &[Vec<K>], cols: &[(usize, usize)], n: usize, n2: usize) -> Vec<Vec<K>> {
    let row = |r: usize| -> Vec<K> {
        cols.iter().map(|&(b, s)| if r >= s { bases[b][r - s].clone() } else { K::zero() }).collect()
    };
    let mut ech = Echelon::new(cols.len());
    for r in 0..n {
        ech.add_row(row(r));
        if ech.is_full() {
            return Vec::new();
        }
    }
    let ker = ech.kernel();
    if ker.is_empty() {
        return ker;
    }
    let mut check = Echelon::new(ker.len());
    for r in n..n2 {
        let v = row(r);
        let proj: Vec<K> = ker
            .iter()
            .map(|k| v.iter().zip(k).fold(K::zero(), |acc, (a, b)| if a.is_zero() || b.is_zero() { acc } else { acc + &(a.clone() * b) }))
            .collect();
        check.add_row(proj);
        if check.is_full() {
            return Vec::new();
        }
    }
    let combos = check.kernel();
    let vecs: Vec<Vec<K>> = combos
        .iter()
        .map(|c| {
            let mut out = vec![K::zero(); cols.len()];
            for (ck, k) in c.iter().zip(&ker) {
                if ck.is_zero() {
                    continue;
                }
                for (o, x) in out.iter_mut().zip(k) {
                    *o = o.clone() + &(ck.clone() * x);
                }
            }
            out
        })
        .collect();
    canonical_basis(&vecs, cols.len())
}

/// All relations `sum_i sum_{j in shifts} p_ij sigma^j f_i (+ p)` with
/// `deg p_ij <= d`, valid modulo `z^n` and re-verified modulo `z^(2n)`,
/// as a basis in reduced echelon form.
pub fn guess_sigma_relations(
    q: u64,
    funcs: &[PowerSeries],
    shifts: &[usize],
    d: usize,
    n: usize,
    inhomogeneous: bool,
) -> Result<Vec<SigmaRelation>> {
    let unknowns = (funcs.len() * shifts.len() + usize::from(inhomogeneous)) * (d + 1);
    let required = unknowns + SAFETY_MARGIN;
    if n < required {
        return Err(Error::TruncationTooSmall { given: n, required });
    }
    let n2 = 2 * n;
    let mut bases = Vec::new();
    let mut cols = Vec::new();
    if inhomogeneous {
        let mut one = vec![K::zero(); n2];
        one[0] = K::one();
        bases.push(one);
        cols.extend((0..=d).map(|k| (0, k)));
    }
    for f in funcs {
        for &j in shifts {
            let b = bases.len();
            bases.push(f.subst_power(pow_usize(q, j)).coeffs(n2));
            cols.extend((0..=d).map(|k| (b, k)));
        }
    }
    let m = shifts.iter().copied().max().unwrap_or(0);
    let ker = series_kernel(&bases, &cols, n, n2);
    Ok(ker
        .into_iter()
        .map(|v| {
            let mut it = v.chunks(d + 1).map(|c| KPoly::new(c.to_vec()));
            let constant = if inhomogeneous { it.next().unwrap() } else { KPoly::zero() };
            let mut coeffs = vec![vec![KPoly::zero(); m + 1]; funcs.len()];
            for row in coeffs.iter_mut() {
                for &j in shifts {
                    row[j] = it.next().unwrap();
                }
            }
            SigmaRelation { q, coeffs, constant }
        })
        .collect())
}

/// Basis of relations among `funcs` within `bounds`, using all shifts
/// `0..=bounds.max_order`.
pub fn guess_linear_sigma_relation(
    funcs: &[MahlerFunction],
    bounds: &DegreeBounds,
    inhomogeneous: bool,
) -> Result<Vec<SigmaRelation>> {
    let Some(first) = funcs.first() else {
        return Err(Error::InvalidInput("no functions given".into()));
    };
    let q = first.q();
    if funcs.iter().any(|f| f.q() != q) {
        return Err(Error::InvalidInput("functions must share the Mahler base".into()));
    }
    let series: Vec<PowerSeries> = funcs.iter().map(|f| f.series().clone()).collect();
    let shifts: Vec<usize> = (0..=bounds.max_order).collect();
    guess_sigma_relations(q, &series, &shifts, bounds.max_degree, bounds.truncation, inhomogeneous)
}

/// How the minimality of a guessed operator is established.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimalityCertificate {
    pub order: usize,
    pub degree: usize,
    pub degree_bound: usize,
    pub truncation: usize,
    /// Orders below `order` at which the truncated linear system has only
    /// the trivial solution for coefficient degree `degree_bound`.
    pub excluded_orders: Vec<usize>,
    /// Set when a reference annihilator divides the result on the right.
    pub reference_divides: Option<bool>,
    pub note: String,
}

/// Least-order annihilator with coefficients of degree `<= d`, then least
/// degree at that order.
pub fn minimal_operator(
    f: &MahlerFunction,
    max_order: usize,
    d: usize,
    n: usize,
) -> Result<(Operator, MinimalityCertificate)> {
    let q = f.q();
    let series = [f.series().clone()];
    let mut excluded = Vec::new();
    for m in 1..=max_order {
        let shifts: Vec<usize> = (0..=m).collect();
        if guess_sigma_relations(q, &series, &shifts, d, n, false)?.is_empty() {
            excluded.push(m);
            continue;
        }
        for dd in 0..=d {
            let rels = guess_sigma_relations(q, &series, &shifts, dd, n, false)?;
            let Some(r) = rels.into_iter().next() else { continue };
            let op = r.operator(0).primitive();
            let (reference_divides, note) = match f.annihilator() {
                Some(l0) if m >= l0.order().unwrap_or(0) => {
                    let (_, rem) = op.right_divide(l0)?;
                    if rem.is_zero() {
                        (Some(true), "exact: left multiple of the known annihilator".to_string())
                    } else {
                        (Some(false), format!("verified modulo z^{}", 2 * n))
                    }
                }
                _ => (None, format!("verified modulo z^{}", 2 * n)),
            };
            let cert = MinimalityCertificate {
                order: m,
                degree: dd,
                degree_bound: d,
                truncation: n,
                excluded_orders: excluded,
                reference_divides,
                note,
            };
            return Ok((op, cert));
        }
    }
    Err(Error::NoRelationWithinBounds(format!("order <= {max_order}, degree <= {d}, truncation {n}")))
}

/// Solves `target = sum_{k in 1..=m} b_k(z) f(z^(q^k))` with `deg b_k <= d`;
/// returns the `b_k` (index 0 unused) when a solution exists.
pub fn solve_shift_witness(
    q: u64,
    f: &PowerSeries,
    target: &PowerSeries,
    m: usize,
    d: usize,
    n: usize,
) -> Result<Option<Vec<KPoly>>> {
    let required = m * (d + 1) + 1 + SAFETY_MARGIN;
    if n < required {
        return Err(Error::TruncationTooSmall { given: n, required });
    }
    let n2 = 2 * n;
    let mut bases = vec![target.coeffs(n2)];
    let mut cols = vec![(0, 0)];
    for k in 1..=m {
        bases.push(f.subst_power(pow_usize(q, k)).coeffs(n2));
        cols.extend((0..=d).map(|t| (k, t)));
    }
    let ker = series_kernel(&bases, &cols, n, n2);
    // reduced echelon form: a solution with nonzero first entry is the
    // first basis vector when it exists
    let Some(v) = ker.into_iter().find(|v| !v[0].is_zero()) else {
        return Ok(None);
    };
    let inv = v[0].inv().expect("nonzero pivot");
    let mut out = vec![KPoly::zero()];
    for k in 0..m {
        let c: Vec<K> = v[1 + k * (d + 1)..1 + (k + 1) * (d + 1)].iter().map(|x| -(x.clone() * &inv)).collect();
        out.push(KPoly::new(c));
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Ring;
    use crate::mahler::{baum_sweet, rudin_shapiro, ternary_twos};

    #[test]
    fn baum_sweet_relation() {
        let f = MahlerFunction::from_automaton("bs", baum_sweet());
        let rels = guess_linear_sigma_relation(&[f], &DegreeBounds::new(2, 1), false).unwrap();
        assert_eq!(rels.len(), 1);
        let op = rels[0].operator(0).primitive();
        assert_eq!(op.coeffs(), &[KPoly::from_i64s(&[1]), KPoly::from_i64s(&[0, -1]), KPoly::from_i64s(&[-1])]);
    }

    #[test]
    fn ternary_inhomogeneous() {
        let f = MahlerFunction::from_automaton("tm3", ternary_twos());
        let rels = guess_linear_sigma_relation(&[f.clone()], &DegreeBounds::new(1, 5), true).unwrap();
        assert_eq!(rels.len(), 1);
        let r = &rels[0];
        // z^2 - (1 - z^3) f + (1 - z^3)(1 + z - z^2) f(z^3), up to scaling
        let c = r.constant().lc().inv().unwrap();
        let scale = |p: &KPoly| p.scale(&c);
        assert_eq!(scale(r.constant()), KPoly::from_i64s(&[0, 0, 1]));
        assert_eq!(scale(&r.coeffs()[0][0]), KPoly::from_i64s(&[-1, 0, 0, 1]));
        assert_eq!(scale(&r.coeffs()[0][1]), KPoly::from_i64s(&[1, 1, -1, -1, -1, 1]));
        assert!(r.check(&[f.series().clone()], 729));
    }

    #[test]
    fn impostor_has_no_relation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let coeffs: Vec<K> = (0..2048).map(|_| K::from_i64(rng.gen_range(-5..=5))).collect();
        let f = MahlerFunction::from_series("random", 2, PowerSeries::from_vec(coeffs));
        assert!(guess_linear_sigma_relation(&[f], &DegreeBounds::new(2, 2), false).unwrap().is_empty());
    }

    #[test]
    fn minimal_operators() {
        let (op, cert) = minimal_operator(&MahlerFunction::from_automaton("rs", rudin_shapiro()), 3, 1, 512).unwrap();
        assert_eq!(op.coeffs(), &[KPoly::from_i64s(&[1]), KPoly::from_i64s(&[-1, 1]), KPoly::from_i64s(&[0, -2])]);
        assert_eq!(cert.excluded_orders, vec![1]);
        let geo = MahlerFunction::from_series("geo", 2, PowerSeries::from_fn("1/(1-z)", |_| K::one()));
        let (op, cert) = minimal_operator(&geo, 2, 1, 512).unwrap();
        assert_eq!(op.coeffs(), &[KPoly::from_i64s(&[1]), KPoly::from_i64s(&[-1, -1])]);
        assert!(cert.excluded_orders.is_empty());
    }

    #[test]
    fn truncation_guard() {
        let f = MahlerFunction::from_automaton("bs", baum_sweet());
        let err = guess_linear_sigma_relation(&[f], &DegreeBounds::new(2, 1).with_truncation(10), false).unwrap_err();
        assert!(matches!(err, Error::TruncationTooSmall { .. }));
    }
}
