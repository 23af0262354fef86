use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::field::Ring;

/// Prolongation variable `X_{func,depth}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub func: usize,
    pub depth: usize,
}

impl Var {
    pub fn new(func: usize, depth: usize) -> Self {
        Var { func, depth }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}.{}", self.func, self.depth)
    }
}

/// Power product with positive exponents, sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut m: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *m.entry(v).or_insert(0) += e;
        }
        Monomial(m.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|p| p.0 == v).map_or(0, |p| p.1)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial::from_pairs(self.0.iter().chain(o.0.iter()).copied())
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().all(|&(v, e)| o.exponent(v) >= e)
    }

    /// `o / self`, assuming divisibility.
    pub fn quotient_of(&self, o: &Monomial) -> Monomial {
        Monomial(
            o.0.iter()
                .map(|&(v, e)| (v, e - self.exponent(v)))
                .filter(|p| p.1 > 0)
                .collect(),
        )
    }

    pub fn lcm(&self, o: &Monomial) -> Monomial {
        let vars: BTreeSet<Var> = self.0.iter().chain(o.0.iter()).map(|p| p.0).collect();
        Monomial(vars.into_iter().map(|v| (v, self.exponent(v).max(o.exponent(v)))).collect())
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|p| p.0)
    }

    /// Applies `f` to every variable (used for prolongation shifts).
    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (f(v), e)))
    }

    pub fn format_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&(v, e)| if e == 1 { name(v) } else { format!("{}^{}", name(v), e) })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Monomial orders on prolongation variables. Variables listed first weigh
/// most; unlisted variables rank after all listed ones in their natural
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    Lex(Vec<Var>),
    DegRevLex(Vec<Var>),
    /// Eliminates `first`: degrevlex on `first`, ties broken by degrevlex on
    /// `second`.
    Block { first: Vec<Var>, second: Vec<Var> },
}

fn full_list(listed: &[Var], a: &Monomial, b: &Monomial) -> Vec<Var> {
    let mut out = listed.to_vec();
    let extra: BTreeSet<Var> = a.vars().chain(b.vars()).filter(|v| !listed.contains(v)).collect();
    out.extend(extra);
    out
}

fn lex(vars: &[Var], a: &Monomial, b: &Monomial) -> Ordering {
    for &v in vars {
        match a.exponent(v).cmp(&b.exponent(v)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn grevlex(vars: &[Var], a: &Monomial, b: &Monomial) -> Ordering {
    let da: u32 = vars.iter().map(|&v| a.exponent(v)).sum();
    let db: u32 = vars.iter().map(|&v| b.exponent(v)).sum();
    if da != db {
        return da.cmp(&db);
    }
    for &v in vars.iter().rev() {
        match a.exponent(v).cmp(&b.exponent(v)) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex(l) => lex(&full_list(l, a, b), a, b),
            MonomialOrder::DegRevLex(l) => grevlex(&full_list(l, a, b), a, b),
            MonomialOrder::Block { first, second } => {
                let rest: Vec<Var> = full_list(second, a, b).into_iter().filter(|v| !first.contains(v)).collect();
                grevlex(first, a, b).then_with(|| grevlex(&rest, a, b))
            }
        }
    }
}

/// Sparse polynomial in prolongation variables with coefficients in `C`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Ring> MultiPoly<C> {
    pub fn zero() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(C::one(), Monomial::var(v))
    }

    pub fn term(c: C, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + &c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect()
    }

    /// Is every monomial of the same total degree.
    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c)))
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        MultiPoly { terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect() }
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        MultiPoly::from_terms(self.terms.iter().map(|(m, a)| (m.clone(), f(a))))
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, a)| (m.map_vars(&f), a.clone())))
    }

    /// Leading monomial and coefficient for `order`.
    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &C)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    /// Substitutes values for the variables: `sum c_m * prod val(v)^e`.
    pub fn evaluate<T: Ring>(&self, coeff: impl Fn(&C) -> T, val: impl Fn(Var) -> T) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = coeff(c);
            for &(v, e) in m.pairs() {
                t = t * &crate::field::pow(&val(v), e as u64);
            }
            acc = acc + &t;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn format_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (m, c) in &self.terms {
            let cs = c.to_text();
            let term = if m.is_one() {
                cs
            } else if c.is_one() {
                m.format_with(name)
            } else if *c == -C::one() {
                format!("-{}", m.format_with(name))
            } else {
                format!("{}*{}", super::parse::paren_if_needed(&cs), m.format_with(name))
            };
            if !out.is_empty() && !term.starts_with('-') {
                out.push('+');
            }
            out.push_str(&term);
        }
        out
    }
}

impl<C: Ring> Add<&MultiPoly<C>> for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, o: &MultiPoly<C>) -> MultiPoly<C> {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }
}

impl<C: Ring> Sub<&MultiPoly<C>> for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, o: &MultiPoly<C>) -> MultiPoly<C> {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c.clone());
        }
        r
    }
}

impl<C: Ring> Mul<&MultiPoly<C>> for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, o: &MultiPoly<C>) -> MultiPoly<C> {
        let mut r = MultiPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1.clone() * c2);
            }
        }
        r
    }
}

impl<C: Ring> Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<C: Ring> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&|v| v.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{qi, Q};

    fn x(i: usize) -> MultiPoly<Q> {
        MultiPoly::var(Var::new(i, 0))
    }

    #[test]
    fn ring_operations() {
        let a = &x(1) + &x(2);
        let b = &x(1) - &x(2);
        let p = &a * &b;
        let expect = &(&x(1) * &x(1)) - &(&x(2) * &x(2));
        assert_eq!(p, expect);
        assert!(p.is_homogeneous());
        assert_eq!(p.total_degree(), 2);
        let v = p.evaluate(|c| c.clone(), |v| qi(v.func as i64 + 1));
        assert_eq!(v, qi(4 - 9));
    }

    #[test]
    fn orders() {
        let v1 = Var::new(1, 0);
        let v2 = Var::new(2, 0);
        let a = Monomial::from_pairs([(v1, 3)]);
        let b = Monomial::from_pairs([(v2, 1)]);
        let lex = MonomialOrder::Lex(vec![v2, v1]);
        assert_eq!(lex.cmp(&a, &b), Ordering::Less);
        let grl = MonomialOrder::DegRevLex(vec![v2, v1]);
        assert_eq!(grl.cmp(&a, &b), Ordering::Greater);
        let blk = MonomialOrder::Block { first: vec![v2], second: vec![v1] };
        assert_eq!(blk.cmp(&a, &b), Ordering::Less);
        let c = Monomial::from_pairs([(v1, 1), (v2, 1)]);
        assert!(Monomial::var(v1).divides(&c));
        assert_eq!(Monomial::var(v1).quotient_of(&c), Monomial::var(v2));
        assert_eq!(a.lcm(&c), Monomial::from_pairs([(v1, 3), (v2, 1)]));
    }
}
