//! Mahler functions and operators.

pub mod automaton;
pub mod denominator;
pub mod guess;
pub mod regular;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, NfElem};
use crate::ore::{pow_usize, KRat, Kind, Operator, PowerSeries, SystemMatrix};
use crate::poly::KPoly;

pub use automaton::{baum_sweet, rudin_shapiro, series_from_automaton, signed_baum_sweet, ternary_twos, AutomatonSeq};
pub use denominator::{mahler_denominator, make_level_r, remove_singularities, Denominator};
pub use guess::{
    default_truncation, guess_linear_sigma_relation, guess_sigma_relations, minimal_operator, DegreeBounds,
    MinimalityCertificate, SigmaRelation,
};
pub use regular::{
    is_regular_point, iterate_system, multiplicity_bound, order_reduce_at_point, reduce_multiplicity_step,
    RegularityReport, RegularityTarget,
};

type K = NfElem;

/// `sum_i a_i(z) f(z^(q^i)) + b(z) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaEquation {
    q: u64,
    coeffs: Vec<KPoly>,
    inhom: KPoly,
}

impl SigmaEquation {
    pub fn new(q: u64, coeffs: Vec<KPoly>, inhom: KPoly) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidInput("base must be at least 2".into()));
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroOperator);
        }
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(SigmaEquation { q, coeffs, inhom })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[KPoly] {
        &self.coeffs
    }

    pub fn inhom(&self) -> &KPoly {
        &self.inhom
    }

    pub fn operator(&self) -> Operator {
        Operator::new(Kind::Sigma(self.q), self.coeffs.clone())
    }

    /// Homogeneous operator killing every solution: `L` itself, or
    /// `b sigma L - sigma(b) L` when `L f + b = 0` with `b != 0`.
    pub fn homogenize(&self) -> Operator {
        let l = self.operator();
        if self.inhom.is_zero() {
            return l;
        }
        let b = KRat::from_poly(self.inhom.clone());
        let sb = KRat::from_poly(self.inhom.substitute_power(self.q as usize));
        l.sigma_shift(1).scale(&b).sub(&l.scale(&sb)).expect("same kind")
    }

    /// Residual of the equation on `f` modulo `z^n`.
    pub fn residual(&self, f: &PowerSeries, n: usize) -> Vec<K> {
        let mut terms = vec![(self.inhom.clone(), PowerSeries::one())];
        for (i, a) in self.coeffs.iter().enumerate() {
            terms.push((a.clone(), f.subst_power(pow_usize(self.q, i))));
        }
        PowerSeries::linear(terms).coeffs(n)
    }

    /// First-order system for `Y = (1, f, sigma f, ..., sigma^(m-1) f)`.
    pub fn system(&self, name: &str) -> Result<SystemMatrix> {
        let m = self.order();
        if m == 0 {
            return Err(Error::PreconditionViolated("equation of order 0 has no companion system".into()));
        }
        let n = m + 1;
        let am = KRat::from_poly(self.coeffs[m].clone());
        let inv = am.inv().expect("nonzero leading coefficient");
        let mut a = vec![vec![KRat::zero(); n]; n];
        a[0][0] = KRat::one();
        for j in 1..m {
            a[j][j + 1] = KRat::one();
        }
        a[m][0] = -(KRat::from_poly(self.inhom.clone()) * &inv);
        for i in 0..m {
            a[m][i + 1] = -(KRat::from_poly(self.coeffs[i].clone()) * &inv);
        }
        let mut labels = vec!["1".to_string(), name.to_string()];
        labels.extend((1..m).map(|j| format!("S^{j}{name}")));
        SystemMatrix::new(Kind::Sigma(self.q), a, labels)
    }
}

/// `f = rhs + sum_{j >= depth} coeffs[j] f(z^(q^j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnfoldedRelation {
    pub q: u64,
    pub depth: usize,
    pub rhs: KRat,
    pub coeffs: Vec<KRat>,
}

impl UnfoldedRelation {
    /// Cleared form as a relation in `1, f, ..., sigma^k f`.
    pub fn cleared(&self) -> SigmaRelation {
        let mut den = self.rhs.den().clone();
        for c in &self.coeffs {
            let g = den.gcd(c.den());
            den = &den * &c.den().exact_div(&g).unwrap();
        }
        let lift = |r: &KRat| r.num() * &den.exact_div(r.den()).unwrap();
        let mut row: Vec<KPoly> = self.coeffs.iter().map(lift).collect();
        if row.is_empty() {
            row.push(KPoly::zero());
        }
        row[0] = &row[0] - &den;
        SigmaRelation::new(self.q, vec![row], lift(&self.rhs))
    }
}

/// Rewrites `f` through repeated substitution of its own equation until
/// only `f(z^(q^j))` with `j >= depth` remain.
pub fn compose_relation(eq: &SigmaEquation, depth: usize) -> Result<UnfoldedRelation> {
    let q = eq.q as usize;
    let a0 = KRat::from_poly(eq.coeffs[0].clone());
    let Some(inv0) = a0.inv() else {
        return Err(Error::PreconditionViolated("constant coefficient must be nonzero".into()));
    };
    if eq.order() == 0 {
        return Err(Error::PreconditionViolated("equation of order 0".into()));
    }
    // f = r0 + sum_{i >= 1} c0_i sigma^i f
    let r0 = -(KRat::from_poly(eq.inhom.clone()) * &inv0);
    let c0: Vec<KRat> = eq.coeffs.iter().map(|a| -(KRat::from_poly(a.clone()) * &inv0)).collect();
    let mut rhs = KRat::zero();
    let mut coeffs: Vec<KRat> = vec![KRat::one()];
    loop {
        let Some(j) = (0..depth.min(coeffs.len())).find(|&j| !coeffs[j].is_zero()) else { break };
        let c = std::mem::replace(&mut coeffs[j], KRat::zero());
        let qj = pow_usize(q as u64, j);
        rhs = &rhs + &(c.clone() * &r0.substitute_power(qj));
        for (i, ci) in c0.iter().enumerate().skip(1) {
            if ci.is_zero() {
                continue;
            }
            if coeffs.len() <= i + j {
                coeffs.resize(i + j + 1, KRat::zero());
            }
            coeffs[i + j] = &coeffs[i + j] + &(c.clone() * &ci.substitute_power(qj));
        }
    }
    Ok(UnfoldedRelation { q: eq.q, depth, rhs, coeffs })
}

/// Mahler function with its series and whatever equations are known.
#[derive(Clone, Debug)]
pub struct MahlerFunction {
    name: String,
    q: u64,
    series: PowerSeries,
    annihilator: Option<Operator>,
    equation: Option<SigmaEquation>,
    automaton: Option<AutomatonSeq>,
    notes: Vec<String>,
}

impl MahlerFunction {
    pub fn from_series(name: impl Into<String>, q: u64, series: PowerSeries) -> Self {
        MahlerFunction {
            name: name.into(),
            q,
            series,
            annihilator: None,
            equation: None,
            automaton: None,
            notes: Vec::new(),
        }
    }

    pub fn from_automaton(name: impl Into<String>, a: AutomatonSeq) -> Self {
        let mut f = Self::from_series(name, a.q(), PowerSeries::automaton(a.clone()));
        f.automaton = Some(a);
        f.notes.push("coefficients produced by an automaton".into());
        f
    }

    /// Solution of `eq` with the given initial coefficients.
    pub fn from_equation(name: impl Into<String>, eq: SigmaEquation, initial: Vec<K>) -> Result<Self> {
        let series = PowerSeries::sigma_recurrence(eq.q, eq.coeffs.clone(), eq.inhom.clone(), initial)?;
        let mut f = Self::from_series(name, eq.q, series);
        f.annihilator = Some(eq.homogenize());
        if !eq.inhom.is_zero() {
            f.notes.push("annihilator obtained by eliminating the inhomogeneous term".into());
        }
        f.equation = Some(eq);
        Ok(f)
    }

    /// Attaches an annihilator after checking it modulo `z^256`.
    pub fn with_annihilator(mut self, l: Operator) -> Result<Self> {
        if l.kind() != Kind::Sigma(self.q) {
            return Err(Error::KindMismatch);
        }
        if l.apply_numerator(&self.series, 256).iter().any(|c| !c.is_zero()) {
            return Err(Error::PreconditionViolated("operator does not annihilate the series".into()));
        }
        self.annihilator = Some(l);
        Ok(self)
    }

    pub fn with_equation(mut self, eq: SigmaEquation) -> Result<Self> {
        if eq.q != self.q {
            return Err(Error::KindMismatch);
        }
        if eq.residual(&self.series, 256).iter().any(|c| !c.is_zero()) {
            return Err(Error::PreconditionViolated("equation does not hold for the series".into()));
        }
        if self.annihilator.is_none() {
            self.annihilator = Some(eq.homogenize());
        }
        self.equation = Some(eq);
        Ok(self)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn series(&self) -> &PowerSeries {
        &self.series
    }

    pub fn annihilator(&self) -> Option<&Operator> {
        self.annihilator.as_ref()
    }

    pub fn equation(&self) -> Option<&SigmaEquation> {
        self.equation.as_ref()
    }

    pub fn automaton(&self) -> Option<&AutomatonSeq> {
        self.automaton.as_ref()
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }
}

/// The base-3 example: `z^2 / (1 - z^3) - f + (1 + z - z^2) f(z^3) = 0`,
/// cleared by `1 - z^3`.
pub fn ternary_equation() -> SigmaEquation {
    SigmaEquation::new(
        3,
        vec![KPoly::from_i64s(&[-1, 0, 0, 1]), KPoly::from_i64s(&[1, 1, -1, -1, -1, 1])],
        KPoly::from_i64s(&[0, 0, 1]),
    )
    .expect("valid equation")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ternary_series_matches_automaton() {
        let f = MahlerFunction::from_equation("f", ternary_equation(), vec![K::zero()]).unwrap();
        let a = PowerSeries::automaton(ternary_twos());
        assert_eq!(f.series().coeffs(729), a.coeffs(729));
        let hom = f.annihilator().unwrap();
        assert_eq!(hom.order(), Some(2));
        assert_eq!(hom.coeffs()[0], KPoly::from_i64s(&[0, 0, 0, 0, 0, 0, 1, 0, 0, -1]));
        assert!(hom.apply_numerator(f.series(), 729).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn depth_two_unfolding() {
        let u = compose_relation(&ternary_equation(), 2).unwrap();
        let num = KPoly::from_i64s(&[0, 0, 1, 0, 0, 1, 1, 1]);
        let den = KPoly::from_i64s(&[1, 0, 0, 0, 0, 0, 0, 0, 0, -1]);
        assert_eq!(u.rhs, KRat::new(num, den).unwrap());
        let c2 = &KPoly::from_i64s(&[1, 1, -1]) * &KPoly::from_i64s(&[1, 0, 0, 1, 0, 0, -1]);
        assert_eq!(u.coeffs[2], KRat::from_poly(c2));
        assert!(u.coeffs[0].is_zero() && u.coeffs[1].is_zero());
        let f = PowerSeries::automaton(ternary_twos());
        assert!(u.cleared().check(&[f], 729));
    }

    #[test]
    fn ternary_system() {
        let a = ternary_equation().system("f").unwrap();
        let f = PowerSeries::automaton(ternary_twos());
        assert_eq!(a.check_solution(&[PowerSeries::one(), f], 300), None);
        let d = KPoly::from_i64s(&[1, 1, -1]);
        assert_eq!(a.det(), KRat::new(KPoly::one(), d).unwrap());
    }
}
