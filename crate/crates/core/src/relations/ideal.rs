//! Finite presentations of relation ideals and their prolongations.

use super::{verify_relation, RelationPoly};
use crate::error::{Error, Result};
use crate::ore::{Kind, PowerSeries};

/// Generators of bounded depth together with the linear forms coming from
/// annihilating operators.
#[derive(Clone, Debug)]
pub struct IdealPresentation {
    pub kind: Kind,
    pub labels: Vec<String>,
    pub generators: Vec<RelationPoly>,
    pub linear_forms: Vec<RelationPoly>,
    /// Bounds under which the linear forms were found minimal.
    pub bounds_note: Option<String>,
}

impl IdealPresentation {
    pub fn new(generators: Vec<RelationPoly>, linear_forms: Vec<RelationPoly>) -> Result<Self> {
        let first = generators.first().or(linear_forms.first()).ok_or_else(|| Error::InvalidInput("empty presentation".into()))?;
        let (kind, labels) = (first.kind(), first.labels().to_vec());
        if generators.iter().chain(&linear_forms).any(|r| r.kind() != kind || r.labels() != labels.as_slice()) {
            return Err(Error::InvalidInput("presentation mixes kinds or labels".into()));
        }
        Ok(IdealPresentation { kind, labels, generators, linear_forms, bounds_note: None })
    }

    pub fn with_bounds_note(mut self, note: impl Into<String>) -> Self {
        self.bounds_note = Some(note.into());
        self
    }

    /// Index of the first element failing modulo `z^n`, with its failing order.
    pub fn verify(&self, funcs: &[PowerSeries], n: usize) -> Result<Option<(usize, usize)>> {
        for (i, r) in self.generators.iter().chain(&self.linear_forms).enumerate() {
            if let Some(k) = verify_relation(r, funcs, n)? {
                return Ok(Some((i, k)));
            }
        }
        Ok(None)
    }
}

/// `Theta^k` images of the generators and linear forms with depth `<= depth`.
pub fn prolong_ideal(p: &IdealPresentation, depth: usize) -> Vec<RelationPoly> {
    let mut out: Vec<RelationPoly> = Vec::new();
    for r in p.generators.iter().chain(&p.linear_forms) {
        let mut cur = r.clone();
        while cur.depth() <= depth {
            if !cur.poly().is_zero() && !out.contains(&cur) {
                out.push(cur.clone());
            }
            cur = cur.theta();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{NfElem, Ring};
    use crate::poly::{KPoly, Monomial, MultiPoly, Var};

    fn exp_series() -> PowerSeries {
        PowerSeries::delta_recurrence(vec![KPoly::from_i64s(&[-1]), KPoly::from_i64s(&[1])], vec![NfElem::from_i64(1)])
            .unwrap()
    }

    fn exp_form() -> RelationPoly {
        let p = MultiPoly::from_terms([
            (Monomial::var(Var::new(0, 1)), KPoly::from_i64s(&[1])),
            (Monomial::var(Var::new(0, 0)), KPoly::from_i64s(&[-1])),
        ]);
        RelationPoly::new(Kind::Delta, vec!["e".into()], p).unwrap()
    }

    #[test]
    fn depth_zero_keeps_only_shallow_elements() {
        let p = IdealPresentation::new(vec![], vec![exp_form()]).unwrap();
        assert!(prolong_ideal(&p, 0).is_empty());
        assert_eq!(prolong_ideal(&p, 1), vec![exp_form()]);
    }

    #[test]
    fn exp_prolongation() {
        let p = IdealPresentation::new(vec![], vec![exp_form()]).unwrap();
        let out = prolong_ideal(&p, 2);
        assert_eq!(out.len(), 2);
        let x2 = MultiPoly::from_terms([
            (Monomial::var(Var::new(0, 2)), KPoly::from_i64s(&[1])),
            (Monomial::var(Var::new(0, 1)), KPoly::from_i64s(&[-1])),
        ]);
        assert_eq!(out[1].poly(), &x2);
        // X2 - X0 = (X2 - X1) + (X1 - X0)
        let sum = out[0].poly() + out[1].poly();
        let target = MultiPoly::from_terms([
            (Monomial::var(Var::new(0, 2)), KPoly::from_i64s(&[1])),
            (Monomial::var(Var::new(0, 0)), KPoly::from_i64s(&[-1])),
        ]);
        assert!((&sum - &target).is_zero());
        let e = exp_series();
        for r in &out {
            assert_eq!(verify_relation(r, &[e.clone()], 64).unwrap(), None);
        }
    }
}
