//! First-order systems `Y(z^q) = A(z) Y(z)` or `Y' = A(z) Y`.

use num_traits::Zero;

use super::{pow_usize, KRat, Kind, PowerSeries};
use crate::error::{Error, Result};
use crate::field::NfElem;
use crate::linalg;
use crate::poly::KPoly;

/// Square matrix of rational functions with a kind and row labels.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemMatrix {
    kind: Kind,
    entries: Vec<Vec<KRat>>,
    labels: Vec<String>,
}

impl SystemMatrix {
    pub fn new(kind: Kind, entries: Vec<Vec<KRat>>, labels: Vec<String>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("system matrix must be square".into()));
        }
        if labels.len() != n {
            return Err(Error::InvalidInput("one label per row is required".into()));
        }
        Ok(SystemMatrix { kind, entries, labels })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &KRat {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<KRat>] {
        &self.entries
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn det(&self) -> KRat {
        linalg::det(&self.entries)
    }

    pub fn inverse(&self) -> Option<Vec<Vec<KRat>>> {
        linalg::inverse(&self.entries)
    }

    /// Entries with `z` replaced by `z^k`.
    pub fn substitute_power(&self, k: usize) -> Vec<Vec<KRat>> {
        self.entries.iter().map(|r| r.iter().map(|c| c.substitute_power(k)).collect()).collect()
    }

    /// Block-diagonal sum.
    pub fn direct_sum(systems: &[SystemMatrix]) -> Result<SystemMatrix> {
        let Some(first) = systems.first() else {
            return Err(Error::InvalidInput("empty list of systems".into()));
        };
        if systems.iter().any(|s| s.kind != first.kind) {
            return Err(Error::KindMismatch);
        }
        let n: usize = systems.iter().map(|s| s.dim()).sum();
        let mut entries = vec![vec![KRat::zero(); n]; n];
        let mut labels = Vec::with_capacity(n);
        let mut off = 0;
        for s in systems {
            for i in 0..s.dim() {
                for j in 0..s.dim() {
                    entries[off + i][off + j] = s.entries[i][j].clone();
                }
            }
            labels.extend(s.labels.iter().cloned());
            off += s.dim();
        }
        SystemMatrix::new(first.kind, entries, labels)
    }

    /// `A_l(z) = A(z^(q^(l-1))) ... A(z^q) A(z)`, a `q^l`-Mahler system.
    pub fn iterate(&self, ell: usize) -> Result<SystemMatrix> {
        let Kind::Sigma(q) = self.kind else {
            return Err(Error::KindMismatch);
        };
        if ell == 0 {
            return Err(Error::InvalidInput("iteration count must be positive".into()));
        }
        let mut acc = self.entries.clone();
        for j in 1..ell {
            let a = self.substitute_power(pow_usize(q, j));
            acc = linalg::mat_mul(&a, &acc);
        }
        SystemMatrix::new(Kind::Sigma(q.pow(ell as u32)), acc, self.labels.clone())
    }

    /// Polynomials whose nonvanishing at `x` makes `A(x)` defined and
    /// invertible: the entry denominators and the numerator of `det A`.
    pub fn singular_polys(&self) -> Vec<KPoly> {
        let mut out: Vec<KPoly> = Vec::new();
        for r in &self.entries {
            for c in r {
                if !c.den().is_constant() {
                    out.push(c.den().clone());
                }
            }
        }
        out.push(self.det().num().clone());
        out
    }

    /// Checks `Y(z^q) = A Y` (or `Y' = A Y`) modulo `z^n` for the given
    /// solution vector; returns the first failing row.
    pub fn check_solution(&self, y: &[PowerSeries], n: usize) -> Option<usize> {
        let lhs: Vec<Vec<NfElem>> = y
            .iter()
            .map(|s| match self.kind {
                Kind::Sigma(q) => s.subst_power(q as usize).coeffs(n),
                Kind::Delta => s.derivative().coeffs(n),
            })
            .collect();
        for (i, row) in self.entries.iter().enumerate() {
            let mut den = KPoly::one();
            for c in row {
                let g = den.gcd(c.den());
                den = &den * &c.den().exact_div(&g).unwrap();
            }
            let mut terms = vec![(-den.clone(), PowerSeries::from_vec(lhs[i].clone()))];
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    terms.push((c.num() * &den.exact_div(c.den()).unwrap(), y[j].clone()));
                }
            }
            if PowerSeries::linear(terms).coeffs(n).iter().any(|x| !x.is_zero()) {
                return Some(i);
            }
        }
        None
    }

    /// Are all entries Laurent polynomials (denominators monomials)?
    pub fn is_laurent(&self) -> bool {
        self.entries.iter().flatten().all(|c| c.den().coeffs().iter().filter(|x| !x.is_zero()).count() == 1)
    }

    pub fn map_entries(&self, f: impl Fn(&KRat) -> KRat) -> SystemMatrix {
        SystemMatrix {
            kind: self.kind,
            entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn with_entries(&self, entries: Vec<Vec<KRat>>) -> Result<SystemMatrix> {
        SystemMatrix::new(self.kind, entries, self.labels.clone())
    }

    pub fn identity_like(&self) -> Vec<Vec<KRat>> {
        linalg::identity(self.dim())
    }
}
