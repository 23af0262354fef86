//! Deterministic finite automata with output reading base-q digits.

use crate::error::{Error, Result};
use crate::field::NfElem;
use crate::ore::PowerSeries;

/// Automaton reading the base-`q` digits of `n` (least significant first
/// unless `lsd` is false); `n = 0` reads the empty string.
#[derive(Clone, Debug, PartialEq)]
pub struct AutomatonSeq {
    q: u64,
    transitions: Vec<Vec<usize>>,
    output: Vec<NfElem>,
    initial: usize,
    lsd: bool,
}

impl AutomatonSeq {
    pub fn new(q: u64, transitions: Vec<Vec<usize>>, output: Vec<NfElem>, initial: usize, lsd: bool) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidInput("base must be at least 2".into()));
        }
        let n = transitions.len();
        if n == 0 || output.len() != n || initial >= n {
            return Err(Error::InvalidInput("automaton states, outputs and initial state disagree".into()));
        }
        for row in &transitions {
            if row.len() != q as usize || row.iter().any(|&t| t >= n) {
                return Err(Error::InvalidInput("automaton transitions must be complete".into()));
            }
        }
        Ok(AutomatonSeq { q, transitions, output, initial, lsd })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn states(&self) -> usize {
        self.transitions.len()
    }

    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.transitions
    }

    pub fn output(&self) -> &[NfElem] {
        &self.output
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn lsd(&self) -> bool {
        self.lsd
    }

    pub fn digits(&self, mut n: u64) -> Vec<usize> {
        let mut d = Vec::new();
        while n > 0 {
            d.push((n % self.q) as usize);
            n /= self.q;
        }
        if !self.lsd {
            d.reverse();
        }
        d
    }

    pub fn term(&self, n: u64) -> NfElem {
        let mut s = self.initial;
        for d in self.digits(n) {
            s = self.transitions[s][d];
        }
        self.output[s].clone()
    }
}

/// First `n` coefficients of the automatic series.
pub fn series_from_automaton(a: &AutomatonSeq, n: usize) -> PowerSeries {
    let s = PowerSeries::automaton(a.clone());
    s.coeffs(n);
    s
}

fn int(v: i64) -> NfElem {
    NfElem::Rational(crate::field::qi(v))
}

/// Baum-Sweet: 1 when every block of zeros in the binary expansion has even
/// length.
pub fn baum_sweet() -> AutomatonSeq {
    // 0: even open zero run, 1: odd open zero run, 2: rejected
    AutomatonSeq::new(2, vec![vec![1, 0], vec![0, 2], vec![2, 2]], vec![int(1), int(0), int(0)], 0, true)
        .expect("valid automaton")
}

/// Rudin-Shapiro: `(-1)^(number of occurrences of 11)`.
pub fn rudin_shapiro() -> AutomatonSeq {
    // state = 2 * parity + last digit
    AutomatonSeq::new(2, vec![vec![0, 1], vec![0, 3], vec![2, 3], vec![2, 1]], vec![int(1), int(1), int(-1), int(-1)], 0, true)
        .expect("valid automaton")
}

/// Number of digits 2 in base 3, modulo 2.
pub fn ternary_twos() -> AutomatonSeq {
    AutomatonSeq::new(3, vec![vec![0, 0, 1], vec![1, 1, 0]], vec![int(0), int(1)], 0, true).expect("valid automaton")
}

/// `0` when some block of zeros has odd length, otherwise
/// `(-1)^(binary digit sum)`.
pub fn signed_baum_sweet() -> AutomatonSeq {
    // state = 3 * parity of ones + Baum-Sweet state
    let mut tr = vec![vec![0; 2]; 6];
    let bs = [[1, 0], [0, 2], [2, 2]];
    for p in 0..2 {
        for b in 0..3 {
            let s = 3 * p + b;
            tr[s][0] = 3 * p + bs[b][0];
            tr[s][1] = 3 * (1 - p) + bs[b][1];
        }
    }
    let out = vec![int(1), int(0), int(0), int(-1), int(0), int(0)];
    AutomatonSeq::new(2, tr, out, 0, true).expect("valid automaton")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(a: &AutomatonSeq, n: u64) -> Vec<i64> {
        (0..n)
            .map(|i| {
                let q = a.term(i).to_rational().unwrap();
                i64::try_from(q.to_integer()).unwrap()
            })
            .collect()
    }

    use crate::field::Field;

    #[test]
    fn known_prefixes() {
        assert_eq!(ints(&baum_sweet(), 8), vec![1, 1, 0, 1, 1, 0, 0, 1]);
        assert_eq!(ints(&ternary_twos(), 9), vec![0, 0, 1, 0, 0, 1, 1, 1, 0]);
        assert_eq!(ints(&rudin_shapiro(), 8), vec![1, 1, 1, -1, 1, 1, -1, 1]);
        assert_eq!(ints(&signed_baum_sweet(), 8), vec![1, -1, 0, 1, -1, 0, 0, -1]);
    }

    #[test]
    fn constant_output() {
        let a = AutomatonSeq::new(2, vec![vec![0, 0]], vec![int(1)], 0, false).unwrap();
        assert!(ints(&a, 20).iter().all(|&x| x == 1));
        assert!(AutomatonSeq::new(2, vec![vec![0]], vec![int(1)], 0, true).is_err());
    }
}
