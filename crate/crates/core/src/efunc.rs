//! E-functions: exact coefficient streams, annihilating differential
//! operators, prolongation systems and factorial tail bounds.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::evalnum::FactorialBound;
use crate::field::{Field, NfElem, Q};
use crate::linalg::kernel;
use crate::mahler::guess::{series_kernel, SAFETY_MARGIN};
use crate::ore::{KRat, Kind, Operator, PowerSeries, SystemMatrix};
use crate::poly::KPoly;

type K = NfElem;

pub const CORPUS: [&str; 4] = ["exp", "J0", "zm1exp", "bessel_f"];

/// E-function with an annihilator and a tail bound.
#[derive(Clone, Debug)]
pub struct EFunction {
    pub name: String,
    pub series: PowerSeries,
    pub annihilator: Operator,
    pub bound: FactorialBound,
    pub closed_form: String,
}

impl EFunction {
    /// First order at which the annihilator fails modulo `z^n`.
    pub fn check_annihilator(&self, n: usize) -> Option<usize> {
        self.annihilator.apply_numerator(&self.series, n).iter().position(|c| !c.is_zero())
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn rat(num: BigInt, den: BigInt) -> K {
    K::Rational(Q::new(num, den))
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// `1/n!`.
pub fn exp_coeff(n: usize) -> K {
    rat(BigInt::one(), factorial(n))
}

/// `(-1)^k / (k!)^2 / 4^k` at `n = 2k`.
pub fn j0_coeff(n: usize) -> K {
    if n % 2 == 1 {
        return K::zero();
    }
    let k = n / 2;
    let f = factorial(k);
    let s = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    rat(s, &f * &f * pow2(2 * k))
}

/// `(n - 1)/n!`.
pub fn zm1exp_coeff(n: usize) -> K {
    rat(BigInt::from(n as i64 - 1), factorial(n))
}

/// Coefficients of the displayed double series for `J0^2 - (z - 1) J0'`;
/// `1/(n-1)!` is read as 0 for `n = 0`.
pub fn bessel_f_coeff(n: usize) -> K {
    let m = n / 2;
    let sign = if m % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    if n % 2 == 0 {
        let fm = factorial(m);
        let first = rat(&sign * factorial(2 * m), fm.pow(4) * pow2(2 * m));
        if m == 0 {
            return first;
        }
        let second = rat(sign, &fm * factorial(m - 1) * pow2(2 * m - 1));
        &first - &second
    } else {
        rat(-sign, factorial(m + 1) * factorial(m) * pow2(2 * m + 1))
    }
}

fn p(cs: &[i64]) -> KPoly {
    KPoly::from_i64s(cs)
}

fn delta(coeffs: Vec<KPoly>) -> Operator {
    Operator::new(Kind::Delta, coeffs)
}

fn fb(c: i64, m: i64, note: &str) -> FactorialBound {
    FactorialBound { c: Q::from_integer(c.into()), m: Q::from_integer(m.into()), note: note.into() }
}

/// Annihilator of `J0^2 - (z - 1) J0'`: its derivatives live in the span of
/// `J0^2, J0 J0', J0'^2, J0, J0'` over `Q(z)`, where `J0'' = -J0'/z - J0`.
fn bessel_f_operator() -> Operator {
    static OP: OnceLock<Operator> = OnceLock::new();
    OP.get_or_init(|| {
        let r = |cs: &[i64]| KRat::from_poly(p(cs));
        let inv_z = KRat::new(p(&[1]), p(&[0, 1])).expect("nonzero");
        let deriv = |v: &[KRat]| -> Vec<KRat> {
            let [a, b, c, d, e] = [&v[0], &v[1], &v[2], &v[3], &v[4]];
            let two = r(&[2]);
            vec![
                &a.derivative() - b,
                &(&b.derivative() + &(&two * a)) - &(&(&two * c) + &(b * &inv_z)),
                &(&c.derivative() + b) - &(&(&two * c) * &inv_z),
                &d.derivative() - e,
                &(&e.derivative() + d) - &(e * &inv_z),
            ]
        };
        let mut v = vec![r(&[1]), KRat::zero(), KRat::zero(), KRat::zero(), r(&[1, -1])];
        let mut cols = vec![v.clone()];
        for _ in 0..5 {
            v = deriv(&v);
            cols.push(v.clone());
        }
        let rows: Vec<Vec<KRat>> = (0..5).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let ker = kernel(rows, 6);
        let k = ker.first().expect("six vectors in a five-dimensional space");
        Operator::from_ratfuncs(Kind::Delta, k).primitive()
    })
    .clone()
}

/// Corpus E-function by name.
pub fn efunction(name: &str) -> Result<EFunction> {
    let e = match name {
        "exp" => EFunction {
            name: name.into(),
            series: PowerSeries::from_fn("exp", exp_coeff),
            annihilator: delta(vec![p(&[-1]), p(&[1])]),
            bound: fb(1, 1, "|a_n| = 1/n!"),
            closed_form: "e^z".into(),
        },
        "J0" => EFunction {
            name: name.into(),
            series: PowerSeries::from_fn("J0", j0_coeff),
            annihilator: delta(vec![p(&[0, 1]), p(&[1]), p(&[0, 1])]),
            bound: fb(1, 1, "binom(2k,k)/4^k <= 1 gives |a_n| <= 1/n!"),
            closed_form: "sum (-1)^n/(n!)^2 (z/2)^(2n)".into(),
        },
        "zm1exp" => EFunction {
            name: name.into(),
            series: PowerSeries::from_fn("zm1exp", zm1exp_coeff),
            annihilator: delta(vec![p(&[0, 1]), p(&[1, -1])]),
            bound: fb(1, 2, "|n - 1| <= 2^n"),
            closed_form: "(z-1)e^z".into(),
        },
        "bessel_f" => EFunction {
            name: name.into(),
            series: PowerSeries::from_fn("bessel_f", bessel_f_coeff),
            annihilator: bessel_f_operator(),
            bound: fb(2, 2, "J0^2 has |a_n| <= 2^n/n! and (z-1)J0' has |a_n| <= (n+1)/n! <= 2^n/n!"),
            closed_form: "J0^2 - (z-1)J0'".into(),
        },
        _ => return Err(Error::UnknownCorpusEntry(name.into())),
    };
    Ok(e)
}

/// Coefficients of `f` up to `n`.
pub fn efunction_series(name: &str, n: usize) -> Result<Vec<K>> {
    Ok(efunction(name)?.series.coeffs(n))
}

/// Differential operator of minimal order `<= max_order` and minimal
/// degree `<= max_degree` annihilating `f` modulo `z^n`, re-verified
/// modulo `z^(2n)`.
pub fn guess_delta_operator(f: &PowerSeries, max_order: usize, max_degree: usize, n: usize) -> Option<Operator> {
    let n2 = 2 * n;
    let mut bases = Vec::with_capacity(max_order + 1);
    let mut cur = f.clone();
    for _ in 0..=max_order {
        bases.push(cur.coeffs(n2));
        cur = cur.derivative();
    }
    for m in 0..=max_order {
        for d in 0..=max_degree {
            let unknowns = (m + 1) * (d + 1);
            if n < unknowns + SAFETY_MARGIN {
                return None;
            }
            let cols: Vec<(usize, usize)> = (0..=m).flat_map(|j| (0..=d).map(move |s| (j, s))).collect();
            let ker = series_kernel(&bases[..=m], &cols, n, n2);
            if let Some(v) = ker.first() {
                let coeffs = v.chunks(d + 1).map(|c| KPoly::new(c.to_vec())).collect();
                return Some(delta(coeffs).primitive());
            }
        }
    }
    None
}

/// Direct sum of companion systems for `(f_i, f_i', ...)`.
#[derive(Clone, Debug)]
pub struct ProlongationSystem {
    pub matrix: SystemMatrix,
    /// `(function index, derivative order)` for every coordinate.
    pub labels: Vec<(usize, usize)>,
    /// All entries lie in `Q[z, 1/z]`, so every nonzero point is regular.
    pub laurent: bool,
}

pub fn build_prolongation_system(funcs: &[EFunction]) -> Result<ProlongationSystem> {
    let mut blocks = Vec::with_capacity(funcs.len());
    let mut labels = Vec::new();
    for (i, f) in funcs.iter().enumerate() {
        let c = f.annihilator.companion()?;
        let names = (0..c.dim()).map(|j| format!("{}{}", f.name, "'".repeat(j))).collect();
        labels.extend((0..c.dim()).map(|j| (i, j)));
        blocks.push(SystemMatrix::new(Kind::Delta, c.entries().to_vec(), names)?);
    }
    let matrix = SystemMatrix::direct_sum(&blocks)?;
    let laurent = matrix.is_laurent();
    Ok(ProlongationSystem { matrix, labels, laurent })
}

/// Rational value of the coefficient as a check helper.
pub fn coeff_q(x: &K) -> Q {
    x.to_rational().expect("rational coefficient")
}
