//! Fourier-Laplace correspondence between annihilators of
//! `sum a_n z^n / n!` and of `sum a_n z^n`, computed on the Euler operator
//! `theta = z delta`.

use num_traits::{One, Zero};

use super::{Kind, Operator};
use crate::error::{Error, Result};
use crate::field::{NfElem, Ring};
use crate::poly::{KPoly, Poly};

type K = NfElem;
/// Polynomial in `z` with coefficients polynomials in `theta`: entry `i` is
/// the `theta`-polynomial multiplying `z^i` on the left.
type EulerForm = Vec<Poly<K>>;

/// `z^m L` written as `sum_i z^i P_i(theta)` where `m` is the order.
fn to_euler(l: &Operator) -> EulerForm {
    let m = l.order().unwrap();
    let mut out: EulerForm = Vec::new();
    for (k, a) in l.coeffs().iter().enumerate() {
        // z^m a(z) delta^k = a(z) z^(m-k) theta (theta-1) ... (theta-k+1)
        let ff = falling_theta(k);
        for (j, c) in a.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let i = j + m - k;
            if out.len() <= i {
                out.resize(i + 1, Poly::zero());
            }
            out[i] = &out[i] + &ff.scale(c);
        }
    }
    // z^a P(theta) annihilates f iff P(theta) does
    let lead = out.iter().take_while(|p| p.is_zero()).count();
    out.drain(..lead);
    out
}

fn falling_theta(k: usize) -> Poly<K> {
    let mut f = Poly::one();
    for j in 0..k as i64 {
        f = &f * &Poly::new(vec![K::from_i64(-j), K::one()]);
    }
    f
}

fn rising_from(shift: i64, k: usize) -> Poly<K> {
    // (theta + shift) (theta + shift + 1) ... , k factors
    let mut f = Poly::one();
    for j in 0..k as i64 {
        f = &f * &Poly::new(vec![K::from_i64(shift + j), K::one()]);
    }
    f
}

/// Converts `sum_i z^i P_i(theta)` back to a delta-operator using
/// `theta^n = sum_j S(n, j) z^j delta^j`.
fn from_euler(e: &EulerForm) -> Operator {
    let mut coeffs: Vec<KPoly> = Vec::new();
    for (i, p) in e.iter().enumerate() {
        for (n, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, s) in stirling2_row(n).into_iter().enumerate() {
                if s == 0 {
                    continue;
                }
                if coeffs.len() <= j {
                    coeffs.resize(j + 1, KPoly::zero());
                }
                let t = KPoly::monomial(c.clone() * &K::from_i64(s), i + j);
                coeffs[j] = &coeffs[j] + &t;
            }
        }
    }
    strip_z_content(Operator::new(Kind::Delta, coeffs))
}

fn stirling2_row(n: usize) -> Vec<i64> {
    let mut row = vec![1i64];
    for m in 1..=n {
        let mut next = vec![0i64; m + 1];
        for j in 1..=m {
            let a = if j < row.len() { row[j] } else { 0 };
            let b = row[j - 1];
            next[j] = j as i64 * a + b;
        }
        row = next;
    }
    row
}

/// Removes the largest power of `z` dividing all coefficients.
fn strip_z_content(l: Operator) -> Operator {
    let v = l.coeffs().iter().filter_map(|c| c.valuation()).min().unwrap_or(0);
    if v == 0 {
        return l;
    }
    Operator::new(Kind::Delta, l.coeffs().iter().map(|c| c.unshift(v)).collect())
}

/// Given `L` annihilating `sum a_n z^n / n!`, returns an operator
/// annihilating `sum a_n z^n`.
pub fn fourier_laplace(l: &Operator) -> Result<Operator> {
    if l.kind() != Kind::Delta {
        return Err(Error::KindMismatch);
    }
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let e = to_euler(&Operator::new(Kind::Delta, l.coeffs().to_vec()));
    // coefficient of z^N: sum_i P_i(N-i) a_{N-i} / (N-i)! = 0; multiply by N!
    let out: EulerForm = e.iter().enumerate().map(|(i, p)| p * &rising_from(1, i)).collect();
    Ok(from_euler(&out))
}

/// Given `L` annihilating `sum a_n z^n`, returns an operator annihilating
/// `sum a_n z^n / n!`.
pub fn inverse_fourier_laplace(l: &Operator) -> Result<Operator> {
    if l.kind() != Kind::Delta {
        return Err(Error::KindMismatch);
    }
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let e = to_euler(&Operator::new(Kind::Delta, l.coeffs().to_vec()));
    let m = e.len() - 1;
    // divide the coefficient equations by (N-m)!
    let out: EulerForm = e.iter().enumerate().map(|(i, p)| p * &falling_theta(m - i)).collect();
    Ok(from_euler(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{qi, qr};
    use crate::ore::PowerSeries;

    fn k(q: crate::field::Q) -> K {
        K::Rational(q)
    }

    #[test]
    fn exponential_to_geometric() {
        let l = Operator::new(Kind::Delta, vec![KPoly::from_i64s(&[-1]), KPoly::one()]);
        let g = fourier_laplace(&l).unwrap();
        assert_eq!(g, Operator::new(Kind::Delta, vec![KPoly::from_i64s(&[-1]), KPoly::from_i64s(&[1, -1])]));
        let geo = PowerSeries::from_fn("1/(1-z)", |_| K::one());
        assert!(g.apply(&geo, 200).unwrap().iter().all(|c| c.is_zero()));
        let back = inverse_fourier_laplace(&g).unwrap();
        let (_, r) = back.right_divide(&l).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn bessel_to_algebraic() {
        let l = Operator::new(Kind::Delta, vec![KPoly::from_i64s(&[0, 1]), KPoly::one(), KPoly::from_i64s(&[0, 1])]);
        let g = fourier_laplace(&l).unwrap();
        // sum (-1)^n C(2n, n) (z/2)^(2n) = (1 + z^2)^(-1/2)
        let s = PowerSeries::from_fn("(1+z^2)^(-1/2)", |n| {
            if n % 2 == 1 {
                return k(qi(0));
            }
            let m = n / 2;
            let mut c = qi(1);
            for j in 0..m {
                c = c * qi((2 * m - j) as i64) / qi((j + 1) as i64);
            }
            let sign = if m % 2 == 0 { 1 } else { -1 };
            k(c * qr(sign, 1) / qi(4).pow(m as i32))
        });
        assert!(g.apply(&s, 200).unwrap().iter().all(|c| c.is_zero()));
        let expected = Operator::new(
            Kind::Delta,
            vec![KPoly::from_i64s(&[0, 2]), KPoly::from_i64s(&[1, 0, 4]), KPoly::from_i64s(&[0, 1, 0, 1])],
        );
        assert_eq!(g.primitive(), expected);
    }
}
