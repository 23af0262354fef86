//! Dense exact linear algebra over a field.

use crate::field::Field;

/// Incrementally built reduced row echelon form with monic pivots.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    ncols: usize,
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.0).collect()
    }

    /// Reduces `row` by the current pivots.
    pub fn reduce(&self, mut row: Vec<F>) -> Vec<F> {
        for (p, r) in &self.rows {
            if row[*p].is_zero() {
                continue;
            }
            let c = row[*p].clone();
            for (x, y) in row.iter_mut().zip(r.iter()).skip(*p) {
                if !y.is_zero() {
                    *x = x.clone() - &(c.clone() * y);
                }
            }
        }
        row
    }

    /// Adds a row; returns whether it was independent of the previous ones.
    pub fn add_row(&mut self, row: Vec<F>) -> bool {
        assert_eq!(row.len(), self.ncols);
        let row = self.reduce(row);
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[p].inv().expect("nonzero pivot");
        let row: Vec<F> = row.into_iter().map(|x| x * &inv).collect();
        for (_, r) in self.rows.iter_mut() {
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            for (x, y) in r.iter_mut().zip(row.iter()).skip(p) {
                if !y.is_zero() {
                    *x = x.clone() - &(c.clone() * y);
                }
            }
        }
        let pos = self.rows.iter().position(|r| r.0 > p).unwrap_or(self.rows.len());
        self.rows.insert(pos, (p, row));
        true
    }

    pub fn contains(&self, row: &[F]) -> bool {
        self.reduce(row.to_vec()).iter().all(|x| x.is_zero())
    }

    /// Rows sorted by pivot column.
    pub fn rows(&self) -> Vec<Vec<F>> {
        self.rows.iter().map(|r| r.1.clone()).collect()
    }

    /// Basis of the right kernel, one vector per free column, in the
    /// canonical reduced form.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let piv: Vec<usize> = self.pivots();
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if piv.contains(&f) {
                continue;
            }
            let mut v = vec![F::zero(); self.ncols];
            v[f] = F::one();
            for (p, r) in &self.rows {
                if !r[f].is_zero() {
                    v[*p] = -r[f].clone();
                }
            }
            out.push(v);
        }
        out
    }
}

/// Right kernel of a matrix given by rows.
pub fn kernel<F: Field>(rows: impl IntoIterator<Item = Vec<F>>, ncols: usize) -> Vec<Vec<F>> {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.add_row(r);
        if e.is_full() {
            break;
        }
    }
    e.kernel()
}

/// Reduced echelon form (monic pivots) of the span of `vectors`; a
/// canonical basis of the span.
pub fn canonical_basis<F: Field>(vectors: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut e = Echelon::new(ncols);
    for v in vectors {
        e.add_row(v.clone());
    }
    e.rows()
}

pub fn mat_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![F::zero(); m]; n];
    for i in 0..n {
        for (l, brow) in b.iter().enumerate().take(k) {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !brow[j].is_zero() {
                    out[i][j] = out[i][j].clone() + &(a[i][l].clone() * &brow[j]);
                }
            }
        }
    }
    out
}

pub fn identity<F: Field>(n: usize) -> Vec<Vec<F>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect()
}

/// Determinant by Gaussian elimination.
pub fn det<F: Field>(m: &[Vec<F>]) -> F {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m.to_vec();
    let mut d = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return F::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let inv = a[c][c].inv().expect("nonzero pivot");
        d = d * &a[c][c];
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone() * &inv;
            for j in c..n {
                let t = f.clone() * &a[c][j];
                a[r][j] = a[r][j].clone() - &t;
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan elimination; `None` when singular.
pub fn inverse<F: Field>(m: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m.to_vec();
    let mut b = identity::<F>(n);
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        b.swap(p, c);
        let inv = a[c][c].inv()?;
        for j in 0..n {
            a[c][j] = a[c][j].clone() * &inv;
            b[c][j] = b[c][j].clone() * &inv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                let t = f.clone() * &a[c][j];
                a[r][j] = a[r][j].clone() - &t;
                let t = f.clone() * &b[c][j];
                b[r][j] = b[r][j].clone() - &t;
            }
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{qi, Q};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn kernel_of_rank_one() {
        let k = kernel(m(&[&[1, 2, 3], &[2, 4, 6]]), 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(&v[0] + &(qi(2) * &v[1]) + qi(3) * &v[2], qi(0));
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1], &[7, 4]]);
        assert_eq!(det(&a), qi(1));
        let i = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &i), identity::<Q>(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }
}
