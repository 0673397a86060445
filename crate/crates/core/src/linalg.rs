//! Dense linear algebra over any [`Scalar`], plus Hermite normal forms over the
//! integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.rows {
            list.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        list.finish()
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + t;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (i, x)| acc + x.clone() * self[(i, j)].clone())
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let best = (r..m.rows)
                .map(|i| (i, m[(i, c)].pivot_weight()))
                .filter(|(i, w)| *w > 0.0 && !m[(*i, c)].is_negligible())
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let Some((p, _)) = best else { continue };
            m.swap_rows(r, p);
            let inv = T::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let t = f.clone() * m[(r, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let best = (c..n)
                .map(|i| (i, m[(i, c)].pivot_weight()))
                .filter(|(i, w)| *w > 0.0 && !m[(*i, c)].is_zero())
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let Some((p, _)) = best else { return T::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() / piv.clone();
                for j in c..n {
                    let t = f.clone() * m[(c, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = T::one();
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Solves `self * x = b`; `None` when inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, piv) = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (i, &c) in piv.iter().enumerate() {
            x[c] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    /// Basis of the right kernel `{x : self * x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (i, &c) in piv.iter().enumerate() {
                    v[c] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Hermite normal form of the row lattice spanned by `gens` (each of length `n`).
///
/// Output rows are upper triangular with a positive pivot on the diagonal of
/// each non-zero row, and entries above a pivot reduced into `[0, pivot)`.
/// Zero rows are dropped, so a full-rank input yields an `n × n` matrix.
pub fn hnf<I>(gens: &[Vec<I>], n: usize) -> Vec<Vec<I>>
where
    I: Integer + Signed + Clone,
{
    let mut rows: Vec<Vec<I>> = gens.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out: Vec<Vec<I>> = Vec::new();
    let mut pivot_cols = Vec::new();
    for c in 0..n {
        // gcd-combine every remaining row into one with a pivot in column c
        let mut pivot: Option<Vec<I>> = None;
        let mut rest = Vec::with_capacity(rows.len());
        for r in rows.drain(..) {
            if r[c].is_zero() {
                rest.push(r);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(r),
                Some(p) => {
                    let (p2, r2) = combine(p, r, c);
                    pivot = Some(p2);
                    if r2.iter().any(|x| !x.is_zero()) {
                        rest.push(r2);
                    }
                }
            }
        }
        rows = rest;
        if let Some(mut p) = pivot {
            if p[c].is_negative() {
                for x in p.iter_mut() {
                    *x = -x.clone();
                }
            }
            out.push(p);
            pivot_cols.push(c);
        }
    }
    // reduce above the pivots
    for k in 0..out.len() {
        let c = pivot_cols[k];
        let piv = out[k][c].clone();
        for i in 0..k {
            let q = out[i][c].div_floor(&piv);
            if !q.is_zero() {
                for j in c..n {
                    let t = q.clone() * out[k][j].clone();
                    out[i][j] = out[i][j].clone() - t;
                }
            }
        }
    }
    // For full rank the rows are square-upper-triangular; otherwise keep echelon rows.
    out
}

/// Euclid on two rows in column `c`: returns (row with gcd in `c`, row with 0 in `c`).
fn combine<I: Integer + Signed + Clone>(mut a: Vec<I>, mut b: Vec<I>, c: usize) -> (Vec<I>, Vec<I>) {
    while !b[c].is_zero() {
        let q = a[c].div_floor(&b[c]);
        for j in 0..a.len() {
            let t = q.clone() * b[j].clone();
            a[j] = a[j].clone() - t;
        }
        std::mem::swap(&mut a, &mut b);
    }
    (a, b)
}

/// Exact integer determinant by fraction-free (Bareiss) elimination.
pub fn det_bigint(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use crate::Rational;

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect())
    }

    #[test]
    fn exact_inverse_and_det() {
        let m = qm(&[&[2, 1], &[1, 3]]);
        assert_eq!(m.det(), rat_int(5));
        let inv = m.inverse().unwrap();
        assert_eq!(inv[(0, 0)], rat(3, 5));
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert!(qm(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn kernel_and_solve() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x == &rat_int(0)));
        }
        let x = qm(&[&[1, 1], &[1, -1]]).solve(&[rat_int(3), rat_int(1)]).unwrap();
        assert_eq!(x, vec![rat_int(2), rat_int(1)]);
        assert!(qm(&[&[1, 1], &[1, 1]]).solve(&[rat_int(1), rat_int(2)]).is_none());
    }

    #[test]
    fn float_det_matches() {
        let m = Matrix::from_rows(vec![vec![4.0_f64, 1.0], vec![2.0, 3.0]]);
        assert!((m.det() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf(&[vec![2i64, 4], vec![6, 3]], 2);
        let b = hnf(&[vec![6i64, 3], vec![8, 7], vec![2, 4]], 2);
        assert_eq!(a, vec![vec![2, 4], vec![0, 9]]);
        assert_eq!(b, a);
        let big = hnf(&[vec![BigInt::from(3), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(5)]], 2);
        assert_eq!(big[1][1], BigInt::from(5));
    }

    #[test]
    fn bareiss_det() {
        let m: Vec<Vec<BigInt>> = [[2, 0, 1], [1, 3, 2], [1, 1, 2]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        assert_eq!(det_bigint(&m), BigInt::from(6));
    }
}
