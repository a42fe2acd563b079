//! Small dense matrices and fraction-free (Bareiss) determinants.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::zpoly::{Coeff, Poly};

/// Integral domains in which Bareiss elimination can run: every division it
/// performs is exact.
pub trait ExactRing: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div_exact(&self, other: &Self) -> Self;
}

macro_rules! scalar_ring {
    ($t:ty) => {
        impl ExactRing for $t {
            fn zero() -> Self {
                <$t as Zero>::zero()
            }
            fn one() -> Self {
                <$t as One>::one()
            }
            fn is_zero(&self) -> bool {
                Zero::is_zero(self)
            }
            fn add(&self, other: &Self) -> Self {
                self + other
            }
            fn mul(&self, other: &Self) -> Self {
                self * other
            }
            fn sub(&self, other: &Self) -> Self {
                self - other
            }
            fn neg(&self) -> Self {
                -self
            }
            fn div_exact(&self, other: &Self) -> Self {
                Coeff::div_exact(self, other).expect("Bareiss division is exact")
            }
        }
    };
}

scalar_ring!(BigInt);
scalar_ring!(BigRational);

impl<T: Coeff> ExactRing for Poly<T> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::constant(T::one())
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Self {
        Poly::div_exact(self, other).expect("Bareiss division is exact")
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: ExactRing> Mat<T> {
    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        Mat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        })
    }

    pub fn det(&self) -> T {
        bareiss_det(self)
    }
}

/// Determinant by fraction-free Gaussian elimination with row pivoting.
pub fn bareiss_det<T: ExactRing>(m: &Mat<T>) -> T {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return T::one();
    }
    let mut a: Vec<Vec<T>> = (0..n).map(|i| m.data[i * n..(i + 1) * n].to_vec()).collect();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

/// Checked i128 Bareiss determinant; `None` on overflow.
pub fn bareiss_det_i128(m: &[i128], n: usize) -> Option<i128> {
    if n == 0 {
        return Some(1);
    }
    let mut a = m.to_vec();
    let mut negate = false;
    let mut prev: i128 = 1;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let r = (k + 1..n).find(|&r| a[r * n + k] != 0)?;
            for j in 0..n {
                a.swap(k * n + j, r * n + j);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[k * n + k]
                    .checked_mul(a[i * n + j])?
                    .checked_sub(a[i * n + k].checked_mul(a[k * n + j])?)?;
                a[i * n + j] = t / prev;
            }
        }
        prev = a[k * n + k];
    }
    let d = a[n * n - 1];
    Some(if negate { -d } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn big(rows: &[&[i64]]) -> Mat<BigInt> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    #[test]
    fn small_determinants() {
        assert_eq!(big(&[&[2, 0], &[0, 3]]).det(), BigInt::from(6));
        assert_eq!(big(&[&[0, 1], &[1, 0]]).det(), BigInt::from(-1));
        assert_eq!(big(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).det(), BigInt::from(-3));
        assert_eq!(big(&[&[1, 2], &[2, 4]]).det(), BigInt::from(0));
    }

    #[test]
    fn i128_route_agrees() {
        let rows: &[&[i64]] = &[&[0, 3, 1, 4], &[1, 0, 5, 9], &[2, 6, 0, 5], &[3, 5, 8, 0]];
        let flat: Vec<i128> = rows.iter().flat_map(|r| r.iter().map(|&x| x as i128)).collect();
        assert_eq!(BigInt::from(bareiss_det_i128(&flat, 4).unwrap()), big(rows).det());
    }

    #[test]
    fn polynomial_matrix() {
        // det [[x, 1], [1, x]] = x^2 - 1
        let x = Poly::<BigInt>::linear(BigInt::from(1), BigInt::from(0));
        let one = Poly::constant(BigInt::from(1));
        let m = Mat::from_rows(vec![vec![x.clone(), one.clone()], vec![one, x]]);
        assert_eq!(m.det(), Poly::new(vec![BigInt::from(-1), BigInt::from(0), BigInt::from(1)]));
    }
}
