//! The Q-invariant of a pencil `(A, B)` of `g×(g+1)` matrices.
//!
//! The `g+1` signed maximal minors of `Ax − By` are binary forms of degree
//! `g`; `Q` is the determinant of their `(g+1)×(g+1)` coefficient matrix.
//! Rows follow the minor index, columns the monomials `x^g, x^{g-1}y, …, y^g`,
//! and the minor with column `i` (0-based) removed carries the sign `(-1)^i`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::sym_rep::{a0_rational, preserves_a0, SymMatrixRep};
use crate::zpoly::QPoly;

/// A point `(A, B)` of `2⊗g⊗(g+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QInput {
    g: usize,
    a: Mat<BigRational>,
    b: Mat<BigRational>,
}

impl QInput {
    pub fn new(a: Mat<BigRational>, b: Mat<BigRational>) -> Result<Self> {
        let g = a.rows();
        if g == 0 || a.cols() != g + 1 || b.rows() != g || b.cols() != g + 1 {
            return Err(Error::shape("A and B must both be g×(g+1) with g >= 1"));
        }
        Ok(QInput { g, a, b })
    }

    pub fn from_integers(a: &Mat<BigInt>, b: &Mat<BigInt>) -> Result<Self> {
        let lift = |m: &Mat<BigInt>| m.map(|x| BigRational::from_integer(x.clone()));
        Self::new(lift(a), lift(b))
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn a(&self) -> &Mat<BigRational> {
        &self.a
    }

    pub fn b(&self) -> &Mat<BigRational> {
        &self.b
    }

    /// Signed minors, each as coefficients of `x^g, x^{g-1}y, …, y^g`.
    pub fn minor_vector(&self) -> Vec<Vec<BigRational>> {
        let g = self.g;
        // dehomogenize at y = 1: entries a·t − b
        let pencil = Mat::from_fn(g, g + 1, |i, j| QPoly::linear(self.a.get(i, j).clone(), -self.b.get(i, j).clone()));
        let rows: Vec<usize> = (0..g).collect();
        (0..=g)
            .map(|i| {
                let cols: Vec<usize> = (0..=g).filter(|&j| j != i).collect();
                let mut det = pencil.submatrix(&rows, &cols).det();
                if i % 2 == 1 {
                    det = -&det;
                }
                (0..=g).map(|k| det.coeff(g - k)).collect()
            })
            .collect()
    }

    /// `Q(A, B)`, exact.
    pub fn q(&self) -> BigRational {
        Mat::from_rows(self.minor_vector()).det()
    }
}

/// The `g×(g+1)` top-right block used to evaluate `Q` on `W₀`.
fn top_block(m: &Mat<BigRational>) -> Mat<BigRational> {
    let n = m.rows();
    let g = (n - 1) / 2;
    let first = if n % 2 == 1 { g } else { g + 1 };
    let rows: Vec<usize> = (0..g).collect();
    let cols: Vec<usize> = (first..n).collect();
    m.submatrix(&rows, &cols)
}

fn w0_rational(b: &Mat<BigRational>) -> bool {
    let n = b.rows();
    let (rows, cols) = crate::sym_rep::w0_zero_block(n);
    (0..rows).all(|i| (0..cols).all(|j| b.get(i, j).is_zero()))
}

/// `Q(B) = Q(A₀^top, B^top)` for a rational symmetric `B ∈ W₀`, `n >= 3`.
pub fn q_of_w0_rational(b: &Mat<BigRational>) -> Result<BigRational> {
    let n = b.rows();
    if n < 3 || b.cols() != n {
        return Err(Error::shape("Q on W₀ needs a square matrix with n >= 3"));
    }
    if !w0_rational(b) {
        return Err(Error::NotInW0);
    }
    QInput::new(top_block(&a0_rational(n)), top_block(b)).map(|q| q.q())
}

/// `Q(B)` for `B ∈ W₀`, computed on `S` and divided by `d^{g(g+1)/2}`.
pub fn q_of_w0(b: &SymMatrixRep) -> Result<BigRational> {
    let n = b.n();
    if n < 3 {
        return Err(Error::shape("Q on W₀ needs n >= 3"));
    }
    if !b.in_w0() {
        return Err(Error::NotInW0);
    }
    let s = b.s().map(|x| BigRational::from_integer(x.clone()));
    let q = QInput::new(top_block(&a0_rational(n)), top_block(&s))?.q();
    let g = (n - 1) / 2;
    let den = num_traits::pow(BigInt::from(b.d()), g * (g + 1) / 2);
    Ok(q / BigRational::from_integer(den))
}

/// `Δ(f_B) / Q(B)²`.
pub fn disc_over_q2(b: &SymMatrixRep) -> Result<BigRational> {
    let q = q_of_w0(b)?;
    if q.is_zero() {
        return Err(Error::QZero);
    }
    Ok(b.invariant_discriminant() / (&q * &q))
}

/// The factor `det(γ₁)^{g+1} det(γ₂)^g` by which `Q` changes under `γ`,
/// where `γ₁` is the top-left `g×g` block and `γ₂` the block on the columns
/// of `B^top`.
pub fn relative_factor(gamma: &Mat<BigRational>) -> Result<BigRational> {
    let n = gamma.rows();
    if n < 3 || gamma.cols() != n {
        return Err(Error::shape("γ must be square with n >= 3"));
    }
    let g = (n - 1) / 2;
    let first = if n % 2 == 1 { g } else { g + 1 };
    if (0..g).any(|i| (g..n).any(|j| !gamma.get(i, j).is_zero())) {
        return Err(Error::shape("γ must be block lower triangular"));
    }
    if !preserves_a0(gamma) {
        return Err(Error::shape("γ must preserve A₀"));
    }
    let top: Vec<usize> = (0..g).collect();
    let tail: Vec<usize> = (first..n).collect();
    let d1 = gamma.submatrix(&top, &top).det();
    let d2 = gamma.submatrix(&tail, &tail).det();
    Ok(pow_q(&d1, g + 1) * pow_q(&d2, g))
}

fn pow_q(x: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// Whether `Q(γBγᵗ) = det(γ₁)^{g+1} det(γ₂)^g · Q(B)` holds exactly. For odd
/// `n` the factor reduces to `det(γ₁)` on the group, and for even `n` to
/// `det(γ₁) α^{-g}` on the torus.
pub fn check_relative_invariance(b: &Mat<BigRational>, gamma: &Mat<BigRational>) -> Result<bool> {
    if gamma.rows() != b.rows() {
        return Err(Error::shape("γ and B must have the same size"));
    }
    let factor = relative_factor(gamma)?;
    let moved = crate::sym_rep::congruence_act_rational(gamma, b);
    Ok(q_of_w0_rational(&moved)? == factor * q_of_w0_rational(b)?)
}
