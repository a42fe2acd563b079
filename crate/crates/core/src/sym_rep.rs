//! Symmetric matrices `B = S/d` under the split orthogonal group of `A₀`.
//!
//! `f_B(x) = (-1)^{n(n-1)/2} det(A₀x − B)` is monic of degree `n`. For odd
//! `n = 2g+1` the per-parity sign `(-1)^g` agrees with this, as does
//! `(-1)^{g+1}` for even `n = 2g+2`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::disc_class::WeakNormalForm;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::poly::{discriminant_rational, MonicPoly};
use crate::zpoly::{QPoly, ZPoly};

/// `B = S/d` with `S` an integer symmetric matrix and `d ∈ {1, 2, 4}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMatrixRep {
    n: usize,
    d: u32,
    s: Mat<BigInt>,
}

impl SymMatrixRep {
    pub fn new(d: u32, s: Mat<BigInt>) -> Result<Self> {
        if ![1, 2, 4].contains(&d) {
            return Err(Error::invalid("denominator must be 1, 2 or 4"));
        }
        let n = s.rows();
        if n != s.cols() || n == 0 {
            return Err(Error::shape("matrix must be square and nonempty"));
        }
        if (0..n).any(|i| (0..i).any(|j| s.get(i, j) != s.get(j, i))) {
            return Err(Error::shape("matrix must be symmetric"));
        }
        Ok(SymMatrixRep { n, d, s })
    }

    /// From a rational symmetric matrix whose denominators divide 4.
    pub fn from_rational(b: &Mat<BigRational>) -> Result<Self> {
        let den = b.data().iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let d = match u32::try_from(&den) {
            Ok(d @ (1 | 2 | 4)) => d,
            _ => return Err(Error::invalid("entry denominators must divide 4")),
        };
        let dq = BigRational::from_integer(den);
        Self::new(d, b.map(|x| (x * &dq).to_integer()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// The scaled integer matrix `S = d·B`.
    pub fn s(&self) -> &Mat<BigInt> {
        &self.s
    }

    /// `B` itself, entrywise rational.
    pub fn to_rational(&self) -> Mat<BigRational> {
        let d = BigInt::from(self.d);
        self.s.map(|x| BigRational::new(x.clone(), d.clone()))
    }

    /// Same matrix with denominator reduced as far as possible.
    pub fn normalized(&self) -> Self {
        Self::from_rational(&self.to_rational()).expect("denominator divides the original")
    }

    /// `f_B` as a dense polynomial over ℚ (ascending, monic).
    pub fn invariant_poly(&self) -> QPoly {
        let n = self.n;
        let d = BigInt::from(self.d);
        let m = Mat::from_fn(n, n, |i, j| {
            let lin = if i + j == n - 1 { d.clone() } else { BigInt::zero() };
            ZPoly::linear(lin, -self.s.get(i, j).clone())
        });
        let det = m.det();
        let mut scale = BigRational::new(BigInt::one(), num_traits::pow(d, n));
        if (n * (n - 1) / 2) % 2 == 1 {
            scale = -scale;
        }
        QPoly::new(det.coeffs().iter().map(|c| BigRational::from_integer(c.clone()) * &scale).collect())
    }

    /// `f_B` when all of its coefficients are integers.
    pub fn invariant_monic(&self) -> Option<MonicPoly> {
        MonicPoly::from_zpoly(&self.invariant_poly().to_integer()?).ok()
    }

    /// `Δ(f_B)`, exact.
    pub fn invariant_discriminant(&self) -> BigRational {
        let f = self.invariant_poly();
        let a: Vec<BigRational> = (0..self.n).rev().map(|k| f.coeff(k)).collect();
        discriminant_rational(&a)
    }

    /// Top-left zero block of `W₀`: `g×g` for `n = 2g+1`, `g×(g+1)` for `n = 2g+2`.
    pub fn in_w0(&self) -> bool {
        let (rows, cols) = w0_zero_block(self.n);
        (0..rows).all(|i| (0..cols).all(|j| self.s.get(i, j).is_zero()))
    }

    /// Entries `(i, j)` vanish for `i + j < n` (1-based).
    pub fn in_w00(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| i + j + 2 >= n || self.s.get(i, j).is_zero()))
    }

    /// `γ B γᵗ` for an integer matrix `γ`; the denominator is kept.
    pub fn congruence_act(&self, gamma: &Mat<BigInt>) -> Result<Self> {
        if gamma.rows() != self.n || gamma.cols() != self.n {
            return Err(Error::shape("γ must be n×n"));
        }
        let s = gamma.matmul(&self.s).matmul(&gamma.transpose());
        Ok(SymMatrixRep { n: self.n, d: self.d, s })
    }

    /// `B + p·P` for an integer symmetric perturbation `P`.
    pub fn perturb(&self, p: u64, pert: &Mat<BigInt>) -> Self {
        let k = BigInt::from(p) * BigInt::from(self.d);
        let s = Mat::from_fn(self.n, self.n, |i, j| self.s.get(i, j) + &k * pert.get(i, j));
        SymMatrixRep { n: self.n, d: self.d, s }
    }
}

/// Shape `(rows, cols)` of the zero block defining `W₀`.
pub fn w0_zero_block(n: usize) -> (usize, usize) {
    let g = (n - 1) / 2;
    if n % 2 == 1 {
        (g, g)
    } else {
        (g, g + 1)
    }
}

/// Upper-triangle positions `(i, j)`, `i <= j`, that are free in `W₀`.
pub fn w0_free_entries(n: usize) -> Vec<(usize, usize)> {
    let (rows, cols) = w0_zero_block(n);
    let zero = |i: usize, j: usize| (i < rows && j < cols) || (j < rows && i < cols);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if !zero(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// The anti-diagonal identity `A₀`.
pub fn a0(n: usize) -> SymMatrixRep {
    assert!(n >= 1, "dimension must be positive");
    let s = Mat::from_fn(n, n, |i, j| if i + j == n - 1 { BigInt::one() } else { BigInt::zero() });
    SymMatrixRep { n, d: 1, s }
}

/// `A₀` as a rational matrix.
pub fn a0_rational(n: usize) -> Mat<BigRational> {
    a0(n).to_rational()
}

/// `σ_m(f) = B_m(c) + ℓ·A₀`, a point of `W₀` with `f_{σ_m(f)} = f`.
///
/// With 1-based indices and `s = i + j`: the band `s = n` holds `m` in the
/// first row and column and `1` elsewhere; on the band `s = n + k` the entry
/// `-c_k` sits at the centre when `s` is even, or `-c_k/2` on the two middle
/// positions when `s` is odd. For even `n` the centre of band `n + 2` is
/// `c_1²/4 − c_2` instead.
pub fn sigma_m(nf: &WeakNormalForm) -> Result<SymMatrixRep> {
    let n = nf.degree();
    if n < 3 || nf.m == 0 {
        return Err(Error::invalid("σ_m needs degree at least 3 and m >= 1"));
    }
    let d: u32 = if n % 2 == 1 { 2 } else { 4 };
    let db = BigInt::from(d);
    let m = BigInt::from(nf.m);
    let mut s = Mat::from_fn(n, n, |_, _| BigInt::zero());
    // 0-based: band i + j = n - 2
    for i in 0..n - 1 {
        let j = n - 2 - i;
        let v = if i == 0 || j == 0 { m.clone() } else { BigInt::one() };
        s.set(i, j, v * &db);
    }
    for k in 1..=n {
        let band = n + k - 2; // 0-based i + j
        let c = &nf.c[k - 1];
        if band.is_multiple_of(2) {
            let mid = band / 2;
            let v = if n.is_multiple_of(2) && k == 2 {
                // d·(c₁²/4 − c₂) with d = 4
                &nf.c[0] * &nf.c[0] - c * 4
            } else {
                -(c * &db)
            };
            s.set(mid, mid, v);
        } else {
            let lo = band / 2;
            let v: BigInt = -(c * &db) / BigInt::from(2);
            s.set(lo, lo + 1, v.clone());
            s.set(lo + 1, lo, v);
        }
    }
    for i in 0..n {
        let j = n - 1 - i;
        let v = s.get(i, j) + &nf.l * &db;
        s.set(i, j, v);
    }
    SymMatrixRep::new(d, s)
}

/// `γ B γᵗ` over ℚ.
pub fn congruence_act_rational(gamma: &Mat<BigRational>, b: &Mat<BigRational>) -> Mat<BigRational> {
    gamma.matmul(b).matmul(&gamma.transpose())
}

/// `f_B` for a rational symmetric matrix.
pub fn invariant_poly_rational(b: &Mat<BigRational>) -> QPoly {
    let n = b.rows();
    let m = Mat::from_fn(n, n, |i, j| {
        let lin = if i + j == n - 1 { BigRational::one() } else { BigRational::zero() };
        QPoly::linear(lin, -b.get(i, j).clone())
    });
    let det = m.det();
    if (n * (n - 1) / 2) % 2 == 1 {
        -&det
    } else {
        det
    }
}

/// Whether `γ A₀ γᵗ = A₀`.
pub fn preserves_a0(gamma: &Mat<BigRational>) -> bool {
    let a = a0_rational(gamma.rows());
    congruence_act_rational(gamma, &a) == a
}

/// How a strong-divisibility check covered the perturbation classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMethod {
    /// Every class `P mod p` was evaluated.
    Exhaustive,
    /// `Δ(B + pP) ≡ Δ(B) + p·L(P) (mod p²)` with `L` linear over F_p, so `P = 0`
    /// and the unit perturbations decide every class.
    Linearized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbationCheck {
    pub method: CoverageMethod,
    pub evaluations: u128,
    pub failures: u128,
}

/// Check `p² | Δ(f_{B + pP})` for every `P ∈ W₀(ℤ)` mod `p`, for odd `p`.
///
/// Enumerates all `p^dim` classes when that fits in `budget`, and otherwise
/// uses the linearized certificate.
pub fn check_image_strong_divisibility(b: &SymMatrixRep, p: u64, budget: u128) -> Result<PerturbationCheck> {
    crate::arith::require_prime(p)?;
    if p == 2 || b.d().is_multiple_of(p as u32) {
        return Err(Error::invalid("perturbation check needs an odd prime coprime to d"));
    }
    let free = w0_free_entries(b.n());
    let dim = free.len() as u32;
    let classes = (p as u128).checked_pow(dim);
    let divisible = |pert: &Mat<BigInt>| disc_divisible_by_p2(&b.perturb(p, pert), p);
    let zero = Mat::from_fn(b.n(), b.n(), |_, _| BigInt::zero());
    match classes {
        Some(c) if c <= budget => {
            let mut digits = alloc::vec![0u64; free.len()];
            let mut failures = 0;
            loop {
                let mut pert = zero.clone();
                for (&(i, j), &v) in free.iter().zip(&digits) {
                    pert.set(i, j, BigInt::from(v));
                    pert.set(j, i, BigInt::from(v));
                }
                if !divisible(&pert) {
                    failures += 1;
                }
                let mut k = 0;
                while k < digits.len() {
                    digits[k] += 1;
                    if digits[k] < p {
                        break;
                    }
                    digits[k] = 0;
                    k += 1;
                }
                if k == digits.len() {
                    break;
                }
            }
            Ok(PerturbationCheck { method: CoverageMethod::Exhaustive, evaluations: c, failures })
        }
        _ => {
            let mut failures = u128::from(!divisible(&zero));
            for &(i, j) in &free {
                let mut pert = zero.clone();
                pert.set(i, j, BigInt::one());
                pert.set(j, i, BigInt::one());
                if !divisible(&pert) {
                    failures += 1;
                }
            }
            Ok(PerturbationCheck { method: CoverageMethod::Linearized, evaluations: dim as u128 + 1, failures })
        }
    }
}

/// Whether the numerator of `Δ(f_B)` is divisible by `p²` (the denominator is
/// a power of `d`, prime to `p`).
pub fn disc_divisible_by_p2(b: &SymMatrixRep, p: u64) -> bool {
    let disc = b.invariant_discriminant();
    let p2 = BigInt::from(p) * BigInt::from(p);
    disc.numer().abs().is_multiple_of(&p2)
}
