//! Polynomials with coefficients in ℤ/qℤ, and squarefree decomposition over F_p.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{addmod, invmod, mulmod, require_prime, submod};
use crate::error::{Error, Result};

/// Dense polynomial mod `q`, ascending coefficients in `[0, q)`, trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModPoly {
    q: u64,
    coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(q: u64, mut coeffs: Vec<u64>) -> Self {
        assert!(q >= 2, "modulus must be at least 2");
        for c in coeffs.iter_mut() {
            *c %= q;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { q, coeffs }
    }

    pub fn zero(q: u64) -> Self {
        ModPoly::new(q, Vec::new())
    }

    pub fn one(q: u64) -> Self {
        ModPoly::new(q, vec![1])
    }

    /// The monomial `x - r`.
    pub fn x_minus(q: u64, r: u64) -> Self {
        ModPoly::new(q, vec![submod(0, r % q, q), 1])
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        ModPoly::new(self.q, (0..n).map(|k| addmod(self.coeff(k), other.coeff(k), self.q)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        ModPoly::new(self.q, (0..n).map(|k| submod(self.coeff(k), other.coeff(k), self.q)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return ModPoly::zero(self.q);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = addmod(out[i + j], mulmod(a, b, self.q), self.q);
            }
        }
        ModPoly::new(self.q, out)
    }

    pub fn scale(&self, s: u64) -> Self {
        ModPoly::new(self.q, self.coeffs.iter().map(|&c| mulmod(c, s % self.q, self.q)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = ModPoly::one(self.q);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        ModPoly::new(
            self.q,
            self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| mulmod(c, k as u64 % self.q, self.q)).collect(),
        )
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| addmod(mulmod(acc, x, self.q), c, self.q))
    }

    /// Quotient and remainder; the divisor's leading coefficient must be a unit.
    pub fn div_rem(&self, other: &Self) -> (Self, Self) {
        let dl = other.coeffs.len();
        assert!(dl > 0, "division by zero polynomial");
        let inv = invmod(other.leading(), self.q).expect("leading coefficient must be a unit");
        let mut rem = self.coeffs.clone();
        if rem.len() < dl {
            return (ModPoly::zero(self.q), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - dl + 1];
        for k in (0..quot.len()).rev() {
            let t = mulmod(rem[k + dl - 1], inv, self.q);
            if t == 0 {
                continue;
            }
            for (j, &c) in other.coeffs.iter().enumerate() {
                rem[k + j] = submod(rem[k + j], mulmod(t, c, self.q), self.q);
            }
            quot[k] = t;
        }
        (ModPoly::new(self.q, quot), ModPoly::new(self.q, rem))
    }

    pub fn rem(&self, other: &Self) -> Self {
        self.div_rem(other).1
    }

    /// Monic scalar multiple (zero stays zero).
    pub fn monic(&self) -> Self {
        match invmod(self.leading(), self.q) {
            Some(inv) if !self.is_zero() => self.scale(inv),
            _ => self.clone(),
        }
    }

    /// Monic gcd; meaningful for prime moduli.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Exact quotient, or `None` if the remainder is nonzero.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(other);
        r.is_zero().then_some(q)
    }

    /// Reduce a polynomial mod `q` further to a divisor `r` of `q`.
    pub fn reduce(&self, r: u64) -> Self {
        assert!(self.q.is_multiple_of(r), "target modulus must divide the current one");
        ModPoly::new(r, self.coeffs.clone())
    }

    /// For prime `p`: the `h` with `h^p = self`, assuming only exponents
    /// divisible by `p` occur (true whenever the derivative vanishes).
    fn pth_root(&self) -> Self {
        let p = self.q as usize;
        ModPoly::new(self.q, self.coeffs.iter().step_by(p).copied().collect())
    }

    /// Squarefree decomposition over F_p of a monic polynomial.
    pub fn sqf_decompose(&self) -> Result<SqfDecomposition> {
        require_prime(self.q)?;
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut factors = Vec::new();
        sqf_rec(&self.monic(), 1, &mut factors);
        factors.sort_by(|a: &(ModPoly, u32), b| a.1.cmp(&b.1).then_with(|| a.0.coeffs.cmp(&b.0.coeffs)));
        Ok(SqfDecomposition { p: self.q, factors })
    }
}

fn sqf_rec(f: &ModPoly, mult: u32, out: &mut Vec<(ModPoly, u32)>) {
    if f.degree().unwrap_or(0) == 0 {
        return;
    }
    let p = f.q as u32;
    let df = f.derivative();
    if df.is_zero() {
        sqf_rec(&f.pth_root(), mult * p, out);
        return;
    }
    let mut c = f.gcd(&df);
    let mut w = f.div_exact(&c).expect("gcd divides f");
    let mut i = 1u32;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y).expect("gcd divides w");
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac, i * mult));
        }
        c = c.div_exact(&y).expect("gcd divides c");
        w = y;
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        sqf_rec(&c.pth_root(), mult * p, out);
    }
}

/// Squarefree decomposition of `f mod p`.
pub fn sqf_decompose_mod_p(f: &crate::poly::MonicPoly, p: u64) -> Result<SqfDecomposition> {
    require_prime(p)?;
    f.reduce_mod(p).sqf_decompose()
}

/// `∏ factor^mult` over F_p, factors squarefree and pairwise coprime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqfDecomposition {
    pub p: u64,
    pub factors: Vec<(ModPoly, u32)>,
}

impl SqfDecomposition {
    /// Product of the distinct squarefree parts (the radical).
    pub fn radical(&self) -> ModPoly {
        self.factors.iter().fold(ModPoly::one(self.p), |acc, (g, _)| acc.mul(g))
    }

    pub fn product(&self) -> ModPoly {
        self.factors.iter().fold(ModPoly::one(self.p), |acc, (g, e)| acc.mul(&g.pow(*e)))
    }

    /// Whether some factor occurs with multiplicity at least 2.
    pub fn has_repeated_factor(&self) -> bool {
        self.factors.iter().any(|(_, e)| *e >= 2)
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}*x")?,
                (_, 1) => write!(f, "x^{k}")?,
                _ => write!(f, "{c}*x^{k}")?,
            }
        }
        Ok(())
    }
}
