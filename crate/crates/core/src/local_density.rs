//! Local densities `λ_n(p)` and `ρ_n(p)`, their Euler products, Dedekind's
//! criterion, and exhaustive mod-`p²` oracles for both densities.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{self, primes_up_to, require_prime};
use crate::error::{Error, Result};
use crate::modpoly::ModPoly;
use crate::poly::{discriminant_i128, MonicPoly};

/// Default ceiling on the number of residue tuples a sweep may visit.
pub const SWEEP_BUDGET: u128 = 100_000_000;

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `λ_n(p)`: density of monic `f` over `ℤ_p` with `p² ∤ Δ(f)`.
pub fn lambda_np(n: usize, p: u64) -> Result<BigRational> {
    require_prime(p)?;
    if n == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    if n == 1 {
        return Ok(BigRational::one());
    }
    if p == 2 {
        return Ok(q(1, 2));
    }
    let pq = BigRational::from_integer(BigInt::from(p));
    let one = BigRational::one();
    let inv = &one / &pq;
    Ok(match n {
        2 => &one - &inv * &inv,
        3 => &one - &inv * &inv * BigRational::from_integer(2.into()) + &inv * &inv * &inv,
        _ => {
            // (-p)^{2-n} = (-1/p)^{n-2}
            let t = num_traits::pow(-inv.clone(), n - 2);
            let pm1 = &pq - &one;
            &one - &inv + &pm1 * &pm1 * (&one - t) / (&pq * &pq * (&pq + &one))
        }
    })
}

/// `ρ_n(p) = 1 − 1/p²`: density of `p`-maximal monic `f` over `ℤ_p`, `n >= 2`.
pub fn rho_np(n: usize, p: u64) -> Result<BigRational> {
    require_prime(p)?;
    if n < 2 {
        return Err(Error::invalid("degree must be at least 2"));
    }
    Ok(BigRational::one() - q(1, (p * p) as i64))
}

/// The `n → ∞` factor of `λ_n(p)`: `1 − 1/p + (p−1)²/(p²(p+1))`, and `1/2` at `p = 2`.
pub fn lambda_limit_factor(p: u64) -> f64 {
    if p == 2 {
        return 0.5;
    }
    let p = p as f64;
    1.0 - 1.0 / p + (p - 1.0) * (p - 1.0) / (p * p * (p + 1.0))
}

/// A truncated Euler product with an upper bound on its distance to the full product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    pub value: f64,
    pub bound: u64,
    /// `|∏_{p ≤ P} − ∏_p| <= tail`.
    pub tail: f64,
}

/// `∏_{p ≤ P} c_p` where `1 − c_p ≤ k/p²` for `p > P`; the tail uses
/// `∑_{p>P} k/p² < k/P`.
fn truncated_product(bound: u64, k: f64, factor: impl Fn(u64) -> f64) -> Truncated {
    let value: f64 = primes_up_to(bound).into_iter().map(factor).product();
    let tail = value * k / bound.max(1) as f64;
    Truncated { value, bound, tail }
}

/// `λ = lim λ_n ≈ 0.307056` (with `λ_n(2) = 1/2`), truncated at `P`.
pub fn lambda_limit_truncated(bound: u64) -> Truncated {
    truncated_product(bound, 3.0, lambda_limit_factor)
}

/// `∏_p (1 − 1/p + (p−1)²/(p²(p+1)))` with the odd-prime expression also used
/// at `p = 2` (factor `7/12`), truncated at `P`. Tends to `≈ 0.358232`, which
/// is `7/6` times [`lambda_limit_truncated`].
pub fn lambda_limit_uniform_truncated(bound: u64) -> Truncated {
    truncated_product(bound, 3.0, |p| if p == 2 { 7.0 / 12.0 } else { lambda_limit_factor(p) })
}

/// `λ_n = ∏_p λ_n(p)`, truncated at `P`.
pub fn lambda_n_truncated(n: usize, bound: u64) -> Truncated {
    truncated_product(bound, 3.0, |p| to_f64(&lambda_np(n, p).expect("p is prime")))
}

/// `∏_p (1 − 1/p²) = 6/π²`, truncated at `P`.
pub fn rho_truncated(bound: u64) -> Truncated {
    truncated_product(bound, 1.0, |p| 1.0 - 1.0 / (p as f64 * p as f64))
}

pub fn to_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

/// Dedekind's criterion at `p`.
pub fn dedekind_is_p_maximal(f: &MonicPoly, p: u64) -> Result<bool> {
    require_prime(p)?;
    if f.discriminant().is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    let p2 = p * p;
    let res: Vec<u64> = f.coeffs().iter().map(|a| arith::reduce_big(a, p2)).collect();
    Ok(dedekind_residues(&res, p))
}

/// Dedekind's criterion from `a_1..a_n` reduced mod `p²`.
///
/// With `f̄ = ∏ ḡ_i^{e_i}`, `g*` the monic lift of `∏ ḡ_i`, `h*` that of
/// `f̄/ḡ*` and `T = (g*h* − f)/p`, the order `ℤ[x]/(f)` is `p`-maximal iff
/// `gcd(T̄, ḡ*, h̄*) = 1`.
pub fn dedekind_residues(a: &[u64], p: u64) -> bool {
    let n = a.len();
    let p2 = p as u128 * p as u128;
    let mut asc: Vec<u64> = a.iter().rev().map(|&c| c % p).collect();
    asc.push(1);
    let fbar = ModPoly::new(p, asc);
    let sqf = fbar.sqf_decompose().expect("p is prime and f is monic");
    if !sqf.has_repeated_factor() {
        return true;
    }
    let g = sqf.radical();
    let h = fbar.div_exact(&g).expect("radical divides f");
    // g*h* − f over ℤ, coefficients kept mod p²
    let mut prod = vec![0u128; n + 1];
    for (i, &x) in g.coeffs().iter().enumerate() {
        for (j, &y) in h.coeffs().iter().enumerate() {
            prod[i + j] += x as u128 * y as u128;
        }
    }
    let t: Vec<u64> = (0..=n)
        .map(|k| {
            let fk = if k == n { 1 } else { a[n - 1 - k] as u128 % p2 };
            let diff = (prod[k] % p2 + p2 - fk) % p2;
            debug_assert_eq!(diff % p as u128, 0);
            (diff / p as u128) as u64
        })
        .collect();
    let tbar = ModPoly::new(p, t);
    tbar.gcd(&g).gcd(&h).is_one()
}

/// Which local density a sweep measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalKind {
    /// `Δ ≢ 0 (mod p²)`.
    Disc,
    /// Dedekind `p`-maximality.
    Maximal,
}

/// The residue tuples mod `p²` swept by the oracles; `a_1 = 0` when `a1_zero`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueSpace {
    pub n: usize,
    pub p: u64,
    pub a1_zero: bool,
}

impl ResidueSpace {
    pub fn new(n: usize, p: u64, a1_zero: bool, budget: u128) -> Result<Self> {
        require_prime(p)?;
        if n == 0 || (a1_zero && n < 2) {
            return Err(Error::invalid("degree too small for this sweep"));
        }
        let s = ResidueSpace { n, p, a1_zero };
        let needed = s.size().unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        Ok(s)
    }

    fn free(&self) -> usize {
        self.n - usize::from(self.a1_zero)
    }

    pub fn size(&self) -> Option<u128> {
        (self.p as u128 * self.p as u128).checked_pow(self.free() as u32)
    }

    /// Count tuples in the index range `range` satisfying `kind`.
    pub fn count_range(&self, kind: LocalKind, range: Range<u128>) -> u128 {
        let p2 = self.p * self.p;
        let free = self.free();
        let mut digits = vec![0u64; free];
        let mut idx = range.start;
        for d in digits.iter_mut() {
            *d = (idx % p2 as u128) as u64;
            idx /= p2 as u128;
        }
        let mut a = vec![0u64; self.n];
        let mut hits = 0u128;
        for _ in range {
            let off = usize::from(self.a1_zero);
            // digits[0] is the least significant and maps to a_n
            for (k, &d) in digits.iter().enumerate() {
                a[self.n - 1 - k] = d;
            }
            if off == 1 {
                a[0] = 0;
            }
            let ok = match kind {
                LocalKind::Disc => disc_nonzero_mod_p2(&a, self.p),
                LocalKind::Maximal => dedekind_residues(&a, self.p),
            };
            hits += u128::from(ok);
            for d in digits.iter_mut() {
                *d += 1;
                if *d < p2 {
                    break;
                }
                *d = 0;
            }
        }
        hits
    }

    /// Exact density over the whole space.
    pub fn density(&self, kind: LocalKind) -> BigRational {
        let total = self.size().expect("size checked at construction");
        let hits = self.count_range(kind, 0..total);
        BigRational::new(BigInt::from(hits), BigInt::from(total))
    }
}

fn disc_nonzero_mod_p2(a: &[u64], p: u64) -> bool {
    let p2 = (p * p) as i128;
    let c: Vec<i64> = a.iter().map(|&x| x as i64).collect();
    let d = match discriminant_i128(&c) {
        Some(d) => d.rem_euclid(p2),
        None => {
            let f = MonicPoly::from_i64(&c).expect("degree >= 1");
            arith::reduce_big(&f.discriminant(), p2 as u64) as i128
        }
    };
    d != 0
}

/// Exact fraction of `f mod p²` with `Δ(f) ≢ 0 (mod p²)`.
pub fn bruteforce_disc_density(n: usize, p: u64, a1_zero: bool, budget: u128) -> Result<BigRational> {
    Ok(ResidueSpace::new(n, p, a1_zero, budget)?.density(LocalKind::Disc))
}

/// Exact fraction of `f mod p²` that are `p`-maximal.
pub fn bruteforce_maximal_density(n: usize, p: u64, budget: u128) -> Result<BigRational> {
    Ok(ResidueSpace::new(n, p, false, budget)?.density(LocalKind::Maximal))
}
