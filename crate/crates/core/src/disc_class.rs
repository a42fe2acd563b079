//! Strong versus weak divisibility of `Δ(f)` by `p²`, and the weak normal form.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{self, crt, factor_u64, require_prime};
use crate::error::{Error, Result};
use crate::poly::{discriminant_i128, MonicPoly};

/// Default ceiling on `p^n` for [`strongly_divides_oracle`].
pub const ORACLE_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum P2Tag {
    NotDivisible,
    Weak,
    Strong,
    ZeroDisc,
}

impl P2Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            P2Tag::NotDivisible => "NOT_DIVISIBLE",
            P2Tag::Weak => "WEAK",
            P2Tag::Strong => "STRONG",
            P2Tag::ZeroDisc => "ZERO_DISC",
        }
    }
}

/// Classification of `p² | Δ(f)`. `witness` is the double root mod `p`, set
/// exactly when the tag is `Weak`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct P2Class {
    pub tag: P2Tag,
    pub witness: Option<u64>,
}

impl P2Class {
    fn tag(tag: P2Tag) -> Self {
        P2Class { tag, witness: None }
    }
}

/// Classify `f` at the prime `p`.
pub fn classify_p2(f: &MonicPoly, p: u64) -> Result<P2Class> {
    require_prime(p)?;
    let disc = f.discriminant();
    if disc.is_zero() {
        return Ok(P2Class::tag(P2Tag::ZeroDisc));
    }
    let p2 = BigInt::from(p) * BigInt::from(p);
    if !disc.is_multiple_of(&p2) {
        return Ok(P2Class::tag(P2Tag::NotDivisible));
    }
    Ok(classify_divisible(f, p))
}

/// Classification when `p² | Δ(f) ≠ 0` is already known.
pub(crate) fn classify_divisible(f: &MonicPoly, p: u64) -> P2Class {
    let fbar = f.reduce_mod(p);
    let g = fbar.gcd(&fbar.derivative());
    if g.degree() == Some(1) {
        // g = x + g0 is monic, so the double root is -g0
        let r = arith::submod(0, g.coeff(0), p);
        P2Class { tag: P2Tag::Weak, witness: Some(r) }
    } else {
        P2Class::tag(P2Tag::Strong)
    }
}

/// Whether `p² | Δ(f + p·g)` for every `g` of degree `< n`, by exhaustive
/// enumeration of `g` mod `p`.
pub fn strongly_divides_oracle(f: &MonicPoly, p: u64, budget: u128) -> Result<bool> {
    require_prime(p)?;
    let n = f.degree();
    let needed = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let p2 = p as i128 * p as i128;
    // Δ mod p² only depends on f mod p², so work with residues in [0, p²).
    let base: Vec<i64> = f.coeffs().iter().map(|a| arith::reduce_big(a, p * p) as i64).collect();
    let mut digits = alloc::vec![0u64; n];
    loop {
        let coeffs: Vec<i64> = base.iter().zip(&digits).map(|(&a, &g)| a + (p * g) as i64).collect();
        if disc_mod(&coeffs, p2) != 0 {
            return Ok(false);
        }
        // odometer over the perturbation digits
        let mut k = 0;
        loop {
            if k == n {
                return Ok(true);
            }
            digits[k] += 1;
            if digits[k] < p {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

fn disc_mod(coeffs: &[i64], modulus: i128) -> i128 {
    match discriminant_i128(coeffs) {
        Some(d) => d.rem_euclid(modulus),
        None => {
            let f = MonicPoly::from_i64(coeffs).expect("degree >= 1");
            f.discriminant().mod_floor(&BigInt::from(modulus)).to_i128().unwrap()
        }
    }
}

/// `f(x + ℓ) = x^n + c_1 x^{n-1} + ... + c_{n-2} x² + m c_{n-1} x + m² c_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeakNormalForm {
    pub l: BigInt,
    pub m: u64,
    pub c: Vec<BigInt>,
}

impl WeakNormalForm {
    /// Build from raw data; fails if `m` is not a positive squarefree integer
    /// or the degree is below 2.
    pub fn new(l: BigInt, m: u64, c: Vec<BigInt>) -> Result<Self> {
        if m == 0 || !arith::is_squarefree_u64(m) {
            return Err(Error::NotSquarefree(m));
        }
        if c.len() < 2 {
            return Err(Error::invalid("normal form needs degree >= 2"));
        }
        Ok(WeakNormalForm { l, m, c })
    }

    pub fn degree(&self) -> usize {
        self.c.len()
    }

    /// The shifted polynomial `f(x + ℓ)` assembled from `m` and `c`.
    pub fn shifted_poly(&self) -> MonicPoly {
        let n = self.c.len();
        let m = BigInt::from(self.m);
        let mut a = self.c.clone();
        a[n - 2] *= &m;
        a[n - 1] *= &m * &m;
        MonicPoly::new(a).expect("degree >= 2")
    }

    /// The original polynomial `f`.
    pub fn poly(&self) -> MonicPoly {
        self.shifted_poly().shift(&-self.l.clone())
    }
}

/// Weak normal form of `f` for squarefree `m`; `None` unless `f` is weakly
/// divisible at every prime dividing `m`.
pub fn weak_normal_form(f: &MonicPoly, m: u64) -> Result<Option<WeakNormalForm>> {
    if m == 0 || !arith::is_squarefree_u64(m) {
        return Err(Error::NotSquarefree(m));
    }
    let n = f.degree();
    if n < 2 {
        return Err(Error::invalid("normal form needs degree >= 2"));
    }
    let mut residues = Vec::new();
    for (p, _) in factor_u64(m) {
        let class = classify_p2(f, p)?;
        match (class.tag, class.witness) {
            (P2Tag::Weak, Some(r)) => residues.push((r, p)),
            _ => return Ok(None),
        }
    }
    let l = crt(&residues);
    let g = f.shift(&l);
    let mb = BigInt::from(m);
    let mut c = g.coeffs().to_vec();
    let (q1, r1) = c[n - 2].div_rem(&mb);
    let (q2, r2) = c[n - 1].div_rem(&(&mb * &mb));
    assert!(r1.is_zero() && r2.is_zero(), "weak divisibility forces the normal form shape");
    c[n - 2] = q1;
    c[n - 1] = q2;
    Ok(Some(WeakNormalForm { l, m, c }))
}
