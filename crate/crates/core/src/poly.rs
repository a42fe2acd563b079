//! Monic integer polynomials `x^n + a_1 x^{n-1} + ... + a_n`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::linalg::{bareiss_det, bareiss_det_i128, Mat};
use crate::modpoly::ModPoly;
use crate::zpoly::{QPoly, ZPoly};

/// A monic integer polynomial of degree `n >= 1`. Only `a_1..a_n` are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonicPoly {
    coeffs: Vec<BigInt>,
}

impl MonicPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a monic polynomial needs degree >= 1"));
        }
        Ok(MonicPoly { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// From an ascending coefficient list whose top coefficient is 1.
    pub fn from_zpoly(p: &ZPoly) -> Result<Self> {
        let d = p.degree().ok_or(Error::ZeroPolynomial)?;
        if d == 0 || !p.coeff(d).is_one() {
            return Err(Error::invalid("polynomial is not monic of positive degree"));
        }
        Ok(MonicPoly { coeffs: (0..d).rev().map(|k| p.coeff(k)).collect() })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_1, ..., a_n`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient `a_i` for `1 <= i <= n`.
    pub fn a(&self, i: usize) -> &BigInt {
        &self.coeffs[i - 1]
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    /// The same polynomial as an ascending dense `ZPoly` (leading 1 included).
    pub fn to_zpoly(&self) -> ZPoly {
        let mut c: Vec<BigInt> = self.coeffs.iter().rev().cloned().collect();
        c.push(BigInt::one());
        ZPoly::new(c)
    }

    /// `H(f) < X`, decided exactly as `|a_i| < X^i` for every `i`.
    pub fn height_less_than(&self, x: &BigInt) -> bool {
        assert!(x.is_positive(), "height bound must be positive");
        let mut bound = BigInt::one();
        self.coeffs.iter().all(|a| {
            bound *= x;
            a.abs() < bound
        })
    }

    /// `H(f) = max |a_i|^{1/i}` in floating point.
    pub fn height(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| libm::pow(a.abs().to_f64().unwrap_or(f64::INFINITY), 1.0 / (i + 1) as f64))
            .fold(0.0, f64::max)
    }

    /// `f(x + shift)`.
    pub fn shift(&self, shift: &BigInt) -> MonicPoly {
        MonicPoly::from_zpoly(&self.to_zpoly().taylor_shift(shift)).expect("shift keeps f monic")
    }

    /// Weighted action `a_i ↦ ρ^i a_i`, under which `H(ρ·f) = ρ H(f)`.
    ///
    /// This is `ρ^n f(x/ρ)`; the result is monic with rational coefficients.
    pub fn weighted_scale(&self, rho: &BigRational) -> Vec<BigRational> {
        assert!(rho.is_positive(), "scale must be positive");
        let mut r = BigRational::one();
        self.coeffs
            .iter()
            .map(|a| {
                r = &r * rho;
                &r * BigRational::from_integer(a.clone())
            })
            .collect()
    }

    /// Weighted action by an integer, staying in ℤ[x].
    pub fn weighted_scale_int(&self, rho: &BigInt) -> MonicPoly {
        let mut r = BigInt::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                r *= rho;
                &r * a
            })
            .collect();
        MonicPoly { coeffs }
    }

    /// Coefficientwise reduction into `[0, q)`.
    pub fn reduce_mod(&self, q: u64) -> ModPoly {
        assert!(q >= 2, "modulus must be at least 2");
        let mut c: Vec<u64> = self.coeffs.iter().rev().map(|a| arith::reduce_big(a, q)).collect();
        c.push(1 % q);
        ModPoly::new(q, c)
    }

    /// The raw resultant `Res(f, f')`.
    pub fn res_with_derivative(&self) -> BigInt {
        let f = self.to_zpoly();
        resultant(&f, &f.derivative()).expect("f and f' are nonzero")
    }

    /// Classical discriminant `(-1)^{n(n-1)/2} Res(f, f')`.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        let r = self.res_with_derivative();
        if (n * (n - 1) / 2) % 2 == 1 {
            -r
        } else {
            r
        }
    }

    /// Fast discriminant for word-sized coefficients; `None` on overflow.
    pub fn discriminant_i128(&self) -> Option<i128> {
        let c = self.to_i64()?;
        discriminant_i128(&c)
    }

    /// Whether `f` has a monic integer factor of degree `1..=n/2`.
    pub fn is_reducible_over_q(&self) -> bool {
        let n = self.degree();
        if n < 2 {
            return false;
        }
        if self.a(n).is_zero() {
            return true;
        }
        if has_integer_root(self) {
            return true;
        }
        let f = self.to_zpoly();
        let bound = root_bound_int(self);
        (2..=n / 2).any(|d| has_factor_of_degree(&f, self.a(n), d, &bound))
    }
}

impl fmt::Display for MonicPoly {
    /// Canonical text form, e.g. `x^3 - 1*x^2 + 3*x + 9`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        if n == 1 {
            write!(f, "x")?;
        } else {
            write!(f, "x^{n}")?;
        }
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let k = n - 1 - i;
            let sign = if a.is_negative() { '-' } else { '+' };
            let mag = a.abs();
            match k {
                0 => write!(f, " {sign} {mag}")?,
                1 => write!(f, " {sign} {mag}*x")?,
                _ => write!(f, " {sign} {mag}*x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Sylvester matrix of `f` (degree m) and `g` (degree k), size (m+k)².
fn sylvester(f: &ZPoly, g: &ZPoly) -> Mat<BigInt> {
    let m = f.degree().unwrap();
    let k = g.degree().unwrap();
    let size = m + k;
    Mat::from_fn(size, size, |i, j| {
        if i < k {
            // row i holds f shifted by i, highest coefficient first
            j.checked_sub(i).filter(|&t| t <= m).map_or_else(BigInt::zero, |t| f.coeff(m - t))
        } else {
            let r = i - k;
            j.checked_sub(r).filter(|&t| t <= k).map_or_else(BigInt::zero, |t| g.coeff(k - t))
        }
    })
}

/// `Res(f, g)` as the determinant of the Sylvester matrix.
pub fn resultant(f: &ZPoly, g: &ZPoly) -> Result<BigInt> {
    let (m, k) = match (f.degree(), g.degree()) {
        (Some(m), Some(k)) => (m, k),
        _ => return Err(Error::ZeroPolynomial),
    };
    if m == 0 {
        return Ok(num_traits::pow(f.coeff(0), k));
    }
    if k == 0 {
        return Ok(num_traits::pow(g.coeff(0), m));
    }
    Ok(bareiss_det(&sylvester(f, g)))
}

/// Discriminant of a monic polynomial given by `a_1..a_n` as i64, via an
/// i128 Bareiss elimination of the Sylvester matrix of `f` and `f'`.
pub fn discriminant_i128(a: &[i64]) -> Option<i128> {
    let n = a.len();
    match n {
        0 => None,
        1 => Some(1),
        2 => {
            let (b, c) = (a[0] as i128, a[1] as i128);
            Some(b * b - 4 * c)
        }
        3 => {
            let (p, q, r) = (a[0] as i128, a[1] as i128, a[2] as i128);
            Some(p * p * q * q - 4 * q * q * q - 4 * p * p * p * r - 27 * r * r + 18 * p * q * r)
        }
        _ => {
            // f descending: 1, a_1, ..., a_n ; f' descending: n, (n-1) a_1, ..., a_{n-1}
            let mut fd = Vec::with_capacity(n + 1);
            fd.push(1i128);
            fd.extend(a.iter().map(|&c| c as i128));
            let gd: Vec<i128> = (0..n).map(|i| (n - i) as i128 * fd[i]).collect();
            let size = 2 * n - 1;
            let mut m = vec![0i128; size * size];
            for i in 0..n - 1 {
                for (t, &c) in fd.iter().enumerate() {
                    m[i * size + i + t] = c;
                }
            }
            for r in 0..n {
                for (t, &c) in gd.iter().enumerate() {
                    m[(n - 1 + r) * size + r + t] = c;
                }
            }
            let res = bareiss_det_i128(&m, size)?;
            Some(if (n * (n - 1) / 2) % 2 == 1 { -res } else { res })
        }
    }
}

/// Discriminant of a monic polynomial with rational coefficients `a_1..a_n`.
pub fn discriminant_rational(a: &[BigRational]) -> BigRational {
    let n = a.len();
    let den = a.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    // Δ(f) for f with coefficients a_i: scale x ↦ x/den gives integer coefficients
    // a_i den^i, and Δ scales by den^{n(n-1)}.
    let mut pow = BigInt::one();
    let scaled: Vec<BigInt> = a
        .iter()
        .map(|c| {
            pow *= &den;
            (c * BigRational::from_integer(pow.clone())).to_integer()
        })
        .collect();
    let d = MonicPoly::new(scaled).map(|p| p.discriminant()).unwrap_or_else(|_| BigInt::one());
    BigRational::new(d, num_traits::pow(den, n * (n.saturating_sub(1))))
}

/// `Δ(f) = 0` iff `gcd(f, f')` over ℚ is nonconstant.
pub fn has_repeated_root(f: &MonicPoly) -> bool {
    let q: QPoly = f.to_zpoly().to_rational();
    q.gcd(&q.derivative()).degree().is_some_and(|d| d > 0)
}

fn has_integer_root(f: &MonicPoly) -> bool {
    let n = f.degree();
    let an = f.a(n).abs();
    let z = f.to_zpoly();
    // Any integer root divides a_n; enumerate the divisors of |a_n|.
    divisors(&an).into_iter().any(|d| z.eval(&d).is_zero() || z.eval(&-d).is_zero())
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    if let Some(v) = n.to_u64() {
        let mut d = 1u64;
        while d.saturating_mul(d) <= v {
            if v % d == 0 {
                out.push(BigInt::from(d));
                if d != v / d {
                    out.push(BigInt::from(v / d));
                }
            }
            d += 1;
        }
        return out;
    }
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let e = n / &d;
            if e != d {
                out.push(e);
            }
        }
        d += 1;
    }
    out
}

/// Integer radius `R` with every complex root of `f` of modulus `<= R`:
/// twice the largest `ceil(|a_i|^{1/i})`, which dominates Fujiwara's bound.
pub fn root_bound_int(f: &MonicPoly) -> BigInt {
    let m = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| arith::nth_root_ceil(a, (i + 1) as u32))
        .max()
        .unwrap_or_else(BigInt::zero);
    m * 2
}

/// Search for a monic factor of degree `d` whose coefficients obey the
/// elementary-symmetric bounds `|e_k| <= C(d,k) R^k`.
fn has_factor_of_degree(f: &ZPoly, an: &BigInt, d: usize, radius: &BigInt) -> bool {
    let bounds: Vec<BigInt> = (1..=d).map(|k| binom(d, k) * num_traits::pow(radius.clone(), k)).collect();
    // the constant term must divide a_n
    let consts: Vec<BigInt> = divisors(&an.abs())
        .into_iter()
        .flat_map(|v| [v.clone(), -v])
        .filter(|v| v.abs() <= bounds[d - 1])
        .collect();
    let mut cur = vec![BigInt::zero(); d]; // cur[k-1] = coefficient of x^{d-k}
    fn rec(f: &ZPoly, d: usize, k: usize, cur: &mut Vec<BigInt>, bounds: &[BigInt], consts: &[BigInt]) -> bool {
        if k == d {
            for c in consts {
                cur[d - 1] = c.clone();
                let mut asc: Vec<BigInt> = cur.iter().rev().cloned().collect();
                asc.push(BigInt::one());
                if f.div_exact(&ZPoly::new(asc)).is_some() {
                    return true;
                }
            }
            return false;
        }
        let b = &bounds[k - 1];
        let mut v = -b.clone();
        while &v <= b {
            cur[k - 1] = v.clone();
            if rec(f, d, k + 1, cur, bounds, consts) {
                return true;
            }
            v += 1;
        }
        false
    }
    rec(f, d, 1, &mut cur, &bounds, &consts)
}

fn binom(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `d ≠ 0` is squarefree iff no prime square divides it (trial division).
pub fn is_squarefree_integer(d: &BigInt) -> Result<bool> {
    if d.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    let a = d.abs();
    if let Some(v) = a.to_u64() {
        return Ok(arith::is_squarefree_u64(v));
    }
    let mut rest = a;
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        if (&rest % &p).is_zero() {
            rest /= &p;
            if (&rest % &p).is_zero() {
                return Ok(false);
            }
        }
        p += 1;
    }
    Ok(true)
}
