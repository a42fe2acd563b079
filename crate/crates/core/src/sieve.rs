//! Height boxes and the per-polynomial kernels used to scan them.
//!
//! A box `H(f) < X` holds the `∏ (2X^i − 1)` polynomials with `|a_i| < X^i`.
//! Boxes are indexed lexicographically (`a_1` most significant, each
//! coefficient running upward from `−(X^i − 1)`), so disjoint index ranges
//! can be scanned independently and merged by addition.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, primes_up_to};
use crate::disc_class::{classify_divisible, P2Tag};
use crate::error::{Error, Result};
use crate::local_density::dedekind_residues;
use crate::poly::{discriminant_i128, MonicPoly};

/// Default ceiling on box sizes.
pub const BOX_BUDGET: u128 = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxSpec {
    n: usize,
    x: u64,
}

impl BoxSpec {
    pub fn new(n: usize, x: u64, budget: u128) -> Result<Self> {
        if n == 0 || x == 0 {
            return Err(Error::invalid("box needs n >= 1 and X >= 1"));
        }
        if (x as u128).checked_pow(n as u32).is_none_or(|v| v > i64::MAX as u128) {
            return Err(Error::invalid("coefficient bounds exceed 64 bits"));
        }
        let b = BoxSpec { n, x };
        let needed = (1..=n).try_fold(1u128, |acc, i| acc.checked_mul((2 * b.bound(i) + 1) as u128)).unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        Ok(b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    /// `X^i − 1`, the largest allowed `|a_i|`.
    pub fn bound(&self, i: usize) -> i64 {
        (self.x as i64).pow(i as u32) - 1
    }

    /// `∏ (2X^i − 1)`, saturating.
    pub fn size(&self) -> u128 {
        (1..=self.n).try_fold(1u128, |acc, i| acc.checked_mul((2 * self.bound(i) + 1) as u128)).unwrap_or(u128::MAX)
    }

    /// Coefficients `a_1..a_n` of the polynomial at `index`.
    pub fn decode(&self, mut index: u128) -> Vec<i64> {
        let mut a = vec![0i64; self.n];
        for i in (1..=self.n).rev() {
            let w = (2 * self.bound(i) + 1) as u128;
            a[i - 1] = (index % w) as i64 - self.bound(i);
            index /= w;
        }
        a
    }

    /// Visit `a_1..a_n` for every index in `range`, in order.
    pub fn for_each(&self, range: Range<u128>, mut visit: impl FnMut(&[i64])) {
        if range.start >= range.end {
            return;
        }
        let mut a = self.decode(range.start);
        let bounds: Vec<i64> = (1..=self.n).map(|i| self.bound(i)).collect();
        for _ in range {
            visit(&a);
            for i in (0..self.n).rev() {
                if a[i] < bounds[i] {
                    a[i] += 1;
                    break;
                }
                a[i] = -bounds[i];
            }
        }
    }

    /// Every polynomial in the box, in index order.
    pub fn iter(&self) -> BoxIter {
        BoxIter { spec: *self, next: 0, end: self.size() }
    }
}

/// Iterator over the polynomials of a box; filter it to restrict the family.
pub struct BoxIter {
    spec: BoxSpec,
    next: u128,
    end: u128,
}

impl Iterator for BoxIter {
    type Item = MonicPoly;

    fn next(&mut self) -> Option<MonicPoly> {
        if self.next >= self.end {
            return None;
        }
        let a = self.spec.decode(self.next);
        self.next += 1;
        Some(MonicPoly::from_i64(&a).expect("n >= 1"))
    }
}

/// `enumerate_box` with an explicit budget.
pub fn enumerate_box(n: usize, x: u64, budget: u128) -> Result<BoxIter> {
    Ok(BoxSpec::new(n, x, budget)?.iter())
}

/// The primes `p` with `p² | v`, at most 16 of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SquarePrimes {
    len: u8,
    primes: [u64; 16],
}

impl SquarePrimes {
    fn push(&mut self, p: u64) {
        self.primes[self.len as usize] = p;
        self.len += 1;
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes[..self.len as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `∏ p`, the largest squarefree `m` with `m² | v`.
    pub fn radical(&self) -> u128 {
        self.as_slice().iter().map(|&p| p as u128).product()
    }
}

/// Odd prime with the data for a multiply-and-compare divisibility test.
#[derive(Debug, Clone, Copy)]
struct OddPrime {
    p: u64,
    inv: u64,
    lim: u64,
}

impl OddPrime {
    fn new(p: u64) -> Self {
        // Newton iteration for p^{-1} mod 2^64
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        OddPrime { p, inv, lim: u64::MAX / p }
    }

    #[inline]
    fn divides(&self, v: u64) -> bool {
        v.wrapping_mul(self.inv) <= self.lim
    }

    /// `v / p` for `p | v`.
    #[inline]
    fn div(&self, v: u64) -> u64 {
        v.wrapping_mul(self.inv)
    }
}

/// Largest prime kept in the [`SquareFinder`] table.
const FINDER_TABLE_LIMIT: u64 = 1 << 21;

/// Trial division up to the cube root of the cofactor.
#[derive(Debug, Clone)]
pub struct SquareFinder {
    odd: Vec<OddPrime>,
}

impl SquareFinder {
    /// Prepared for values up to `max_abs` without falling back to slow
    /// division, as long as the cube root stays below `2^21`.
    pub fn new(max_abs: u128) -> Self {
        let mut c = (libm::cbrt(max_abs as f64) as u64).saturating_add(2).min(FINDER_TABLE_LIMIT);
        while c < FINDER_TABLE_LIMIT && (c as u128).pow(3) < max_abs {
            c += 1;
        }
        let odd = primes_up_to(c.max(3)).into_iter().skip(1).map(OddPrime::new).collect();
        SquareFinder { odd }
    }

    /// Primes whose square divides `v ≠ 0`.
    pub fn square_primes(&self, v: u128) -> SquarePrimes {
        let mut out = SquarePrimes::default();
        let tz = v.trailing_zeros();
        if tz >= 2 {
            out.push(2);
        }
        let mut v = v >> tz;
        let mut idx = 0;
        while v > u64::MAX as u128 {
            let Some(op) = self.odd.get(idx) else {
                return slow_tail(v, self.odd.last().map_or(3, |q| q.p + 2), out);
            };
            let p = op.p as u128;
            if p * p * p > v {
                return finish_cofactor(v, out);
            }
            if v.is_multiple_of(p) {
                v /= p;
                if v.is_multiple_of(p) {
                    out.push(op.p);
                    while v.is_multiple_of(p) {
                        v /= p;
                    }
                }
            }
            idx += 1;
        }
        let mut w = v as u64;
        loop {
            let Some(op) = self.odd.get(idx) else {
                return slow_tail(w as u128, self.odd.last().map_or(3, |q| q.p + 2), out);
            };
            let p = op.p;
            if (p as u128) * (p as u128) * (p as u128) > w as u128 {
                break;
            }
            if op.divides(w) {
                w = op.div(w);
                if op.divides(w) {
                    out.push(p);
                    while op.divides(w) {
                        w = op.div(w);
                    }
                }
            }
            idx += 1;
        }
        finish_cofactor(w as u128, out)
    }
}

/// All prime factors of `v` exceed its cube root: `v` is 1, prime, a product
/// of two primes, or a prime square.
fn finish_cofactor(v: u128, mut out: SquarePrimes) -> SquarePrimes {
    if v > 1 {
        let r = arith::isqrt_u128(v);
        if r * r == v {
            out.push(r as u64);
        }
    }
    out
}

fn slow_tail(mut v: u128, mut p: u64, mut out: SquarePrimes) -> SquarePrimes {
    while (p as u128).pow(3) <= v {
        let pp = p as u128;
        if v.is_multiple_of(pp) {
            v /= pp;
            if v.is_multiple_of(pp) {
                out.push(p);
                while v.is_multiple_of(pp) {
                    v /= pp;
                }
            }
        }
        p += 2;
    }
    finish_cofactor(v, out)
}

/// `Δ` of a box polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Disc {
    Small(i128),
    Big(BigInt),
}

impl Disc {
    pub fn is_zero(&self) -> bool {
        match self {
            Disc::Small(d) => *d == 0,
            Disc::Big(d) => d.is_zero(),
        }
    }

    pub fn to_bigint(&self) -> BigInt {
        match self {
            Disc::Small(d) => BigInt::from(*d),
            Disc::Big(d) => d.clone(),
        }
    }
}

pub fn disc_of(a: &[i64]) -> Disc {
    match discriminant_i128(a) {
        Some(d) => Disc::Small(d),
        None => Disc::Big(MonicPoly::from_i64(a).expect("n >= 1").discriminant()),
    }
}

/// Per-polynomial result of a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub disc: Disc,
    /// Primes with `p² | Δ`; empty when `Δ = 0`.
    pub square_primes: SquarePrimes,
}

impl Analysis {
    pub fn squarefree(&self) -> bool {
        !self.disc.is_zero() && self.square_primes.is_empty()
    }
}

/// Precomputed Dedekind answers indexed by `a_1..a_n mod p²`.
#[derive(Debug, Clone)]
struct DedekindTable {
    p: u64,
    bits: Vec<u64>,
}

impl DedekindTable {
    fn build(n: usize, p: u64) -> Self {
        let p2 = p * p;
        let size = p2.pow(n as u32) as usize;
        let mut bits = vec![0u64; size.div_ceil(64)];
        let mut a = vec![0u64; n];
        for idx in 0..size {
            if dedekind_residues(&a, p) {
                bits[idx / 64] |= 1 << (idx % 64);
            }
            for d in a.iter_mut().rev() {
                *d += 1;
                if *d < p2 {
                    break;
                }
                *d = 0;
            }
        }
        DedekindTable { p, bits }
    }

    fn lookup(&self, a: &[i64]) -> bool {
        let p2 = (self.p * self.p) as i64;
        let idx = a.iter().fold(0usize, |acc, &c| acc * p2 as usize + c.rem_euclid(p2) as usize);
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }
}

/// Scanning kernel for a fixed degree: discriminant, the primes squaring into
/// it, squarefreeness, maximality and the strong/weak split.
#[derive(Debug, Clone)]
pub struct Analyzer {
    n: usize,
    finder: SquareFinder,
    tables: Vec<DedekindTable>,
}

/// Largest Dedekind table, in entries.
const TABLE_LIMIT: u64 = 1 << 18;

impl Analyzer {
    /// `max_abs_disc` sizes the trial-division prime table.
    pub fn new(n: usize, max_abs_disc: u128) -> Self {
        let mut tables = Vec::new();
        for p in primes_up_to(64) {
            if (p * p).checked_pow(n as u32).is_some_and(|s| s <= TABLE_LIMIT) {
                tables.push(DedekindTable::build(n, p));
            }
        }
        Analyzer { n, finder: SquareFinder::new(max_abs_disc), tables }
    }

    /// Analyzer sized for a whole box.
    pub fn for_box(spec: &BoxSpec) -> Self {
        Self::new(spec.n(), disc_bound(spec))
    }

    pub fn analyze(&self, a: &[i64]) -> Analysis {
        debug_assert_eq!(a.len(), self.n);
        let disc = disc_of(a);
        let square_primes = match &disc {
            Disc::Small(0) => SquarePrimes::default(),
            Disc::Small(d) => self.finder.square_primes(d.unsigned_abs()),
            Disc::Big(d) if d.is_zero() => SquarePrimes::default(),
            Disc::Big(d) => match arith::abs_u128(d) {
                Some(v) => self.finder.square_primes(v),
                None => big_square_primes(&d.abs()),
            },
        };
        Analysis { disc, square_primes }
    }

    /// `p`-maximal at `p` (only meaningful for `p² | Δ`).
    pub fn maximal_at(&self, a: &[i64], p: u64) -> bool {
        if let Some(t) = self.tables.iter().find(|t| t.p == p) {
            return t.lookup(a);
        }
        let p2 = p as i128 * p as i128;
        let r: Vec<u64> = a.iter().map(|&c| (c as i128).rem_euclid(p2) as u64).collect();
        dedekind_residues(&r, p)
    }

    /// `ℤ[x]/(f)` is the maximal order (`Δ ≠ 0`).
    pub fn maximal(&self, a: &[i64], an: &Analysis) -> bool {
        !an.disc.is_zero() && an.square_primes.as_slice().iter().all(|&p| self.maximal_at(a, p))
    }

    /// Strong/weak tag at a prime with `p² | Δ ≠ 0`.
    pub fn tag_at(&self, a: &[i64], p: u64) -> P2Tag {
        classify_divisible(&MonicPoly::from_i64(a).expect("n >= 1"), p).tag
    }
}

/// Trial division of a discriminant beyond 128 bits.
fn big_square_primes(v: &BigInt) -> SquarePrimes {
    let mut out = SquarePrimes::default();
    let mut rest = v.clone();
    let mut p = 2u64;
    loop {
        let pb = BigInt::from(p);
        if &pb * &pb * &pb > rest {
            break;
        }
        if (&rest % &pb).is_zero() {
            rest /= &pb;
            if (&rest % &pb).is_zero() {
                out.push(p);
                while (&rest % &pb).is_zero() {
                    rest /= &pb;
                }
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::from(1) {
        let r = rest.sqrt();
        if &r * &r == rest {
            out.push(r.to_u64().expect("square root of the cofactor fits in 64 bits"));
        }
    }
    out
}

/// Upper bound for `|Δ|` over a box: Hadamard's inequality on the Sylvester
/// matrix of `f` and `f'`.
pub fn disc_bound(spec: &BoxSpec) -> u128 {
    let n = spec.n();
    if n == 1 {
        return 1;
    }
    let x = spec.x() as f64;
    // rows of f: sqrt(1 + Σ X^{2i}); rows of f': sqrt(n² + Σ (n−i)² X^{2i})
    let rf: f64 = libm::sqrt((0..=n).map(|i| libm::pow(x, 2.0 * i as f64)).sum());
    let rg: f64 = libm::sqrt((0..n).map(|i| ((n - i) * (n - i)) as f64 * libm::pow(x, 2.0 * i as f64)).sum());
    let h = libm::pow(rf, (n - 1) as f64) * libm::pow(rg, n as f64);
    if h >= u128::MAX as f64 {
        u128::MAX
    } else {
        h as u128 + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::is_squarefree_integer;

    #[test]
    fn box_sizes() {
        assert_eq!(BoxSpec::new(2, 2, BOX_BUDGET).unwrap().size(), 21);
        assert_eq!(BoxSpec::new(3, 2, BOX_BUDGET).unwrap().size(), 315);
        assert_eq!(BoxSpec::new(2, 10, BOX_BUDGET).unwrap().size(), 3781);
        assert_eq!(enumerate_box(2, 2, BOX_BUDGET).unwrap().count(), 21);
        assert!(matches!(BoxSpec::new(4, 100, BOX_BUDGET), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn enumeration_matches_height_predicate() {
        let spec = BoxSpec::new(3, 2, BOX_BUDGET).unwrap();
        let mut seen = Vec::new();
        spec.for_each(0..spec.size(), |a| seen.push(a.to_vec()));
        let via_iter: Vec<Vec<i64>> = spec.iter().map(|f| f.to_i64().unwrap()).collect();
        assert_eq!(seen, via_iter);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        let x = BigInt::from(2);
        assert!(spec.iter().all(|f| f.height_less_than(&x)));
        // every polynomial of height < 2 in the surrounding cube is present
        let mut count = 0;
        for a1 in -8i64..=8 {
            for a2 in -8i64..=8 {
                for a3 in -8i64..=8 {
                    if MonicPoly::from_i64(&[a1, a2, a3]).unwrap().height_less_than(&x) {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 315);
    }

    #[test]
    fn square_primes_against_factorization() {
        let f = SquareFinder::new(1 << 40);
        for v in (1u64..20_000).chain([1 << 39, 3 * 3 * 1_000_003, 999_983 * 999_983, 999_983 * 999_979]) {
            let expect: Vec<u64> = arith::factor_u64(v).into_iter().filter(|&(_, e)| e >= 2).map(|(p, _)| p).collect();
            let mut got = f.square_primes(v as u128).as_slice().to_vec();
            got.sort_unstable();
            assert_eq!(got, expect, "v = {v}");
        }
        // beyond 64 bits
        let big = (1u128 << 70) * 9;
        assert_eq!(SquareFinder::new(big).square_primes(big).as_slice(), &[2, 3]);
    }

    #[test]
    fn analyzer_agrees_with_exact_route() {
        let spec = BoxSpec::new(3, 3, BOX_BUDGET).unwrap();
        let an = Analyzer::for_box(&spec);
        for f in spec.iter() {
            let a = f.to_i64().unwrap();
            let r = an.analyze(&a);
            let d = f.discriminant();
            assert_eq!(r.disc.to_bigint(), d);
            if d.is_zero() {
                continue;
            }
            assert_eq!(r.squarefree(), is_squarefree_integer(&d).unwrap());
            let max_exact = r
                .square_primes
                .as_slice()
                .iter()
                .all(|&p| crate::local_density::dedekind_is_p_maximal(&f, p).unwrap());
            assert_eq!(an.maximal(&a, &r), max_exact);
        }
    }

    #[test]
    fn disc_bound_dominates() {
        let spec = BoxSpec::new(4, 3, BOX_BUDGET).unwrap();
        let b = disc_bound(&spec);
        let mut worst = 0u128;
        spec.for_each(0..spec.size(), |a| {
            if let Disc::Small(d) = disc_of(a) {
                worst = worst.max(d.unsigned_abs());
            }
        });
        assert!(worst <= b);
    }
}
