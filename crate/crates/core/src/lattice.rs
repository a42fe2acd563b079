//! The lattice `ℤ[θ] ⊂ ℝ^r × ℂ^s`: certified roots, the Minkowski embedding,
//! Minkowski reduction for small `n`, and the (strongly) quasi-reduced tests.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::MonicPoly;

const EPS: f64 = f64::EPSILON;

/// Relative length difference below which two candidates count as tied.
pub const TIE_TOLERANCE: f64 = 1e-6;

/// Default ceiling on enumeration nodes per reduction.
pub const ENUM_BUDGET: u64 = 5_000_000;

/// Largest dimension `minkowski_reduce` accepts.
pub const MAX_DIM: usize = 6;

/// `2·max(|a_1|, |a_2|^{1/2}, …, |a_{n−1}|^{1/(n−1)}, |a_n/2|^{1/n})`.
pub fn fujiwara_bound(f: &MonicPoly) -> f64 {
    let n = f.degree();
    let mut m: f64 = 0.0;
    for (i, a) in f.coeffs().iter().enumerate() {
        let k = i + 1;
        let mut v = a.abs().to_f64().unwrap_or(f64::INFINITY);
        if k == n {
            v /= 2.0;
        }
        m = m.max(libm::pow(v, 1.0 / k as f64));
    }
    2.0 * m
}

/// Roots of a squarefree `f` with inclusion radii.
///
/// Real roots come first in increasing order, then one representative with
/// positive imaginary part per conjugate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Roots {
    pub real: Vec<f64>,
    pub real_radii: Vec<f64>,
    pub complex: Vec<Complex64>,
    pub complex_radii: Vec<f64>,
}

impl Roots {
    pub fn r(&self) -> usize {
        self.real.len()
    }

    pub fn s(&self) -> usize {
        self.complex.len()
    }

    /// All `n` roots, conjugates included.
    pub fn all(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.real.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for z in &self.complex {
            out.push(*z);
            out.push(z.conj());
        }
        out
    }

    /// Largest inclusion radius relative to `max(|z|, 1)`.
    pub fn max_relative_radius(&self) -> f64 {
        let re = self.real.iter().zip(&self.real_radii).map(|(x, r)| r / x.abs().max(1.0));
        let im = self.complex.iter().zip(&self.complex_radii).map(|(z, r)| r / z.norm().max(1.0));
        re.chain(im).fold(0.0, f64::max)
    }
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // c ascending, monic
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev().skip(1) {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Roots by Aberth–Ehrlich iteration, certified by disjoint inclusion disks
/// `D(z_i, n|f(z_i)| / ∏|z_i − z_j|)` of relative radius at most `1e-12`.
pub fn roots(f: &MonicPoly) -> Result<Roots> {
    let n = f.degree();
    if f.discriminant().is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    let mut c: Vec<f64> = f.coeffs().iter().rev().map(|a| a.to_f64().unwrap_or(f64::NAN)).collect();
    c.push(1.0);
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("coefficients exceed floating point range"));
    }
    if n == 1 {
        let x = -c[0];
        return Ok(Roots { real: vec![x], real_radii: vec![0.0], complex: vec![], complex_radii: vec![] });
    }
    let rad = fujiwara_bound(f).max(1.0) / 2.0;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(rad, 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut settled = false;
    for _ in 0..2000 {
        let mut biggest: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                biggest = biggest.max(w.norm() / z[k].norm().max(1.0));
            }
        }
        if biggest < 1e-15 {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::NoConvergence);
    }
    // Newton polish
    for _ in 0..3 {
        for zk in z.iter_mut() {
            let (p, dp) = horner(&c, *zk);
            let step = p / dp;
            if step.is_finite() {
                *zk -= step;
            }
        }
    }
    let radii = inclusion_radii(&c, &z);
    for (zk, r) in z.iter().zip(&radii) {
        if !(r.is_finite() && *r <= 1e-12 * zk.norm().max(1.0)) {
            return Err(Error::NoConvergence);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= radii[i] + radii[j] {
                return Err(Error::NoConvergence);
            }
        }
    }
    split_real(f, &z, &radii)
}

fn inclusion_radii(c: &[f64], z: &[Complex64]) -> Vec<f64> {
    let n = z.len();
    let gamma = 2.0 * n as f64 * EPS / (1.0 - 2.0 * n as f64 * EPS);
    (0..n)
        .map(|i| {
            let (p, _) = horner(c, z[i]);
            let zn = z[i].norm();
            let mut mag = 0.0;
            for &a in c.iter().rev() {
                mag = mag * zn + a.abs();
            }
            let num = p.norm() + gamma * mag;
            let mut den = 1.0;
            for j in 0..n {
                if j != i {
                    den *= (z[i] - z[j]).norm();
                }
            }
            n as f64 * num / den * (1.0 + 4.0 * n as f64 * EPS)
        })
        .collect()
}

/// Sign of `f(x)` for a double `x`, exactly.
fn sign_at(f: &MonicPoly, x: f64) -> Ordering {
    let (num, shift) = dyadic(x);
    // 2^{shift·n} f(num / 2^shift) = Σ a_k num^{n−k} 2^{shift·k}, a_0 = 1
    let n = f.degree();
    let mut acc = BigInt::zero();
    let two_s = BigInt::from(1) << shift;
    let mut pow2 = BigInt::from(1);
    for k in 0..=n {
        let a = if k == 0 { BigInt::from(1) } else { f.a(k).clone() };
        acc += a * num_traits::pow(num.clone(), n - k) * &pow2;
        pow2 *= &two_s;
    }
    match acc.sign() {
        num_bigint::Sign::Minus => Ordering::Less,
        num_bigint::Sign::NoSign => Ordering::Equal,
        num_bigint::Sign::Plus => Ordering::Greater,
    }
}

/// `x = num / 2^shift` exactly.
fn dyadic(x: f64) -> (BigInt, usize) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let m = BigInt::from(sign) * BigInt::from(mant);
    if e >= 0 {
        (m << e as usize, 0)
    } else {
        (m, (-e) as usize)
    }
}

fn split_real(f: &MonicPoly, z: &[Complex64], radii: &[f64]) -> Result<Roots> {
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for (&zk, &r) in z.iter().zip(radii) {
        if zk.im.abs() <= r {
            let half = libm::sqrt((r * r - zk.im * zk.im).max(0.0));
            let lo = sign_at(f, zk.re - half);
            let hi = sign_at(f, zk.re + half);
            if lo != hi && lo != Ordering::Equal && hi != Ordering::Equal {
                real.push((zk.re, r));
                continue;
            }
            if zk.re == libm::round(zk.re) && sign_at(f, zk.re) == Ordering::Equal {
                real.push((zk.re, 0.0));
                continue;
            }
        }
        if zk.im > 0.0 {
            upper.push((zk, r));
        } else {
            lower.push((zk, r));
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::NoConvergence);
    }
    real.sort_by(|a, b| a.0.total_cmp(&b.0));
    upper.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(Roots {
        real: real.iter().map(|x| x.0).collect(),
        real_radii: real.iter().map(|x| x.1).collect(),
        complex: upper.iter().map(|x| x.0).collect(),
        complex_radii: upper.iter().map(|x| x.1).collect(),
    })
}

/// How complex places are weighted in the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// `(Re, Im)` coordinates, the usual inner product on `ℝ^n`.
    #[default]
    Plain,
    /// `√2·(Re, Im)`, so that `|x|² = Tr(x x̄)`.
    Trace,
}

/// A full-rank lattice in `ℝ^n` given by basis columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedLattice {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    /// Row-major `n×n`; column `j` is the `j`-th basis vector.
    pub basis: Vec<f64>,
    /// Euclidean error bound for each basis column.
    pub col_err: Vec<f64>,
}

impl EmbeddedLattice {
    /// A lattice from explicit basis columns (row-major `n×n`).
    pub fn from_basis(n: usize, basis: Vec<f64>, col_err: Vec<f64>) -> Result<Self> {
        if basis.len() != n * n || col_err.len() != n {
            return Err(Error::shape("basis must be n×n with n column errors"));
        }
        Ok(EmbeddedLattice { n, r: n, s: 0, basis, col_err })
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.basis[i * self.n + j]).collect()
    }

    /// `Bᵗ B`, row-major.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.n;
        let cols: Vec<Vec<f64>> = (0..n).map(|j| self.column(j)).collect();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = dot(&cols[i], &cols[j]);
            }
        }
        g
    }

    pub fn root_error_bound(&self) -> f64 {
        self.col_err.iter().copied().fold(0.0, f64::max)
    }

    /// The lattice with basis `B·T` for an integer `T` (row-major `n×n`).
    pub fn transformed(&self, t: &[i128]) -> Self {
        let n = self.n;
        let mut basis = vec![0.0; n * n];
        let mut col_err = vec![0.0; n];
        for j in 0..n {
            for k in 0..n {
                let c = t[k * n + j] as f64;
                if c == 0.0 {
                    continue;
                }
                for i in 0..n {
                    basis[i * n + j] += c * self.basis[i * n + k];
                }
                col_err[j] += c.abs() * (self.col_err[k] + EPS * norm(&self.column(k)));
            }
        }
        EmbeddedLattice { n, r: self.r, s: self.s, basis, col_err }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// The embedding of the power basis `1, θ, …, θ^{n−1}`.
pub fn embed(f: &MonicPoly) -> Result<EmbeddedLattice> {
    embed_with(f, Metric::Plain)
}

pub fn embed_with(f: &MonicPoly, metric: Metric) -> Result<EmbeddedLattice> {
    Ok(embed_roots(&roots(f)?, metric))
}

/// The embedding built from already computed roots.
pub fn embed_roots(rts: &Roots, metric: Metric) -> EmbeddedLattice {
    let n = rts.r() + 2 * rts.s();
    let w = match metric {
        Metric::Plain => 1.0,
        Metric::Trace => core::f64::consts::SQRT_2,
    };
    let mut basis = vec![0.0; n * n];
    let mut err2 = vec![0.0; n];
    let mut row = 0;
    for (&x, &rad) in rts.real.iter().zip(&rts.real_radii) {
        for j in 0..n {
            basis[row * n + j] = libm::pow(x, j as f64);
            let e = power_error(x.abs(), rad, j);
            err2[j] += e * e;
        }
        row += 1;
    }
    for (&z, &rad) in rts.complex.iter().zip(&rts.complex_radii) {
        let mut zp = Complex64::new(1.0, 0.0);
        for j in 0..n {
            basis[row * n + j] = w * zp.re;
            basis[(row + 1) * n + j] = w * zp.im;
            let e = w * power_error(z.norm(), rad, j);
            err2[j] += 2.0 * e * e;
            zp *= z;
        }
        row += 2;
    }
    let col_err = (0..n)
        .map(|j| {
            let col: Vec<f64> = (0..n).map(|i| basis[i * n + j]).collect();
            libm::sqrt(err2[j]) + 4.0 * (j + 1) as f64 * EPS * norm(&col)
        })
        .collect();
    EmbeddedLattice { n, r: rts.r(), s: rts.s(), basis, col_err }
}

/// `(|z| + ρ)^j − |z|^j`, the error of `z^j` when `z` is known to within `ρ`.
fn power_error(a: f64, rho: f64, j: usize) -> f64 {
    libm::pow(a + rho, j as f64) - libm::pow(a, j as f64)
}

/// `max_i |h(θ_i)|` over all archimedean places, `h` ascending.
pub fn sup_norm(rts: &Roots, h: &[i64]) -> f64 {
    rts.all()
        .into_iter()
        .map(|z| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &c in h.iter().rev() {
                acc = acc * z + c as f64;
            }
            acc.norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Unique,
    Tied,
    Undetermined,
}

impl Uniqueness {
    pub fn as_str(self) -> &'static str {
        match self {
            Uniqueness::Unique => "unique",
            Uniqueness::Tied => "tied",
            Uniqueness::Undetermined => "undetermined",
        }
    }
}

/// Three-valued answer for predicates that depend on floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub n: usize,
    /// Row-major `n×n`, columns are the reduced vectors in input coordinates.
    pub transform: Vec<i128>,
    /// Squared lengths of the reduced vectors.
    pub norms: Vec<f64>,
    /// The input basis was already reduced (transform is a signed identity).
    pub is_minkowski_reduced: bool,
    pub unique: Uniqueness,
    /// Some reduced basis has the unipotent shape.
    pub shape: Tri,
    /// `h_1..h_{n−1}` (ascending coefficients) when the returned basis has the shape.
    pub h_polys: Option<Vec<Vec<i128>>>,
}

impl ReductionResult {
    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.n).map(|i| self.transform[i * self.n + j]).collect()
    }

    /// `|det T|`, exactly.
    pub fn transform_det(&self) -> BigInt {
        let m = crate::linalg::Mat::from_fn(self.n, self.n, |i, j| BigInt::from(self.transform[i * self.n + j]));
        m.det()
    }
}

/// Column `i` is `±e_i` plus entries above the diagonal only.
fn unipotent_shape(n: usize, t: &[i128]) -> bool {
    (0..n).all(|j| t[j * n + j].abs() == 1 && (j + 1..n).all(|i| t[i * n + j] == 0))
}

/// Minkowski reduction by successive shortest extendable vectors.
///
/// At step `i` the current basis is `(u_1..u_{i−1}, c_i..c_n)`; a vector with
/// coordinates `y` extends `u_1..u_{i−1}` to a basis exactly when
/// `gcd(y_i..y_n) = 1`. The main path follows a shortest candidate and records
/// whether a second one lies within [`TIE_TOLERANCE`]. A second path follows
/// the coset `θ^i + span(1, …, θ^{i−1})` of the input basis and decides whether
/// some reduced basis has the unipotent shape.
pub fn minkowski_reduce(l: &EmbeddedLattice, budget: u64) -> Result<ReductionResult> {
    minkowski_reduce_with(l, budget, TIE_TOLERANCE)
}

/// [`minkowski_reduce`] with another tie tolerance: lengths within a factor
/// `1 + tie` of each other count as tied. With `tie = 0` only the certified
/// error bounds decide, and unresolved pairs are undetermined.
pub fn minkowski_reduce_with(l: &EmbeddedLattice, budget: u64, tie: f64) -> Result<ReductionResult> {
    let n = l.n;
    if n == 0 || n > MAX_DIM {
        return Err(Error::invalid("minkowski_reduce supports 1 <= n <= 6"));
    }
    if cholesky(&l.gram(), n).is_none() {
        return Err(Error::DegenerateGram);
    }
    let mut red = Reducer { base: l, nodes: 0, budget, tie: (1.0 + tie) * (1.0 + tie) };
    let (main_t, tied, undetermined) = red.main_path()?;
    let (shape, shape_t) = red.shape_path()?;
    let unique = if undetermined {
        Uniqueness::Undetermined
    } else if tied {
        Uniqueness::Tied
    } else {
        Uniqueness::Unique
    };
    let transform = normalize_signs(n, if shape == Tri::True { shape_t } else { main_t });
    let out = l.transformed(&transform);
    let norms = (0..n).map(|j| dot(&out.column(j), &out.column(j))).collect();
    let h_polys = unipotent_shape(n, &transform).then(|| (1..n).map(|j| (0..=j).map(|i| transform[i * n + j]).collect()).collect());
    let is_minkowski_reduced = (0..n).all(|i| (0..n).all(|j| transform[i * n + j].abs() == i128::from(i == j)));
    Ok(ReductionResult { n, transform, norms, is_minkowski_reduced, unique, shape, h_polys })
}

/// `(norm², error bound, coordinates)` of a lattice vector.
type Candidate = (f64, f64, Vec<i128>);

struct Reducer<'a> {
    base: &'a EmbeddedLattice,
    nodes: u64,
    budget: u64,
    /// Squared-length factor `(1 + tie)²`.
    tie: f64,
}

impl Reducer<'_> {
    fn main_path(&mut self) -> Result<(Vec<i128>, bool, bool)> {
        let n = self.base.n;
        let (mut tied, mut undetermined) = (false, false);
        let mut t = identity(n);
        for level in 0..n {
            t = lll_tail(self.base, t, level);
            let cur = self.base.transformed(&t);
            let best = self.shortest(&cur, level, None)?;
            let window = (best.0 * self.tie).max(best.0 + best.1);
            if let Some(c) = self.other(&cur, level, &best.2, window)? {
                if c.0 <= best.0 * self.tie {
                    tied = true;
                } else {
                    undetermined = true;
                }
            }
            t = matmul_i(&t, &completion(n, level, &best.2), n);
        }
        Ok((t, tied, undetermined))
    }

    fn shape_path(&mut self) -> Result<(Tri, Vec<i128>)> {
        let n = self.base.n;
        let mut status = Tri::True;
        let mut t = identity(n);
        for level in 0..n {
            t = lll_tail(self.base, t, level);
            let cur = self.base.transformed(&t);
            let best = self.shortest(&cur, level, None)?;
            let target = inverse_column(&t, n, level);
            let coset = self.shortest(&cur, level, Some(&target[level..]))?;
            if coset.0 > best.0 * self.tie {
                if coset.0 - coset.1 <= best.0 + best.1 {
                    status = Tri::Undetermined;
                } else {
                    return Ok((Tri::False, t));
                }
            }
            t = matmul_i(&t, &completion(n, level, &coset.2), n);
        }
        Ok((status, t))
    }

    /// A shortest vector with primitive tail, or with the given tail.
    fn shortest(&mut self, cur: &EmbeddedLattice, level: usize, tail: Option<&[i128]>) -> Result<Candidate> {
        let n = cur.n;
        let cols: Vec<Vec<f64>> = (0..n).map(|j| cur.column(j)).collect();
        let (bstar, mu) = gram_schmidt(&cols);
        let start = match tail {
            None => (level..n).map(|j| dot(&cols[j], &cols[j])).fold(f64::INFINITY, f64::min),
            Some(tl) => {
                let mut v = vec![0.0; n];
                for (k, &c) in tl.iter().enumerate() {
                    for (i, x) in v.iter_mut().enumerate() {
                        *x += c as f64 * cols[level + k][i];
                    }
                }
                dot(&v, &v)
            }
        };
        let mut pass = Pass {
            n,
            level,
            cols: &cols,
            col_err: &cur.col_err,
            bstar: &bstar,
            mu: &mu,
            fixed_tail: tail,
            exclude: None,
            radius: start * (1.0 + 1e-9) + f64::MIN_POSITIVE,
            stop_below: None,
            found: Vec::new(),
            done: false,
            nodes: self.nodes,
            budget: self.budget,
        };
        let mut y = vec![0i128; n];
        pass.run(n, 0.0, &mut y)?;
        self.nodes = pass.nodes;
        pass.found
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.2.cmp(&b.2)))
            .ok_or(Error::NoConvergence)
    }

    /// Some candidate other than `best` (up to sign) of norm below `window`.
    fn other(&mut self, cur: &EmbeddedLattice, level: usize, best: &[i128], window: f64) -> Result<Option<Candidate>> {
        let n = cur.n;
        let cols: Vec<Vec<f64>> = (0..n).map(|j| cur.column(j)).collect();
        let (bstar, mu) = gram_schmidt(&cols);
        let mut pass = Pass {
            n,
            level,
            cols: &cols,
            col_err: &cur.col_err,
            bstar: &bstar,
            mu: &mu,
            fixed_tail: None,
            exclude: Some(best),
            radius: window * (1.0 + 1e-9) + f64::MIN_POSITIVE,
            stop_below: Some(window),
            found: Vec::new(),
            done: false,
            nodes: self.nodes,
            budget: self.budget,
        };
        let mut y = vec![0i128; n];
        pass.run(n, 0.0, &mut y)?;
        self.nodes = pass.nodes;
        Ok(pass.found.into_iter().next())
    }
}

/// Column `j` of `T^{-1}` for unimodular `T`.
fn inverse_column(t: &[i128], n: usize, j: usize) -> Vec<i128> {
    let m = crate::linalg::Mat::from_fn(n, n, |r, c| BigInt::from(t[r * n + c]));
    let det = m.det();
    let others: Vec<usize> = (0..n).filter(|&r| r != j).collect();
    (0..n)
        .map(|i| {
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let minor = if n == 1 { BigInt::from(1) } else { m.submatrix(&others, &cols).det() };
            let v = if (i + j).is_multiple_of(2) { minor } else { -minor };
            (v / &det).to_i128().expect("unimodular inverse fits")
        })
        .collect()
}

/// Fincke–Pohst over coordinates `y_{n−1}, …, y_0` (outermost first).
struct Pass<'a> {
    n: usize,
    level: usize,
    cols: &'a [Vec<f64>],
    col_err: &'a [f64],
    bstar: &'a [f64],
    mu: &'a [f64],
    fixed_tail: Option<&'a [i128]>,
    exclude: Option<&'a [i128]>,
    radius: f64,
    /// Stop at the first leaf whose norm may lie below this; otherwise shrink.
    stop_below: Option<f64>,
    found: Vec<Candidate>,
    done: bool,
    nodes: u64,
    budget: u64,
}

impl Pass<'_> {
    fn run(&mut self, k: usize, partial: f64, y: &mut Vec<i128>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { needed: self.nodes as u128, budget: self.budget as u128 });
        }
        let n = self.n;
        if k == self.level && self.fixed_tail.is_none() {
            // entering the head coordinates: the tail must be primitive and
            // its last nonzero entry positive (v and −v are the same choice)
            let tail = &y[self.level..];
            if tail.iter().fold(0i128, |g, &v| g.gcd(&v)) != 1 || tail.iter().rev().find(|&&v| v != 0).is_some_and(|&v| v < 0) {
                return Ok(());
            }
        }
        if k == 0 {
            self.leaf(y);
            return Ok(());
        }
        let j = k - 1;
        let centre: f64 = -(j + 1..n).map(|i| self.mu[i * n + j] * y[i] as f64).sum::<f64>();
        let bj = self.bstar[j];
        let rem = self.radius - partial;
        if rem < 0.0 {
            return Ok(());
        }
        let (lo, hi) = match self.fixed_tail {
            Some(tl) if j >= self.level => (tl[j - self.level], tl[j - self.level]),
            _ => {
                let half = libm::sqrt(rem / bj) * (1.0 + 1e-9) + 1e-9;
                (libm::ceil(centre - half) as i128, libm::floor(centre + half) as i128)
            }
        };
        if lo > hi {
            return Ok(());
        }
        // Schnorr–Euchner order: nearest integer to the centre first, then outward
        let mid = (libm::round(centre) as i128).clamp(lo, hi);
        let (mut up, mut down) = (mid, mid - 1);
        while (up <= hi || down >= lo) && !self.done {
            let v = if up <= hi && (down < lo || (up as f64 - centre).abs() <= (centre - down as f64).abs()) {
                up += 1;
                up - 1
            } else {
                down -= 1;
                down + 1
            };
            let d = v as f64 - centre;
            let p = partial + d * d * bj;
            if p <= self.radius * (1.0 + 1e-9) {
                y[j] = v;
                self.run(j, p, y)?;
            }
        }
        y[j] = 0;
        Ok(())
    }

    fn leaf(&mut self, y: &[i128]) {
        if self.exclude == Some(y) {
            return;
        }
        let n = self.n;
        let mut v = vec![0.0; n];
        let mut err = 0.0;
        for (j, &c) in y.iter().enumerate() {
            if c != 0 {
                for (i, x) in v.iter_mut().enumerate() {
                    *x += c as f64 * self.cols[j][i];
                }
                err += (c as f64).abs() * (self.col_err[j] + EPS * norm(&self.cols[j]));
            }
        }
        let nv = dot(&v, &v);
        let nerr = 2.0 * libm::sqrt(nv) * err + err * err + 4.0 * n as f64 * EPS * nv;
        match self.stop_below {
            Some(w) => {
                if nv - nerr <= w {
                    self.found.push((nv, nerr, y.to_vec()));
                    self.done = true;
                }
            }
            None => {
                if nv <= self.radius {
                    self.found.push((nv, nerr, y.to_vec()));
                    let shrink = nv * (1.0 + 4.0 * EPS);
                    if shrink < self.radius {
                        self.radius = shrink;
                        let r = shrink;
                        self.found.retain(|c| c.0 <= r);
                    }
                }
            }
        }
    }
}

/// Flip column signs so the lowest nonzero entry of each column is positive.
fn normalize_signs(n: usize, mut t: Vec<i128>) -> Vec<i128> {
    for j in 0..n {
        if let Some(i) = (0..n).rev().find(|&i| t[i * n + j] != 0) {
            if t[i * n + j] < 0 {
                for k in 0..n {
                    t[k * n + j] = -t[k * n + j];
                }
            }
        }
    }
    t
}

fn identity(n: usize) -> Vec<i128> {
    let mut t = vec![0i128; n * n];
    for i in 0..n {
        t[i * n + i] = 1;
    }
    t
}

fn matmul_i(a: &[i128], b: &[i128], n: usize) -> Vec<i128> {
    let mut c = vec![0i128; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += x * b[k * n + j];
            }
        }
    }
    c
}

/// Squared Gram–Schmidt norms and the `μ` matrix (`mu[i*n + j]`, `j < i`).
fn gram_schmidt(cols: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = cols.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut bstar = vec![0.0; n];
    let mut mu = vec![0.0; n * n];
    for i in 0..n {
        let mut v = cols[i].clone();
        for j in 0..i {
            let m = dot(&cols[i], &star[j]) / bstar[j];
            mu[i * n + j] = m;
            for (a, b) in v.iter_mut().zip(&star[j]) {
                *a -= m * b;
            }
        }
        bstar[i] = dot(&v, &v);
        star.push(v);
    }
    (bstar, mu)
}

fn cholesky(g: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let d = g[i * n + i] - s;
                if d.partial_cmp(&0.0) != Some(Ordering::Greater) {
                    return None;
                }
                l[i * n + i] = libm::sqrt(d);
            } else {
                l[i * n + j] = (g[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// LLL (δ = 0.99) on basis columns `start..n` of `base·t`, the first `start`
/// columns fixed but usable for size reduction.
fn lll_tail(base: &EmbeddedLattice, mut t: Vec<i128>, start: usize) -> Vec<i128> {
    let n = base.n;
    if n - start < 2 {
        return size_reduce_all(base, t, start);
    }
    let mut k = start + 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        let cur = base.transformed(&t);
        let cols: Vec<Vec<f64>> = (0..n).map(|j| cur.column(j)).collect();
        let (bstar, mu) = gram_schmidt(&cols);
        // size-reduce column k against all earlier columns
        let mut changed = false;
        for j in (0..k).rev() {
            let m = libm::round(mu[k * n + j]);
            if m != 0.0 && m.abs() < 1e18 {
                let q = m as i128;
                for i in 0..n {
                    t[i * n + k] -= q * t[i * n + j];
                }
                changed = true;
                break;
            }
        }
        if changed {
            continue;
        }
        let lhs = bstar[k];
        let m = mu[k * n + k - 1];
        if lhs >= (0.99 - m * m) * bstar[k - 1] || k == start {
            k += 1;
        } else {
            for i in 0..n {
                t.swap(i * n + k, i * n + k - 1);
            }
            k = (k - 1).max(start + 1);
        }
    }
    t
}

fn size_reduce_all(base: &EmbeddedLattice, mut t: Vec<i128>, start: usize) -> Vec<i128> {
    let n = base.n;
    for k in start.max(1)..n {
        for _ in 0..64 {
            let cur = base.transformed(&t);
            let cols: Vec<Vec<f64>> = (0..n).map(|j| cur.column(j)).collect();
            let (_, mu) = gram_schmidt(&cols);
            let Some(j) = (0..k).rev().find(|&j| libm::round(mu[k * n + j]) != 0.0) else { break };
            let q = libm::round(mu[k * n + j]) as i128;
            for i in 0..n {
                t[i * n + k] -= q * t[i * n + j];
            }
        }
    }
    t
}

/// Unimodular `M` (row-major `n×n`) fixing `e_0..e_{level−1}`, with column
/// `level` equal to `y`; requires `gcd(y_level..y_{n−1}) = 1`.
fn completion(n: usize, level: usize, y: &[i128]) -> Vec<i128> {
    let k = n - level;
    let mut t: Vec<i128> = y[level..].to_vec();
    // v tracks W^{-1} for row operations W on t
    let mut v = vec![0i128; k * k];
    for i in 0..k {
        v[i * k + i] = 1;
    }
    for j in (1..k).rev() {
        let (a, b) = (t[j - 1], t[j]);
        if b == 0 {
            continue;
        }
        let e = a.extended_gcd(&b);
        let (g, x, yy) = (e.gcd, e.x, e.y);
        t[j - 1] = g;
        t[j] = 0;
        // inverse of [[x, yy], [−b/g, a/g]] is [[a/g, −yy], [b/g, x]], applied to columns
        let (ag, bg) = (a / g, b / g);
        for r in 0..k {
            let c0 = v[r * k + j - 1];
            let c1 = v[r * k + j];
            v[r * k + j - 1] = c0 * ag + c1 * bg;
            v[r * k + j] = -c0 * yy + c1 * x;
        }
    }
    if t[0] < 0 {
        for r in 0..k {
            v[r * k] = -v[r * k];
        }
    }
    let mut m = identity(n);
    for r in 0..k {
        for c in 0..k {
            m[(level + r) * n + level + c] = v[r * k + c];
        }
    }
    for r in 0..n {
        m[r * n + level] = y[r];
    }
    m
}

/// Minkowski reduction of the power basis of `ℤ[θ]`.
pub fn reduce_poly(f: &MonicPoly) -> Result<ReductionResult> {
    minkowski_reduce(&embed(f)?, ENUM_BUDGET)
}

/// The power basis is Minkowski-reduced up to a unipotent upper-triangular change.
pub fn is_quasi_reduced(f: &MonicPoly) -> Result<Tri> {
    Ok(reduce_poly(f)?.shape)
}

/// Quasi-reduced with a unique Minkowski-reduced basis.
pub fn is_strongly_quasi_reduced(f: &MonicPoly) -> Result<Tri> {
    Ok(strong_from(&reduce_poly(f)?))
}

pub fn strong_from(r: &ReductionResult) -> Tri {
    match (r.unique, r.shape) {
        (Uniqueness::Undetermined, _) | (_, Tri::Undetermined) => Tri::Undetermined,
        (Uniqueness::Unique, Tri::True) => Tri::True,
        _ => Tri::False,
    }
}
