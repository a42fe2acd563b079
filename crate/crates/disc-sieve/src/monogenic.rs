//! Monogenic rings `ℤ[x]/(f)` with `a₁ = 0`, and how often box polynomials
//! are strongly quasi-reduced.
//!
//! `θ ↦ −θ` sends `f(x)` to `(−1)^n f(−x)`, which again has `a₁ = 0`, so the
//! monogenic count works with pairs `{f, f*}` and reduces one representative.

use std::collections::HashSet;

use disc_sieve_core::lattice::{
    embed_roots, fujiwara_bound, minkowski_reduce_with, roots, strong_from, sup_norm, Metric, Tri, MAX_DIM, TIE_TOLERANCE,
};
use disc_sieve_core::sieve::{disc_bound, Analyzer, BoxSpec};
use disc_sieve_core::{Error, MonicPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{RunError, RunResult};
use crate::pool::Pool;
use crate::report::{timed, Report};

/// Largest counted set that gets the pairwise isomorph check.
pub const CROSS_CHECK_LIMIT: usize = 20_000;

/// How ties between candidate lengths are decided, for the reports.
pub fn tie_policy(tie: f64) -> String {
    if tie == 0.0 {
        "lengths are separated by certified error bounds only; unresolved pairs are undetermined and never counted".into()
    } else {
        format!("two lengths are tied when their relative difference is below {tie:e}; undetermined reductions are never counted")
    }
}

const CHUNK: u128 = 1 << 12;

/// Monic `f` with `a₁ = 0` and `|a_i| < Y^i` for `i >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TracelessBox {
    n: usize,
    y: u64,
}

impl TracelessBox {
    pub fn new(n: usize, y: u64, budget: u128) -> RunResult<Self> {
        if !(2..=4).contains(&n) {
            return Err(RunError::invalid("the monogenic count needs 2 <= n <= 4"));
        }
        if y == 0 {
            return Err(RunError::invalid("Y must be positive"));
        }
        if (y as u128).checked_pow(n as u32).is_none_or(|v| v > i64::MAX as u128) {
            return Err(RunError::invalid("coefficient bounds exceed 64 bits"));
        }
        let b = TracelessBox { n, y };
        let size = b.size();
        if size > budget {
            return Err(Error::BudgetExceeded { needed: size, budget }.into());
        }
        Ok(b)
    }

    /// `Y^i − 1`.
    fn bound(&self, i: usize) -> i64 {
        (self.y as i64).pow(i as u32) - 1
    }

    pub fn size(&self) -> u128 {
        (2..=self.n).try_fold(1u128, |acc, i| acc.checked_mul((2 * self.bound(i) + 1) as u128)).unwrap_or(u128::MAX)
    }

    fn decode(&self, mut index: u128) -> Vec<i64> {
        let mut a = vec![0i64; self.n];
        for i in (2..=self.n).rev() {
            let w = (2 * self.bound(i) + 1) as u128;
            a[i - 1] = (index % w) as i64 - self.bound(i);
            index /= w;
        }
        a
    }

    pub fn for_each(&self, range: std::ops::Range<u128>, mut visit: impl FnMut(&[i64])) {
        if range.start >= range.end {
            return;
        }
        let mut a = self.decode(range.start);
        for _ in range {
            visit(&a);
            for i in (1..self.n).rev() {
                if a[i] < self.bound(i + 1) {
                    a[i] += 1;
                    break;
                }
                a[i] = -self.bound(i + 1);
            }
        }
    }
}

/// `⌊v^{1/k}⌋`.
fn iroot(v: u64, k: u32) -> u64 {
    let mut r = libm::pow(v as f64, 1.0 / k as f64) as u64;
    while r > 0 && r.checked_pow(k).is_none_or(|p| p > v) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|p| p <= v) {
        r += 1;
    }
    r
}

/// The least `Y` with `|a_i| < Y^i` for every `i`.
pub fn height_level(a: &[i64]) -> u64 {
    a.iter().enumerate().map(|(i, &c)| iroot(c.unsigned_abs(), i as u32 + 1) + 1).max().unwrap_or(1)
}

/// Coefficients of `(−1)^n f(−x)`.
fn sign_twin(a: &[i64]) -> Vec<i64> {
    a.iter().enumerate().map(|(i, &c)| if i % 2 == 0 { -c } else { c }).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    polynomials: u64,
    squarefree: u64,
    irreducible: u64,
    classes: u64,
    counted: u64,
    undetermined: u64,
    failures: u64,
    max_sup: f64,
}

impl Tally {
    fn add(&mut self, o: &Tally) {
        self.polynomials += o.polynomials;
        self.squarefree += o.squarefree;
        self.irreducible += o.irreducible;
        self.classes += o.classes;
        self.counted += o.counted;
        self.undetermined += o.undetermined;
        self.failures += o.failures;
        self.max_sup = self.max_sup.max(o.max_sup);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonoRow {
    #[serde(rename = "Y")]
    pub y: u64,
    /// Polynomials with `a₁ = 0` and height below `Y`.
    pub polynomials: u64,
    pub squarefree: u64,
    /// Squarefree discriminant and irreducible.
    pub irreducible: u64,
    /// The irreducible ones up to `θ ↦ −θ`.
    pub classes: u64,
    /// Classes whose ring is strongly quasi-reduced.
    pub counted: u64,
    pub undetermined: u64,
    pub reduction_failures: u64,
    /// Largest `max_i |θ_i|` among the counted rings.
    pub max_theta_sup_norm: f64,
    /// Slope of `log counted` against `log Y` from the previous row.
    pub log_log_slope: Option<f64>,
}

/// Images `±f(±x + c)`, `|c|` up to the Fujiwara bound, looked up among the
/// counted polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub performed: bool,
    pub members: u64,
    pub images: u64,
    pub collisions: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogenicReport {
    pub n: usize,
    /// `(n−1)(n+2)/2`; an asymptotic exponent, not a pass/fail target.
    pub predicted_exponent: f64,
    pub tie_tolerance: f64,
    pub tie_policy: String,
    pub rows: Vec<MonoRow>,
    pub cross_check: CrossCheck,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl Report for MonogenicReport {
    fn clear_timing(&mut self) {
        self.wall_time = None;
    }

    fn write_csv<W: std::io::Write>(&self, out: &mut csv::Writer<W>) -> RunResult<()> {
        out.write_record([
            "Y",
            "polynomials",
            "squarefree",
            "irreducible",
            "classes",
            "counted",
            "undetermined",
            "reduction_failures",
            "max_theta_sup_norm",
            "log_log_slope",
            "predicted_exponent",
        ])?;
        for r in &self.rows {
            out.serialize((
                r.y,
                r.polynomials,
                r.squarefree,
                r.irreducible,
                r.classes,
                r.counted,
                r.undetermined,
                r.reduction_failures,
                r.max_theta_sup_norm,
                r.log_log_slope,
                self.predicted_exponent,
            ))?;
        }
        Ok(())
    }
}

enum Verdict {
    Counted(f64),
    NotStrong,
    Undetermined,
    Failed,
}

fn strong_verdict(f: &MonicPoly, tie: f64, budget: u64) -> Verdict {
    let Ok(rts) = roots(f) else { return Verdict::Failed };
    match minkowski_reduce_with(&embed_roots(&rts, Metric::Plain), budget, tie) {
        Err(_) => Verdict::Failed,
        Ok(r) => match strong_from(&r) {
            Tri::True => Verdict::Counted(sup_norm(&rts, &[0, 1])),
            Tri::False => Verdict::NotStrong,
            Tri::Undetermined => Verdict::Undetermined,
        },
    }
}

/// Counts for every `Y` in `ys`, from one pass over the largest box. `tie` is
/// the tie tolerance of the reduction ([`TIE_TOLERANCE`] by default).
pub fn monogenic_count_experiment(
    n: usize,
    ys: &[u64],
    tie: f64,
    pool: &Pool,
    budget: &Budget,
) -> RunResult<MonogenicReport> {
    let mut ys = ys.to_vec();
    ys.sort_unstable();
    ys.dedup();
    let &ymax = ys.last().ok_or_else(|| RunError::invalid("at least one Y is needed"))?;
    let (out, secs) = timed(|| -> RunResult<MonogenicReport> {
        let bx = TracelessBox::new(n, ymax, budget.boxes())?;
        let an = Analyzer::new(n, disc_bound(&BoxSpec::new(n, ymax, u128::MAX)?));
        let levels = ymax as usize + 1;
        let lattice_budget = budget.lattice();
        let parts = pool.map_chunks(bx.size(), CHUNK, |_, range| {
            let mut tallies = vec![Tally::default(); levels];
            let mut members = Vec::new();
            bx.for_each(range, |a| {
                let t = &mut tallies[height_level(a) as usize];
                t.polynomials += 1;
                if !an.analyze(a).squarefree() {
                    return;
                }
                t.squarefree += 1;
                let f = MonicPoly::from_i64(a).expect("n >= 2");
                if f.is_reducible_over_q() {
                    return;
                }
                t.irreducible += 1;
                if sign_twin(a).as_slice() < a {
                    return;
                }
                t.classes += 1;
                match strong_verdict(&f, tie, lattice_budget) {
                    Verdict::Counted(sup) => {
                        t.counted += 1;
                        t.max_sup = t.max_sup.max(sup);
                        members.push(a.to_vec());
                    }
                    Verdict::NotStrong => {}
                    Verdict::Undetermined => t.undetermined += 1,
                    Verdict::Failed => t.failures += 1,
                }
            });
            (tallies, members)
        });
        let mut by_level = vec![Tally::default(); levels];
        let mut members = Vec::new();
        for (tallies, m) in parts {
            by_level.iter_mut().zip(&tallies).for_each(|(a, b)| a.add(b));
            members.extend(m);
        }
        let mut rows: Vec<MonoRow> = Vec::new();
        for &y in &ys {
            let mut acc = Tally::default();
            by_level[..=y as usize].iter().for_each(|t| acc.add(t));
            let slope = rows.last().and_then(|prev| {
                (prev.counted > 0 && acc.counted > 0 && prev.y > 0).then(|| {
                    (acc.counted as f64 / prev.counted as f64).ln() / (y as f64 / prev.y as f64).ln()
                })
            });
            rows.push(MonoRow {
                y,
                polynomials: acc.polynomials,
                squarefree: acc.squarefree,
                irreducible: acc.irreducible,
                classes: acc.classes,
                counted: acc.counted,
                undetermined: acc.undetermined,
                reduction_failures: acc.failures,
                max_theta_sup_norm: acc.max_sup,
                log_log_slope: slope,
            });
        }
        Ok(MonogenicReport {
            n,
            predicted_exponent: ((n - 1) * (n + 2)) as f64 / 2.0,
            tie_tolerance: tie,
            tie_policy: tie_policy(tie),
            rows,
            cross_check: cross_check(&members),
            wall_time: None,
        })
    });
    let mut out = out?;
    out.wall_time = Some(secs);
    Ok(out)
}

/// Coefficients `a_1..a_n` of `s^n f(s x + c)`, `s = ±1`, or `None` on overflow.
fn affine_image(a: &[i64], s: i128, c: i128) -> Option<Vec<i64>> {
    let n = a.len();
    // descending coefficients of f, then Horner in (s x + c)
    let mut f: Vec<i128> = std::iter::once(1).chain(a.iter().map(|&v| v as i128)).collect();
    f.reverse();
    let mut acc: Vec<i128> = vec![0; n + 1];
    for &coef in f.iter().rev() {
        // acc = acc·(s x + c) + coef, ascending
        let mut next = vec![0i128; n + 1];
        for (k, &v) in acc.iter().enumerate() {
            if v == 0 {
                continue;
            }
            next[k] = next[k].checked_add(v.checked_mul(c)?)?;
            if k < n {
                next[k + 1] = next[k + 1].checked_add(v.checked_mul(s)?)?;
            }
        }
        next[0] = next[0].checked_add(coef)?;
        acc = next;
    }
    let sn = if n % 2 == 1 { s } else { 1 };
    (0..n).rev().map(|k| acc[k].checked_mul(sn).and_then(|v| i64::try_from(v).ok())).collect()
}

pub fn cross_check(members: &[Vec<i64>]) -> CrossCheck {
    if members.len() > CROSS_CHECK_LIMIT {
        return CrossCheck { performed: false, members: members.len() as u64, images: 0, collisions: 0 };
    }
    let set: HashSet<&[i64]> = members.iter().map(Vec::as_slice).collect();
    let (mut images, mut collisions) = (0u64, 0u64);
    for a in members {
        let f = MonicPoly::from_i64(a).expect("n >= 2");
        let reach = libm::ceil(fujiwara_bound(&f)) as i128;
        for s in [1i128, -1] {
            for c in -reach..=reach {
                if s == 1 && c == 0 {
                    continue;
                }
                let Some(g) = affine_image(a, s, c) else { continue };
                images += 1;
                if g.as_slice() != a.as_slice() && set.contains(g.as_slice()) {
                    collisions += 1;
                }
            }
        }
    }
    CrossCheck { performed: true, members: members.len() as u64, images, collisions }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiRow {
    #[serde(rename = "X")]
    pub x: u64,
    pub samples: u64,
    pub zero_disc: u64,
    pub reduction_failures: u64,
    pub quasi: u64,
    /// Strongly quasi-reduced with the default tie tolerance.
    pub strong: u64,
    pub undetermined: u64,
    /// `strong / (samples − zero_disc)`.
    pub strong_fraction: f64,
    /// Strongly quasi-reduced when only certified error bounds decide ties.
    pub strong_certified: u64,
    pub undetermined_certified: u64,
    pub strong_certified_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiReport {
    pub n: usize,
    pub seed: u64,
    pub tie_tolerance: f64,
    pub tie_policy: String,
    pub certified_policy: String,
    pub rows: Vec<QuasiRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl Report for QuasiReport {
    fn clear_timing(&mut self) {
        self.wall_time = None;
    }

    fn write_csv<W: std::io::Write>(&self, out: &mut csv::Writer<W>) -> RunResult<()> {
        out.write_record([
            "X",
            "samples",
            "zero_disc",
            "reduction_failures",
            "quasi",
            "strong",
            "undetermined",
            "strong_fraction",
            "strong_certified",
            "undetermined_certified",
            "strong_certified_fraction",
        ])?;
        for r in &self.rows {
            out.serialize((
                r.x,
                r.samples,
                r.zero_disc,
                r.reduction_failures,
                r.quasi,
                r.strong,
                r.undetermined,
                r.strong_fraction,
                r.strong_certified,
                r.undetermined_certified,
                r.strong_certified_fraction,
            ))?;
        }
        Ok(())
    }
}

/// Samples each box `|a_i| < X^i` uniformly and reduces every sample with
/// `Δ ≠ 0`, under the default tie tolerance and under certified bounds alone.
pub fn quasi_fraction_experiment(
    n: usize,
    xs: &[u64],
    samples: u64,
    seed: u64,
    pool: &Pool,
    budget: &Budget,
) -> RunResult<QuasiReport> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(RunError::invalid(format!("quasi-reduction needs 2 <= n <= {MAX_DIM}")));
    }
    if samples == 0 || xs.is_empty() {
        return Err(RunError::invalid("need at least one X and one sample"));
    }
    let lattice_budget = budget.lattice();
    let (rows, secs) = timed(|| -> RunResult<Vec<QuasiRow>> {
        let mut rows = Vec::new();
        for (j, &x) in xs.iter().enumerate() {
            let spec = BoxSpec::new(n, x, u128::MAX)?;
            let bounds: Vec<i64> = (1..=n).map(|i| spec.bound(i)).collect();
            let parts = pool.map_chunks(samples as u128, 256, |k, range| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((j as u64) << 32 | k);
                // zero, failed, quasi, strong, undetermined, strong certified, undetermined certified
                let mut r = [0u64; 7];
                for _ in range {
                    let a: Vec<i64> = bounds.iter().map(|&b| rng.random_range(-b..=b)).collect();
                    let f = MonicPoly::from_i64(&a).expect("n >= 2");
                    let Ok(rts) = roots(&f) else {
                        let zero = f.discriminant_i128().map_or_else(|| f.discriminant().bits() == 0, |d| d == 0);
                        r[if zero { 0 } else { 1 }] += 1;
                        continue;
                    };
                    let lat = embed_roots(&rts, Metric::Plain);
                    let (Ok(red), Ok(cert)) =
                        (minkowski_reduce_with(&lat, lattice_budget, TIE_TOLERANCE), minkowski_reduce_with(&lat, lattice_budget, 0.0))
                    else {
                        r[1] += 1;
                        continue;
                    };
                    r[2] += (red.shape == Tri::True) as u64;
                    for (res, at) in [(&red, 3), (&cert, 5)] {
                        match strong_from(res) {
                            Tri::True => r[at] += 1,
                            Tri::Undetermined => r[at + 1] += 1,
                            Tri::False => {}
                        }
                    }
                }
                r
            });
            let mut t = [0u64; 7];
            for p in &parts {
                t.iter_mut().zip(p).for_each(|(a, b)| *a += b);
            }
            let live = (samples - t[0]).max(1) as f64;
            rows.push(QuasiRow {
                x,
                samples,
                zero_disc: t[0],
                reduction_failures: t[1],
                quasi: t[2],
                strong: t[3],
                undetermined: t[4],
                strong_fraction: t[3] as f64 / live,
                strong_certified: t[5],
                undetermined_certified: t[6],
                strong_certified_fraction: t[5] as f64 / live,
            });
        }
        Ok(rows)
    });
    Ok(QuasiReport {
        n,
        seed,
        tie_tolerance: TIE_TOLERANCE,
        tie_policy: tie_policy(TIE_TOLERANCE),
        certified_policy: tie_policy(0.0),
        rows: rows?,
        wall_time: Some(secs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels() {
        assert_eq!(iroot(26, 3), 2);
        assert_eq!(iroot(27, 3), 3);
        assert_eq!(iroot(u64::MAX, 2), 4_294_967_295);
        assert_eq!(height_level(&[0, 0, 0]), 1);
        assert_eq!(height_level(&[0, 3, 7]), 2);
        assert_eq!(height_level(&[0, 4, 7]), 3);
        assert_eq!(height_level(&[0, -3, -8]), 3);
    }

    #[test]
    fn traceless_box_order_and_size() {
        let b = TracelessBox::new(3, 2, u128::MAX).unwrap();
        assert_eq!(b.size(), 7 * 15);
        let mut seen = Vec::new();
        b.for_each(0..b.size(), |a| seen.push(a.to_vec()));
        assert_eq!(seen.len(), 105);
        assert_eq!(seen[0], vec![0, -3, -7]);
        assert_eq!(seen[104], vec![0, 3, 7]);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        let mut tail = Vec::new();
        b.for_each(50..52, |a| tail.push(a.to_vec()));
        assert_eq!(tail, seen[50..52]);
        assert!(TracelessBox::new(5, 2, u128::MAX).is_err());
    }

    #[test]
    fn affine_images() {
        // x^3 - 2 under x -> x + 1: x^3 + 3x^2 + 3x - 1
        assert_eq!(affine_image(&[0, 0, -2], 1, 1).unwrap(), vec![3, 3, -1]);
        // (-1)^3 f(-x) for f = x^3 + 2x + 5 is x^3 + 2x - 5
        assert_eq!(affine_image(&[0, 2, 5], -1, 0).unwrap(), sign_twin(&[0, 2, 5]));
        assert_eq!(affine_image(&[0, -2], -1, 0).unwrap(), vec![0, -2]);
    }

    #[test]
    fn cross_check_detects_planted_isomorph() {
        let planted = vec![vec![0, 2, 5], vec![0, 2, -5]];
        let c = cross_check(&planted);
        assert!(c.performed);
        assert_eq!(c.collisions, 2);
        assert_eq!(cross_check(&planted[..1]).collisions, 0);
    }
}
