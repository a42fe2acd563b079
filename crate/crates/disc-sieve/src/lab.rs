//! Experiments over the height box `|a_i| < X^i`.

use std::collections::BTreeMap;

use disc_sieve_core::arith::{isqrt_u128, mobius};
use disc_sieve_core::disc_class::P2Tag;
use disc_sieve_core::local_density::{lambda_n_truncated, rho_truncated, Truncated};
use disc_sieve_core::sieve::{disc_bound, Analyzer, BoxSpec, Disc};
use disc_sieve_core::{Error, MonicPoly};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{RunError, RunResult};
use crate::format::ratio_string;
use crate::pool::Pool;
use crate::report::{timed, Report};

/// Euler products are truncated at this prime bound.
pub const EULER_BOUND: u64 = 100_000;

/// Box indices per work unit.
const CHUNK: u128 = 1 << 15;

/// Raw counts of one pass over a box.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCounts {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: u64,
    pub total: u64,
    pub zero_disc: u64,
    pub squarefree: u64,
    pub maximal: u64,
    /// Squarefree discriminant but not maximal; always 0.
    pub squarefree_not_maximal: u64,
}

impl BoxCounts {
    fn merge(mut self, o: &BoxCounts) -> Self {
        self.total += o.total;
        self.zero_disc += o.zero_disc;
        self.squarefree += o.squarefree;
        self.maximal += o.maximal;
        self.squarefree_not_maximal += o.squarefree_not_maximal;
        self
    }
}

pub fn box_counts(n: usize, x: u64, pool: &Pool, budget: &Budget) -> RunResult<BoxCounts> {
    box_counts_where(n, x, pool, budget, |_| true)
}

/// Counts over the polynomials of the box accepted by `keep`.
pub fn box_counts_where(
    n: usize,
    x: u64,
    pool: &Pool,
    budget: &Budget,
    keep: impl Fn(&[i64]) -> bool + Sync + Send,
) -> RunResult<BoxCounts> {
    let spec = BoxSpec::new(n, x, budget.boxes())?;
    let an = Analyzer::for_box(&spec);
    let parts = pool.map_chunks(spec.size(), CHUNK, |_, range| {
        let mut c = BoxCounts::default();
        spec.for_each(range, |a| {
            if !keep(a) {
                return;
            }
            c.total += 1;
            let res = an.analyze(a);
            if res.disc.is_zero() {
                c.zero_disc += 1;
                return;
            }
            let sf = res.squarefree();
            let max = an.maximal(a, &res);
            c.squarefree += sf as u64;
            c.maximal += max as u64;
            c.squarefree_not_maximal += (sf && !max) as u64;
        });
        c
    });
    let init = BoxCounts { n, x, ..Default::default() };
    Ok(parts.iter().fold(init, BoxCounts::merge))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    /// `squarefree` or `maximal`.
    pub experiment: String,
    pub n: usize,
    #[serde(rename = "X")]
    pub x: u64,
    pub total: u64,
    pub hits: u64,
    pub zero_disc: u64,
    /// `hits/total` in lowest terms.
    pub empirical: String,
    pub empirical_value: f64,
    pub theoretical: f64,
    pub theoretical_name: String,
    /// Primes up to this bound enter the Euler product.
    pub euler_bound: u64,
    /// Bound on the distance from the truncated to the full product.
    pub euler_tail: f64,
    pub abs_error: f64,
    /// Squarefree-discriminant polynomials that are not maximal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implication_failures: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl DensityReport {
    fn new(experiment: &str, c: &BoxCounts, hits: u64, name: &str, theory: Truncated) -> Self {
        let empirical_value = hits as f64 / c.total as f64;
        DensityReport {
            experiment: experiment.into(),
            n: c.n,
            x: c.x,
            total: c.total,
            hits,
            zero_disc: c.zero_disc,
            empirical: ratio_string(hits, c.total),
            empirical_value,
            theoretical: theory.value,
            theoretical_name: name.into(),
            euler_bound: theory.bound,
            euler_tail: theory.tail,
            abs_error: (empirical_value - theory.value).abs(),
            implication_failures: None,
            wall_time: None,
        }
    }
}

impl Report for DensityReport {
    fn clear_timing(&mut self) {
        self.wall_time = None;
    }

    fn write_csv<W: std::io::Write>(&self, out: &mut csv::Writer<W>) -> RunResult<()> {
        out.write_record(["experiment", "n", "X", "total", "hits", "empirical", "theoretical", "abs_error"])?;
        out.write_record([
            self.experiment.clone(),
            self.n.to_string(),
            self.x.to_string(),
            self.total.to_string(),
            self.hits.to_string(),
            self.empirical_value.to_string(),
            self.theoretical.to_string(),
            self.abs_error.to_string(),
        ])?;
        Ok(())
    }
}

/// Squarefree-discriminant density of the box against the truncated `λ_n`.
pub fn squarefree_report(c: &BoxCounts) -> DensityReport {
    let name = format!("lambda_{} truncated at p <= {EULER_BOUND}", c.n);
    DensityReport::new("squarefree", c, c.squarefree, &name, lambda_n_truncated(c.n, EULER_BOUND))
}

/// Maximal-order density of the box against the truncated `∏(1 − 1/p²)`.
pub fn maximal_report(c: &BoxCounts) -> DensityReport {
    let (name, theory) = if c.n == 1 {
        ("1 (every linear polynomial is maximal)".to_string(), Truncated { value: 1.0, bound: 0, tail: 0.0 })
    } else {
        (format!("6/pi^2 truncated at p <= {EULER_BOUND}"), rho_truncated(EULER_BOUND))
    };
    let mut r = DensityReport::new("maximal", c, c.maximal, &name, theory);
    r.implication_failures = Some(c.squarefree_not_maximal);
    r
}

/// Both density reports from a single pass over the box.
pub fn density_pair(n: usize, x: u64, pool: &Pool, budget: &Budget) -> RunResult<(DensityReport, DensityReport)> {
    let (counts, secs) = timed(|| box_counts(n, x, pool, budget));
    let counts = counts?;
    let mut sf = squarefree_report(&counts);
    let mut max = maximal_report(&counts);
    sf.wall_time = Some(secs);
    max.wall_time = Some(secs);
    Ok((sf, max))
}

pub fn squarefree_density_experiment(n: usize, x: u64, pool: &Pool, budget: &Budget) -> RunResult<DensityReport> {
    Ok(density_pair(n, x, pool, budget)?.0)
}

pub fn maximality_density_experiment(n: usize, x: u64, pool: &Pool, budget: &Budget) -> RunResult<DensityReport> {
    Ok(density_pair(n, x, pool, budget)?.1)
}

/// Both sides of `#{Δ squarefree} = Σ_m μ(m)·#{m² | Δ}` over the nonzero
/// discriminants of a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveCheck {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: u64,
    pub total: u64,
    /// Excluded from both sides.
    pub zero_disc: u64,
    /// Squarefree count from factoring each discriminant.
    pub lhs: u64,
    /// The Möbius sum, counting divisibility directly for each `m`.
    pub rhs: i64,
    /// Squarefree `m` with `m² <= max |Δ|`.
    pub moduli: u64,
    pub max_abs_disc: String,
    pub equal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl Report for SieveCheck {
    fn clear_timing(&mut self) {
        self.wall_time = None;
    }

    fn write_csv<W: std::io::Write>(&self, out: &mut csv::Writer<W>) -> RunResult<()> {
        out.write_record(["n", "X", "total", "zero_disc", "lhs", "rhs", "moduli", "equal"])?;
        out.write_record([
            self.n.to_string(),
            self.x.to_string(),
            self.total.to_string(),
            self.zero_disc.to_string(),
            self.lhs.to_string(),
            self.rhs.to_string(),
            self.moduli.to_string(),
            self.equal.to_string(),
        ])?;
        Ok(())
    }
}

pub fn mobius_sieve_identity_check(n: usize, x: u64, pool: &Pool, budget: &Budget) -> RunResult<SieveCheck> {
    let (check, secs) = timed(|| sieve_check_inner(n, x, pool, budget));
    let mut check = check?;
    check.wall_time = Some(secs);
    Ok(check)
}

fn sieve_check_inner(n: usize, x: u64, pool: &Pool, budget: &Budget) -> RunResult<SieveCheck> {
    let spec = BoxSpec::new(n, x, budget.boxes())?;
    let an = Analyzer::for_box(&spec);
    let parts = pool.map_chunks(spec.size(), CHUNK, |_, range| {
        let mut values = Vec::new();
        let (mut zero, mut sf, mut too_big) = (0u64, 0u64, false);
        spec.for_each(range, |a| {
            let res = an.analyze(a);
            match &res.disc {
                Disc::Small(0) => zero += 1,
                Disc::Small(d) => values.push(d.unsigned_abs()),
                Disc::Big(d) if d.bits() == 0 => zero += 1,
                Disc::Big(d) => match disc_sieve_core::arith::abs_u128(d) {
                    Some(v) => values.push(v),
                    None => too_big = true,
                },
            }
            sf += res.squarefree() as u64;
        });
        (values, zero, sf, too_big)
    });
    if parts.iter().any(|p| p.3) {
        return Err(RunError::invalid("discriminants exceed 128 bits; use a smaller box"));
    }
    let zero_disc: u64 = parts.iter().map(|p| p.1).sum();
    let lhs: u64 = parts.iter().map(|p| p.2).sum();
    let values: Vec<u128> = parts.into_iter().flat_map(|p| p.0).collect();
    let max = values.iter().copied().max().unwrap_or(0);
    let mmax = isqrt_u128(max) as u64;
    let work = mmax as u128 * values.len() as u128;
    if work > budget.boxes() {
        return Err(Error::BudgetExceeded { needed: work, budget: budget.boxes() }.into());
    }
    let small: Option<Vec<u64>> = values.iter().map(|&v| u64::try_from(v).ok()).collect();
    let terms = pool.map_chunks(mmax as u128, 64, |_, range| {
        let mut sum = 0i64;
        let mut moduli = 0u64;
        for m in range.start as u64 + 1..=range.end as u64 {
            let mu = mobius(m) as i64;
            if mu == 0 {
                continue;
            }
            moduli += 1;
            let m2 = m as u128 * m as u128;
            let hits = match (&small, u64::try_from(m2)) {
                (Some(vs), Ok(m2)) => vs.iter().filter(|&&v| v % m2 == 0).count(),
                _ => values.iter().filter(|&&v| v % m2 == 0).count(),
            };
            sum += mu * hits as i64;
        }
        (sum, moduli)
    });
    let rhs = terms.iter().map(|t| t.0).sum();
    Ok(SieveCheck {
        n,
        x,
        total: spec.size() as u64,
        zero_disc,
        lhs,
        rhs,
        moduli: terms.iter().map(|t| t.1).sum(),
        max_abs_disc: max.to_string(),
        equal: lhs as i64 == rhs,
        wall_time: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailRow {
    #[serde(rename = "M")]
    pub m: u64,
    /// Polynomials with `m² | Δ` for some squarefree `m > M`; `Δ = 0` counts.
    pub count: u64,
    /// The same with `Δ ≠ 0`.
    pub count_nonzero: u64,
}

/// How often `p² | Δ ≠ 0` happens strongly or weakly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSplit {
    pub p: u64,
    pub strong: u64,
    pub weak: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: u64,
    pub total: u64,
    pub squarefree: u64,
    pub zero_disc: u64,
    pub rows: Vec<TailRow>,
    pub primes: Vec<PrimeSplit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl Report for TailReport {
    fn clear_timing(&mut self) {
        self.wall_time = None;
    }

    fn write_csv<W: std::io::Write>(&self, out: &mut csv::Writer<W>) -> RunResult<()> {
        out.write_record(["M", "count", "count_nonzero"])?;
        for r in &self.rows {
            out.serialize((r.m, r.count, r.count_nonzero))?;
        }
        Ok(())
    }
}

/// `1, 2, 4, …` up to the first power of two past `√(max |Δ|)`.
pub fn default_thresholds(n: usize, x: u64, budget: &Budget) -> RunResult<Vec<u64>> {
    let spec = BoxSpec::new(n, x, budget.boxes())?;
    let top = isqrt_u128(disc_bound(&spec)).min(u64::MAX as u128 / 2) as u64;
    let mut out = vec![1u64];
    while *out.last().unwrap() <= top {
        out.push(out.last().unwrap() * 2);
    }
    Ok(out)
}

pub fn tail_counts(n: usize, x: u64, thresholds: &[u64], pool: &Pool, budget: &Budget) -> RunResult<TailReport> {
    let mut ms = thresholds.to_vec();
    ms.sort_unstable();
    ms.dedup();
    if ms.is_empty() {
        return Err(RunError::invalid("at least one threshold M is needed"));
    }
    let (out, secs) = timed(|| -> RunResult<TailReport> {
        let spec = BoxSpec::new(n, x, budget.boxes())?;
        let an = Analyzer::for_box(&spec);
        #[derive(Default)]
        struct Part {
            count: Vec<u64>,
            nonzero: Vec<u64>,
            split: BTreeMap<u64, (u64, u64)>,
            squarefree: u64,
            zero: u64,
        }
        let parts = pool.map_chunks(spec.size(), CHUNK, |_, range| {
            let mut part = Part { count: vec![0; ms.len()], nonzero: vec![0; ms.len()], ..Default::default() };
            spec.for_each(range, |a| {
                let res = an.analyze(a);
                if res.disc.is_zero() {
                    part.zero += 1;
                    part.count.iter_mut().for_each(|c| *c += 1);
                    return;
                }
                if res.squarefree() {
                    part.squarefree += 1;
                    return;
                }
                let rad = res.square_primes.radical();
                for (i, &m) in ms.iter().enumerate() {
                    if rad > m as u128 {
                        part.count[i] += 1;
                        part.nonzero[i] += 1;
                    }
                }
                for &p in res.square_primes.as_slice() {
                    let e = part.split.entry(p).or_default();
                    match an.tag_at(a, p) {
                        P2Tag::Strong => e.0 += 1,
                        P2Tag::Weak => e.1 += 1,
                        _ => unreachable!("p² divides a nonzero discriminant"),
                    }
                }
            });
            part
        });
        let mut count = vec![0u64; ms.len()];
        let mut nonzero = vec![0u64; ms.len()];
        let mut split: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
        let (mut squarefree, mut zero) = (0, 0);
        for part in parts {
            count.iter_mut().zip(&part.count).for_each(|(a, b)| *a += b);
            nonzero.iter_mut().zip(&part.nonzero).for_each(|(a, b)| *a += b);
            for (p, (s, w)) in part.split {
                let e = split.entry(p).or_default();
                e.0 += s;
                e.1 += w;
            }
            squarefree += part.squarefree;
            zero += part.zero;
        }
        Ok(TailReport {
            n,
            x,
            total: spec.size() as u64,
            squarefree,
            zero_disc: zero,
            rows: ms
                .iter()
                .enumerate()
                .map(|(i, &m)| TailRow { m, count: count[i], count_nonzero: nonzero[i] })
                .collect(),
            primes: split.into_iter().map(|(p, (strong, weak))| PrimeSplit { p, strong, weak }).collect(),
            wall_time: None,
        })
    });
    let mut out = out?;
    out.wall_time = Some(secs);
    Ok(out)
}

pub const REDUCIBLE_SCOPE: &str =
    "reducible over Q only; even-degree f that factor as g(x)*conj(g)(x) over a quadratic field are not detected";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducibleReport {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: u64,
    pub total: u64,
    pub reducible: u64,
    pub fraction: String,
    pub fraction_value: f64,
    pub scope: String,
    /// For `n = 2`: polynomials where "reducible" and "Δ is a square" disagree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square_disc_disagreements: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl Report for ReducibleReport {
    fn clear_timing(&mut self) {
        self.wall_time = None;
    }

    fn write_csv<W: std::io::Write>(&self, out: &mut csv::Writer<W>) -> RunResult<()> {
        out.write_record(["n", "X", "total", "reducible", "fraction"])?;
        out.serialize((self.n, self.x, self.total, self.reducible, self.fraction_value))?;
        Ok(())
    }
}

pub fn reducible_count(n: usize, x: u64, pool: &Pool, budget: &Budget) -> RunResult<ReducibleReport> {
    let (out, secs) = timed(|| -> RunResult<ReducibleReport> {
        let spec = BoxSpec::new(n, x, budget.boxes())?;
        let parts = pool.map_chunks(spec.size(), CHUNK, |_, range| {
            let (mut red, mut disagree) = (0u64, 0u64);
            spec.for_each(range, |a| {
                let r = MonicPoly::from_i64(a).expect("n >= 1").is_reducible_over_q();
                red += r as u64;
                if n == 2 {
                    let d = a[0] as i128 * a[0] as i128 - 4 * a[1] as i128;
                    let square = d >= 0 && {
                        let s = isqrt_u128(d as u128);
                        s * s == d as u128
                    };
                    disagree += (square != r) as u64;
                }
            });
            (red, disagree)
        });
        let total = spec.size() as u64;
        let reducible = parts.iter().map(|p| p.0).sum();
        Ok(ReducibleReport {
            n,
            x,
            total,
            reducible,
            fraction: ratio_string(reducible, total),
            fraction_value: reducible as f64 / total as f64,
            scope: REDUCIBLE_SCOPE.into(),
            square_disc_disagreements: (n == 2).then(|| parts.iter().map(|p| p.1).sum()),
            wall_time: None,
        })
    });
    let mut out = out?;
    out.wall_time = Some(secs);
    Ok(out)
}
