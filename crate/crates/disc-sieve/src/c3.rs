//! Area of the cubic region `{(a₂, a₃) : |4a₂³ + 27a₃²| < 1}`.
//!
//! For each `a₂` the slice in `a₃` is one or two intervals of known length,
//! so the estimator samples `a₂` only. The bounded part `[−1, 4^{−1/3}]` is
//! sampled uniformly; the tail `a₂ = −t`, `1 <= t <= T`, is importance-sampled
//! with density proportional to `t^{−3/2}`, which matches the decay of the
//! slice length. The region beyond `t = T` is covered by an analytic bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{RunError, RunResult};
use crate::pool::Pool;
use crate::report::{timed, Report};

/// `(2^{1/3}(3+√3)/45)·Γ(1/2)Γ(1/6)/Γ(2/3)`, evaluated once with `libm::tgamma`.
pub const C3_CLOSED_FORM: f64 = 0.965309364879967;

pub const MIN_SAMPLES: u64 = 100_000;

/// A truncation whose tail bound exceeds this fraction of the estimate is flagged.
pub const TAIL_FLAG: f64 = 0.01;

/// Right end of the region, `4^{−1/3}`.
const A2_MAX: f64 = 0.629_960_524_947_436_6;

const CHUNK: u128 = 1 << 14;

pub fn closed_form() -> f64 {
    let g = libm::tgamma;
    libm::cbrt(2.0) * (3.0 + libm::sqrt(3.0)) / 45.0 * g(0.5) * g(1.0 / 6.0) / g(2.0 / 3.0)
}

/// Length of `{a₃ : |4a₂³ + 27a₃²| < 1}`.
pub fn slice_width(a2: f64) -> f64 {
    // with u = −4a₂³ the condition is u − 1 < 27a₃² < u + 1
    let u = -4.0 * a2 * a2 * a2;
    if u <= -1.0 {
        0.0
    } else if u <= 1.0 {
        2.0 * libm::sqrt((u + 1.0) / 27.0)
    } else {
        4.0 / (libm::sqrt(27.0) * (libm::sqrt(u + 1.0) + libm::sqrt(u - 1.0)))
    }
}

/// Area with `a₂ < −T`: the slice length is at most `2/(9 t^{3/2})` there.
pub fn tail_bound(truncation: f64) -> f64 {
    4.0 / (9.0 * libm::sqrt(truncation))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C3Report {
    pub samples: u64,
    pub seed: u64,
    /// The region is sampled for `a₂ >= −truncation`.
    pub truncation: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub tail_bound: f64,
    /// Set when `tail_bound > 1%` of the estimate.
    pub truncation_too_small: bool,
    pub closed_form: f64,
    pub rel_error: f64,
    pub estimator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl Report for C3Report {
    fn clear_timing(&mut self) {
        self.wall_time = None;
    }

    fn write_csv<W: std::io::Write>(&self, out: &mut csv::Writer<W>) -> RunResult<()> {
        out.write_record(["samples", "truncation", "estimate", "std_error", "tail_bound", "closed_form", "rel_error"])?;
        out.serialize((
            self.samples,
            self.truncation,
            self.estimate,
            self.std_error,
            self.tail_bound,
            self.closed_form,
            self.rel_error,
        ))?;
        Ok(())
    }
}

/// Sum and sum of squares of `draw` over the chunks of `0..count`, chunk `k`
/// drawing from ChaCha stream `stratum·2³² + k`.
fn stratum_moments(pool: &Pool, count: u64, seed: u64, stratum: u64, draw: impl Fn(f64) -> f64 + Sync + Send) -> (f64, f64) {
    let parts = pool.map_chunks(count as u128, CHUNK, |k, range| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stratum << 32 | k);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in range {
            let v = draw(rng.random::<f64>());
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1))
}

pub fn c3_volume(samples: u64, truncation: f64, seed: u64, pool: &Pool) -> RunResult<C3Report> {
    if samples < MIN_SAMPLES {
        return Err(RunError::invalid(format!("c3vol needs at least {MIN_SAMPLES} samples")));
    }
    if !truncation.is_finite() || truncation <= 1.0 {
        return Err(RunError::invalid("truncation must be a finite number greater than 1"));
    }
    let ((estimate, std_error), secs) = timed(|| {
        let na = samples / 2;
        let nb = samples - na;
        let len_a = 1.0 + A2_MAX;
        let (sa, sa2) = stratum_moments(pool, na, seed, 0, |u| slice_width(-1.0 + u * len_a));
        let mass = 1.0 - 1.0 / libm::sqrt(truncation);
        let (sb, sb2) = stratum_moments(pool, nb, seed, 1, |u| {
            let t = 1.0 / ((1.0 - u * mass) * (1.0 - u * mass));
            let pdf = 1.0 / (2.0 * mass * t * libm::sqrt(t));
            slice_width(-t) / pdf
        });
        let (ma, mb) = (sa / na as f64, sb / nb as f64);
        let va = (sa2 / na as f64 - ma * ma).max(0.0) / na as f64;
        let vb = (sb2 / nb as f64 - mb * mb).max(0.0) / nb as f64;
        (len_a * ma + mb, libm::sqrt(len_a * len_a * va + vb))
    });
    let tail = tail_bound(truncation);
    Ok(C3Report {
        samples,
        seed,
        truncation,
        estimate,
        std_error,
        tail_bound: tail,
        truncation_too_small: tail > TAIL_FLAG * estimate,
        closed_form: C3_CLOSED_FORM,
        rel_error: (estimate - C3_CLOSED_FORM).abs() / C3_CLOSED_FORM,
        estimator: "a3 slice lengths exact, a2 sampled (uniform on [-1, 4^(-1/3)], t^(-3/2) importance on [1, T])".into(),
        wall_time: Some(secs),
    })
}
