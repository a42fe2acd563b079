//! Enumeration budgets. `DISC_SIEVE_BUDGET` replaces every default at once.

use disc_sieve_core::disc_class::ORACLE_BUDGET;
use disc_sieve_core::lattice::ENUM_BUDGET;
use disc_sieve_core::local_density::SWEEP_BUDGET;
use disc_sieve_core::sieve::BOX_BUDGET;

use crate::error::{RunError, RunResult};

pub const BUDGET_ENV: &str = "DISC_SIEVE_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    fixed: Option<u128>,
}

impl Budget {
    /// The built-in defaults.
    pub fn defaults() -> Self {
        Budget { fixed: None }
    }

    /// One ceiling for every enumeration.
    pub fn fixed(limit: u128) -> Self {
        Budget { fixed: Some(limit) }
    }

    /// Defaults, or the value of `DISC_SIEVE_BUDGET` when set.
    pub fn from_env() -> RunResult<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u128>()
                .map(Budget::fixed)
                .map_err(|_| RunError::invalid(format!("{BUDGET_ENV} must be a non-negative integer, got {v:?}"))),
            Err(std::env::VarError::NotPresent) => Ok(Budget::defaults()),
            Err(e) => Err(RunError::invalid(format!("{BUDGET_ENV}: {e}"))),
        }
    }

    /// Polynomials in a height box, and work units of the box experiments.
    pub fn boxes(&self) -> u128 {
        self.fixed.unwrap_or(BOX_BUDGET)
    }

    /// Residue classes in a local density sweep.
    pub fn sweep(&self) -> u128 {
        self.fixed.unwrap_or(SWEEP_BUDGET)
    }

    /// Perturbation classes for the strong-divisibility oracles.
    pub fn oracle(&self) -> u128 {
        self.fixed.unwrap_or(ORACLE_BUDGET)
    }

    /// Enumeration nodes per lattice reduction.
    pub fn lattice(&self) -> u64 {
        self.fixed.map_or(ENUM_BUDGET, |b| b.min(u64::MAX as u128) as u64)
    }
}
