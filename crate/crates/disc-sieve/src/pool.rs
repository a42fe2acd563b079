use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{RunError, RunResult};

/// A fixed number of worker threads.
///
/// Work is always cut into the same chunks whatever the thread count, and
/// results come back in chunk order, so merged output is reproducible.
#[derive(Debug, Clone)]
pub struct Pool {
    threads: usize,
    inner: Arc<rayon::ThreadPool>,
}

impl Pool {
    pub fn new(threads: usize) -> RunResult<Self> {
        if threads == 0 {
            return Err(RunError::invalid("--threads must be at least 1"));
        }
        let inner = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| RunError::invalid(format!("cannot start worker pool: {e}")))?;
        Ok(Pool { threads, inner: Arc::new(inner) })
    }

    pub fn single() -> Self {
        Self::new(1).expect("one thread")
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// `work(k, range_k)` for the consecutive chunks of `0..total`, in order.
    pub fn map_chunks<T, F>(&self, total: u128, chunk: u128, work: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, Range<u128>) -> T + Sync + Send,
    {
        assert!(chunk > 0);
        let count = total.div_ceil(chunk) as u64;
        let range = |k: u64| k as u128 * chunk..((k as u128 + 1) * chunk).min(total);
        self.inner.install(|| (0..count).into_par_iter().map(|k| work(k, range(k))).collect())
    }
}
