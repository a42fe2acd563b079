//! Threaded experiments, report formats and the command-line front end for
//! [`disc_sieve_core`].
//!
//! Every experiment takes a [`Pool`] and produces a serializable report whose
//! content depends only on its parameters and seed, never on the thread count.

pub mod budget;
pub mod c3;
pub mod error;
pub mod format;
pub mod lab;
pub mod monogenic;
pub mod pool;
pub mod report;

pub use budget::Budget;
pub use error::{RunError, RunResult};
pub use pool::Pool;
pub use report::Report;
