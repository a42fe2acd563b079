use std::io::Write;

use serde::Serialize;

use crate::error::{RunError, RunResult};

/// A serializable experiment result.
pub trait Report: Serialize {
    /// Drops wall-clock fields, leaving only reproducible content.
    fn clear_timing(&mut self) {}

    /// Rows for external plotting tools.
    fn write_csv<W: Write>(&self, _out: &mut csv::Writer<W>) -> RunResult<()> {
        Err(RunError::invalid("this report has no CSV form, use --format json"))
    }

    fn to_json(&self) -> RunResult<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    fn to_csv(&self) -> RunResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        self.write_csv(&mut w)?;
        let bytes = w.into_inner().map_err(|e| RunError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

impl Report for serde_json::Value {}

/// Runs `f` and returns its value with the elapsed seconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}
