//! Command-line runner for lplab: configuration handling, command dispatch
//! and CSV/JSON artifact emission.

pub mod config;
pub mod report;
pub mod run;

use std::path::Path;

use thiserror::Error;

pub use config::{Command, RunConfig};
pub use report::{Outcome, Row, Status};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io(_) => 1,
        }
    }
}

/// Sizes the global thread pool from `LPLAB_THREADS` when it is set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LPLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("LPLAB_THREADS={raw:?} is not a positive integer")))?;
    // A pool may already exist when called twice in one process; the first size wins.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the configured command and writes its artifacts under
/// `cfg.io.output`. Computation errors are recorded in the summary and
/// reported as [`Status::Error`].
pub fn run_config(cfg: &RunConfig) -> Result<(Outcome, report::Written), CliError> {
    // The output directory is left out so that runs into different
    // directories produce identical summaries.
    let mut echo = serde_json::to_value(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(io) = echo.get_mut("io").and_then(|v| v.as_object_mut()) {
        io.remove("output");
    }
    let (outcome, error) = match run::execute(cfg) {
        Ok(o) => (o, None),
        Err(e) => (
            Outcome::new(Status::Error, format!("error: {e}"), Vec::new(), serde_json::Value::Null),
            Some(e.to_string()),
        ),
    };
    let written = report::write_outcome(Path::new(&cfg.io.output), &cfg.command.to_string(), &echo, &outcome, error)?;
    Ok((outcome, written))
}
