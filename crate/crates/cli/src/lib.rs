//! Experiment runner for the `igsub` library: path simulation, the
//! verification suites and command-line function evaluation.

pub mod config;
pub mod eval;
pub mod report;
pub mod simulate;
pub mod suites;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] igsub::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}
