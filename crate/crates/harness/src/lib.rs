//! Experiment configs, body corpora and the verification campaigns behind the
//! `olcb` command line tool.

pub mod campaigns;
pub mod config;
pub mod corpus;
pub mod rows;

pub use campaigns::{run, Command, Outcome};
pub use config::ExperimentConfig;
pub use rows::VerificationRow;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] olcb::Error),
}

/// Reads `OLCB_THREADS` and sizes the global pool; unset or empty means the
/// rayon default.
pub fn init_thread_pool() -> Result<(), HarnessError> {
    let Ok(v) = std::env::var("OLCB_THREADS") else { return Ok(()) };
    if v.trim().is_empty() {
        return Ok(());
    }
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| HarnessError::Config(format!("OLCB_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| HarnessError::Config(e.to_string()))
}
