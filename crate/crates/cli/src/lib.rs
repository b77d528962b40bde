//! Batch surface of the laboratory: TOML run configs, binary snapshots,
//! CSV diagnostics series, criteria reports with SVG plots and the
//! property suites.

pub mod analyze;
pub mod config;
pub mod criteria;
pub mod error;
pub mod plot;
pub mod run;
pub mod series;
pub mod snapshot;

pub use config::RunConfig;
pub use error::{CliError, ExitStatus};
pub use run::{run, RunOutcome};
pub use snapshot::Snapshot;

/// Applies `DYRL_THREADS` to the global rayon pool. Must run before any
/// parallel work.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("DYRL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(vec![format!("DYRL_THREADS must be a positive integer (got `{v}`)")]))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(vec![format!("DYRL_THREADS: {e}")]))
}
