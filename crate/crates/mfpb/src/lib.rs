//! File formats, CSV ingestion and the `mfpb` command line on top of
//! [`mfpb_core`].

pub mod bundle;
pub mod commands;
pub mod data;
pub mod error;
pub mod json;
pub mod model;
pub mod pipeline;
pub mod schema;

pub use error::{CliError, Result};

/// Sizes the global rayon pool from `MMM_BOOST_THREADS` (unset or 0: one
/// thread per core). Call once, before any training.
pub fn init_threads() -> Result<()> {
    let n = match std::env::var("MMM_BOOST_THREADS") {
        Err(_) => return Ok(()),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("MMM_BOOST_THREADS must be a non-negative integer, got '{v}'")))?,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}
