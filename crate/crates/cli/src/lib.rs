//! Library side of the `islab` binary: config schema, experiment runner,
//! and cache administration. The binary is a thin clap wrapper.

pub mod config;
pub mod error;
pub mod run;

use std::path::{Path, PathBuf};

use islab_core::complexity::cache;

pub use error::{CliError, CliResult};
pub use run::{execute, run_experiment, RunOptions, RunOutput};

/// Default cache location, overridden by `ISLAB_CACHE_DIR`.
pub const DEFAULT_CACHE_DIR: &str = ".islab-cache";

pub fn cache_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os("ISLAB_CACHE_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheAction {
    Stats,
    Verify,
    Clear,
}

/// Runs one cache command and returns its JSON summary. `verify` renders
/// the full summary even when it fails, then reports the failure.
pub fn cache_admin(action: CacheAction, dir: &Path) -> (String, CliResult<()>) {
    let summary = match action {
        CacheAction::Stats => cache::stats(dir).map(|s| serde_json::to_value(s).expect("stats")),
        CacheAction::Verify => cache::verify(dir).map(|r| serde_json::to_value(r).expect("verify")),
        CacheAction::Clear => cache::clear_stale(dir).map(|n| serde_json::json!({ "removed": n })),
    };
    match summary {
        Err(e) => (String::new(), Err(e.into())),
        Ok(v) => {
            let mut text = serde_json::to_string_pretty(&v).expect("summary");
            text.push('\n');
            let failures = v["failures"].as_array().map_or(0, Vec::len);
            let status = if failures > 0 {
                Err(CliError::Verification(format!("{failures} cache records failed")))
            } else {
                Ok(())
            };
            (text, status)
        }
    }
}
