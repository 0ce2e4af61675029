//! Command-line frontend for the opacity toolkit: model file formats,
//! verdict and patch reports, DOT export, and the bundled example corpus.
//!
//! The reusable pieces live here so that integration tests and scripts can
//! drive the exact code path the binary runs.

use core::fmt;

pub mod corpus;
pub mod format;
pub mod report;
pub mod run;

pub use format::{parse_model, LoadedLts, LoadedModel, LoadedNet};
pub use run::{run, run_and_write, Command, Format, RunConfig, RunOutput};

/// Frontend errors; every message names the file or model element at fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// `(path, cause)`
    Io(String, String),
    /// `(origin, cause)` — malformed JSON or unknown fields.
    Parse(String, String),
    /// `(origin, cause)` — structurally invalid model.
    Model(String, String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(path, cause) => write!(f, "{path}: {cause}"),
            CliError::Parse(origin, cause) => write!(f, "{origin}: {cause}"),
            CliError::Model(origin, cause) => write!(f, "{origin}: {cause}"),
        }
    }
}

impl std::error::Error for CliError {}
