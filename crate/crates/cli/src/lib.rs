//! Scenario runner: reads a JSON scenario file, runs the named experiment
//! and writes plot-ready tables.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod scenarios;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown scenario `{0}` (see `cryomux list`)")]
    UnknownScenario(String),
    #[error("invalid scenario file: {0}")]
    Schema(String),
    #[error("{0}")]
    Downstream(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownScenario(_) => 2,
            CliError::Schema(_) => 3,
            CliError::Downstream(_) | CliError::Io(_) => 4,
        }
    }

    pub(crate) fn downstream(e: impl std::fmt::Display) -> Self {
        CliError::Downstream(e.to_string())
    }
}

pub use config::{load_scenario, parse_scenario, ResolvedScenario};
pub use output::{write_outputs, Format};
pub use scenarios::{registry, run_scenario, ScenarioInfo, ScenarioOutput};
