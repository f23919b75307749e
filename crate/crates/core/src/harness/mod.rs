//! Scenario files, artifact writing and the acceptance runner behind the CLI.

mod acceptance;
mod builtin;
mod run;
mod scenario;

use thiserror::Error;

pub use acceptance::{run_acceptance, AcceptanceConfig, AcceptanceReport, CriterionResult, CRITERIA};
pub use builtin::{builtin, builtin_names};
pub use run::{run_scenario, Manifest, ManifestFile, RunOptions};
pub use scenario::{
    BuiltScenario, DensitySpec, HamiltonianSpec, ObservableSpec, ProfileSpec, QuantumSpec, Scenario, PROFILE_IDS,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown profile `{0}`; known profiles: {list}", list = PROFILE_IDS.join(", "))]
    UnknownProfile(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid scenario field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("output directory {path}: {message}")]
    Output { path: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl HarnessError {
    pub(crate) fn invalid(field: &str, message: impl Into<String>) -> Self {
        HarnessError::Invalid {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// 1 for configuration problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

macro_rules! numerical_from {
    ($($t:ty),*) => {$(
        impl From<$t> for HarnessError {
            fn from(e: $t) -> Self {
                HarnessError::Numerical(e.to_string())
            }
        }
    )*};
}

numerical_from!(
    crate::flow::FlowError,
    crate::folds::FoldError,
    crate::transport::TransportError,
    crate::quantum::QuantumError
);
