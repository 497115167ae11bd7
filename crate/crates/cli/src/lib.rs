//! Orchestration behind the `drg` command: graph loading, suite selection,
//! report assembly and the split-decomposition cache.

pub mod cache;
pub mod config;
pub mod pipeline;

use rug::Rational;
use splitdec::field::Scalar;
use splitdec::graphs::DistanceData;
use splitdec::scheme::{DualData, SchemeData};
use splitdec::split::{SplitError, SplitSystem};
use thiserror::Error;

pub use config::RunConfig;
pub use pipeline::{cmd_dump, cmd_info, cmd_verify};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("suite inapplicable: {0}")]
    SuiteInapplicable(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// `2` for configuration and applicability errors, `3` otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::SuiteInapplicable(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

/// A split system over the smallest entry type holding the idempotents.
#[derive(Debug, Clone)]
pub enum AnySplit {
    Rational(SplitSystem<Rational>),
    Scalar(SplitSystem<Scalar>),
}

impl AnySplit {
    pub fn build(scheme: &SchemeData, dd: &DistanceData, dual: &DualData) -> Result<Self, SplitError> {
        if scheme.is_rational() {
            SplitSystem::build(scheme, dd, dual).map(AnySplit::Rational)
        } else {
            SplitSystem::build(scheme, dd, dual).map(AnySplit::Scalar)
        }
    }

    pub fn entry_type(&self) -> &'static str {
        match self {
            AnySplit::Rational(_) => "rational",
            AnySplit::Scalar(_) => "scalar",
        }
    }

    pub fn dims_table(&self) -> serde_json::Value {
        match self {
            AnySplit::Rational(s) => s.dims_table(),
            AnySplit::Scalar(s) => s.dims_table(),
        }
    }
}
