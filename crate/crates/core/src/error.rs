//! Crate-wide error type.
//!
//! Variants are grouped by how the CLI maps them to exit codes: infeasible
//! deployments (exit 1), configuration/parse problems (exit 2), and internal
//! report-consistency violations (exit 3).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A single re-operator needs more arrays than the allocated area holds,
    /// so no deployment round can ever contain it.
    #[error("re-operator {op_id} needs {needed} arrays but the allocated area holds only {available}")]
    InfeasibleArea {
        op_id: String,
        needed: u64,
        available: u64,
    },

    /// The split threshold is smaller than one row band of the footprint, so
    /// the operator cannot be cut into pieces that respect it.
    #[error("beta {beta} cannot split a footprint whose row band spans {band_arrays} arrays")]
    InfeasibleBeta { beta: u64, band_arrays: u64 },

    /// Every grid point failed to deploy the tenant into the given area.
    #[error("tenant '{tenant}' cannot be deployed into {area} arrays at any grid point")]
    InfeasibleTenantArea { tenant: String, area: u64 },

    /// The workload as a whole cannot fit the chip; carries the per-tenant
    /// minimum tile requirements for diagnosis.
    #[error("workload infeasible on {tiles} tiles: per-tenant minimums are {minimums:?}")]
    InfeasibleWorkload {
        tiles: u64,
        minimums: Vec<(String, u64)>,
    },

    #[error("unknown preset '{0}' (expected DNN1-DNN4 or VGG11/13/16/19)")]
    UnknownPreset(String),

    #[error("unknown bundle '{0}' (expected MT1-MT8)")]
    UnknownBundle(String),

    #[error("unknown chip '{0}': only chip1 and chip2 have published parameters")]
    UnknownChip(String),

    /// Structural validation failure in a workload or chip description.
    #[error("invalid {context}: {message}")]
    Validation { context: String, message: String },

    /// Syntax or type error in a configuration document.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// An emitted report failed internal-consistency recomputation.
    #[error("report invariant violated: {0}")]
    ReportInvariant(String),
}

impl Error {
    pub fn validation(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            context: context.into(),
            message: message.into(),
        }
    }

    /// Exit code the CLI should report for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleArea { .. }
            | Error::InfeasibleBeta { .. }
            | Error::InfeasibleTenantArea { .. }
            | Error::InfeasibleWorkload { .. } => 1,
            Error::UnknownPreset(_)
            | Error::UnknownBundle(_)
            | Error::UnknownChip(_)
            | Error::Validation { .. }
            | Error::Parse(_)
            | Error::Io { .. } => 2,
            Error::ReportInvariant(_) => 3,
        }
    }
}
