//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Everything that can go wrong while validating, executing, checking or
/// solving. Verdicts (unsafe view, infeasible LP) are not errors; they are
/// returned as values.
#[derive(Debug, Error)]
pub enum Error {
    /// Workflow definition violates a structural invariant. Each entry is
    /// one independent violation with the offending names.
    #[error("workflow validation failed:\n{}", .0.join("\n"))]
    InvalidWorkflow(Vec<String>),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("unknown module `{0}`")]
    UnknownModule(String),

    #[error("value `{value}` is outside the domain of attribute `{attribute}`")]
    ValueOutsideDomain { attribute: String, value: String },

    #[error("input tuple {0:?} does not occur in the relation's input projection")]
    InputNotRealized(Vec<String>),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("module `{module}` has no safe subset for gamma {gamma} (even hiding every attribute)")]
    InfeasibleStandalone { module: String, gamma: u64 },

    #[error("cardinality form unavailable for module `{module}`: {reason}")]
    CardinalityFormUnavailable { module: String, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear program is malformed: {0}")]
    MalformedProgram(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
