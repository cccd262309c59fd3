use thiserror::Error;

use crate::qstate::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("number of qubits must be at least one")]
    ZeroQubits,
    #[error("{n_qubits} qubits exceeds the configured cap of {cap}")]
    TooManyQubits { n_qubits: usize, cap: usize },
    #[error("dimension mismatch: {n_qubits} qubits need {expected} {what}, found {found}")]
    DimensionMismatch {
        n_qubits: usize,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitCountMismatch { expected: usize, found: usize },
    #[error("non-finite number in input")]
    NonFinite,
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(ValidationReport),
    #[error("preset {kind} is not defined for {n_qubits} qubits")]
    UnsupportedPreset { kind: String, n_qubits: usize },
    #[error("visibility {0} outside [0, 1] or given for a preset without one")]
    InvalidVisibility(f64),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("probabilities sum to {sum}, expected 1")]
    ProbabilitySum { sum: f64 },
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    #[error("vector of norm {norm} is not a unit vector")]
    NotUnitVector { norm: f64 },
    #[error("local frame of qubit {qubit} is not orthonormal (residual {residual:e})")]
    NonOrthonormalFrame { qubit: usize, residual: f64 },
    #[error("correlation has imaginary residue {residue:e}")]
    NonRealCorrelation { residue: f64 },
    #[error("correlation table violates the general Bell inequality: {lhs} > {bound}")]
    BellViolation { lhs: f64, bound: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by malformed or physically invalid input, as
    /// opposed to internal numerical failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NonRealCorrelation { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => Error::Schema(e.to_string()),
            _ => Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
        }
    }
}
