use thiserror::Error;

/// Errors raised by the simulator, the tomography pipeline and the runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("state is not normalized (norm² = {0:.15})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid process matrix: {0}")]
    InvalidChi(String),

    #[error("unsupported qubit count {0} (1 to 3 qubits)")]
    QubitCount(usize),

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("parameter `{name}` out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("zero-trace argument")]
    ZeroTrace,

    #[error("no success after {rounds} rounds ({queries} oracle queries)")]
    RoundsExhausted { rounds: usize, queries: usize },

    #[error("maximum-likelihood optimizer did not converge after {iterations} iterations (final NLL {nll})")]
    NotConverged {
        iterations: usize,
        nll: f64,
        /// Last iterate, trace-normalized.
        chi: Box<crate::qmath::ComplexMatrix>,
    },

    #[error("invalid `{field}`: {message}")]
    Usage { field: &'static str, message: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the caller's configuration rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
