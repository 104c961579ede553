use thiserror::Error;

/// Errors raised by the numerical and channel layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("entry count {got} does not match shape {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("vector has zero norm")]
    ZeroNorm,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("keep-set for partial trace is empty")]
    EmptyKeepSet,
    #[error("factor index {index} out of range for {count} factors")]
    FactorOutOfRange { index: usize, count: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("matrix has eigenvalue {value:e} below the PSD tolerance")]
    NotPositive { value: f64 },
    #[error("not a density matrix: {reason}")]
    NotDensity { reason: String },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCountOutOfRange { n: usize, min: usize, max: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("qubit {index} listed more than once")]
    DuplicateQubit { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cloning with N={n} inputs requires a pure input state (purity {purity})")]
    MixedInput { n: usize, purity: f64 },
    #[error("map is not trace-preserving on this input (output trace {trace})")]
    NotTracePreserving { trace: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
