use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} exceeds {tolerance:e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("eigensolver did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("function undefined at {at}")]
    DomainError { at: String },
    #[error("function order {available} is below the required order {required}")]
    OrderTooLow { required: usize, available: usize },
    #[error("resolvent pole must be off the real axis")]
    RealPole,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("symbol undefined at eigenvalue tuple {at}")]
    SymbolDomainError { at: String },
    #[error("first and third spectra differ")]
    SpectraMismatch,
    #[error("h kernel requested on the diagonal (|x - y| = {gap:e})")]
    DiagonalInput { gap: f64 },
    #[error("quadrature needs at least 2 nodes, got {nodes}")]
    BadQuadrature { nodes: usize },
    #[error("independent evaluation paths disagree: {first} vs {second}")]
    InternalInconsistency { first: String, second: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    /// Stable variant name, used in machine-readable reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DomainError { .. } => "DomainError",
            Error::OrderTooLow { .. } => "OrderTooLow",
            Error::RealPole => "RealPole",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::SymbolDomainError { .. } => "SymbolDomainError",
            Error::SpectraMismatch => "SpectraMismatch",
            Error::DiagonalInput { .. } => "DiagonalInput",
            Error::BadQuadrature { .. } => "BadQuadrature",
            Error::InternalInconsistency { .. } => "InternalInconsistency",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Format(_) => "Format",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
