use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0}: only 2D and 3D cells are supported")]
    UnsupportedDimension(usize),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("electron count {eta} exceeds mode count {modes}")]
    EtaOutOfRange { eta: usize, modes: usize },

    #[error("coefficient matrix is neither hermitian nor anti-hermitian (asymmetry {asymmetry:.3e})")]
    UnsupportedSymmetry { asymmetry: f64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("brute-force enumeration refused for N = {modes} (limit {limit})")]
    TooLarge { modes: usize, limit: usize },

    #[error("{what} exceeds guard: {size} > {limit}; use the factorized bounds for large systems")]
    GuardExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("Cholesky factorization failed at pivot {pivot} (value {value:.3e}); shift the diagonal with min_pd_shift")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("tensor violates the 8-fold permutational symmetry (max deviation {deviation:.3e})")]
    TensorSymmetry { deviation: f64 },

    #[error("operator does not preserve particle number")]
    NotNumberPreserving,

    #[error("FFFT basis change requires every lattice side to be 8 or 16 (got {0:?}); use the givens basis change")]
    FfftUnsupported(Vec<usize>),

    #[error("infeasible error budget: {0}")]
    InfeasibleBudget(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}
