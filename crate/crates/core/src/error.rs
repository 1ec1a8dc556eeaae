use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadratic form is elliptic (k = {k}, d = {d}); no real null directions")]
    EllipticForm { d: usize, k: usize },

    #[error("point outside chart domain: eta_1 = {eta1} not in [{lo}, {hi}]")]
    OutsideChart { eta1: f64, lo: f64, hi: f64 },

    #[error("field is in {found} space, expected {expected} space")]
    WrongSpace {
        expected: &'static str,
        found: &'static str,
    },

    #[error("multiplier is singular at a grid frequency ({0}); use the principal value route")]
    GridSingularity(String),

    #[error("level window too small: residual {residual:.3e} exceeds {tolerance:.1e}")]
    WindowTooSmall { residual: f64, tolerance: f64 },

    #[error("quadrature did not converge: last change {change:.3e} with {nodes} nodes per axis")]
    NonConvergence { change: f64, nodes: usize },

    #[error("spectral mass outside atlas coverage: leakage {0:.3e}")]
    AtlasLeakage(f64),

    #[error("iterate vanished during norm estimation")]
    ZeroIterate,

    #[error("operator failed the superposition test (defect {0:.3e})")]
    NonLinear(f64),

    #[error("grid of {points} points exceeds the memory budget of {budget}")]
    MemoryBudget { points: usize, budget: usize },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
