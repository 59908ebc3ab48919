//! Error and warning types shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MoyalError {
    /// A domain type's construction invariant was violated.
    #[error("construction error: {0}")]
    Construction(String),

    /// An operation required θ⁻¹ but the matrix is singular.
    #[error("theta matrix is singular but an inverse is required")]
    SingularTheta,

    /// Symbol variants incompatible with the requested operation.
    #[error("representation error: {0}")]
    Representation(String),

    /// Requested spectral derivative order exceeds the trustworthy band.
    #[error("spectral order {requested} exceeds reliable band {max} (N/4)")]
    SpectralOrder { requested: usize, max: usize },

    /// Two grid symbols live on different grids.
    #[error("grid mismatch: operands live on different phase grids")]
    GridMismatch,

    /// NaN or infinity produced by a quadrature kernel.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Zero norm, empty coefficient map, or similar degenerate input.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Geometric ratio ≥ 1: outside the absolute-convergence regime.
    #[error("series diverges: geometric ratio {ratio} is not < 1")]
    DivergentSeries { ratio: f64 },

    /// Approximation-of-identity profile must satisfy e(0) = 1.
    #[error("normalization error: e(0) = {value} differs from 1 beyond 1e-12")]
    Normalization { value: String },

    /// Experiment configuration could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    /// Unknown CLI topic or malformed invocation.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MoyalError>;

/// Non-fatal diagnostics. Operations that can produce them return the result
/// anyway, flagged.
#[derive(Debug, Clone, PartialEq)]
pub enum GridWarning {
    /// Symbol mass at the box boundary is too large relative to its peak.
    TooSmall { boundary_ratio: f64, context: String },
    /// An oscillatory kernel's frequency exceeds the grid's Nyquist band.
    BandExceeded { frequency: f64, nyquist: f64 },
}

impl std::fmt::Display for GridWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GridWarning::TooSmall { boundary_ratio, context } => write!(
                f,
                "grid too small: boundary/peak ratio {boundary_ratio:.3e} ({context})"
            ),
            GridWarning::BandExceeded { frequency, nyquist } => write!(
                f,
                "kernel frequency {frequency:.3e} exceeds Nyquist {nyquist:.3e}"
            ),
        }
    }
}

/// A value together with any non-fatal warnings raised while computing it.
#[derive(Debug, Clone)]
pub struct Flagged<X> {
    pub value: X,
    pub warnings: Vec<GridWarning>,
}

impl<X> Flagged<X> {
    pub fn clean(value: X) -> Self {
        Flagged { value, warnings: Vec::new() }
    }

    pub fn with(value: X, warnings: Vec<GridWarning>) -> Self {
        Flagged { value, warnings }
    }

    pub fn map<Y>(self, f: impl FnOnce(X) -> Y) -> Flagged<Y> {
        Flagged { value: f(self.value), warnings: self.warnings }
    }
}
