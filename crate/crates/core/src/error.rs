use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("insufficient coverage: {0}")]
    Coverage(String),

    #[error("engine {engine} cannot evaluate on the {axis} axis")]
    EngineAxisMismatch { engine: String, axis: String },

    #[error("phase unwrap failed near omega = {0}")]
    PhaseUnwrap(f64),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("imaginary residue {residue:e} exceeds tolerance for result {value:e}")]
    ImaginaryResidue { residue: f64, value: f64 },

    #[error("integral diverged: {0}")]
    Divergence(String),

    #[error("numerical instability: {0}")]
    Instability(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// Non-fatal diagnostics raised by evaluations that still produce a value.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// An exponential-integral argument came close to the negative real axis.
    BranchCut { argument: (f64, f64) },
    /// A Fourier-series abscissa lies beyond half the period.
    Aliasing { x: f64, half_period: f64 },
    /// A CDF value fell outside `[0, 1]` by more than the clamp tolerance.
    OutOfRange { x: f64, raw: f64 },
}
