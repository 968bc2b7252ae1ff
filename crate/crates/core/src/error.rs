use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold (e.g. asymmetric detectors
    /// passed to an operation that needs rotational invariance).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid detector configuration: {0}")]
    Config(String),

    /// Kernel table normalization is off by more than the allowed defect.
    #[error("kernel table build failed: normalization defect {defect:.3e} exceeds {tolerance:.1e}")]
    Build { defect: f64, tolerance: f64 },

    #[error("quadrature did not converge: residual {residual:.3e}")]
    Quadrature { residual: f64 },

    #[error("non-finite integrand value at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("outcome {outcome} has zero probability")]
    ZeroProbability { outcome: String },

    #[error("Fermat-Toricelli iteration did not converge after {iterations} iterations (last iterate {last:?})")]
    NonConvergence { iterations: usize, last: [f64; 3] },

    #[error("effect for outcome {outcome} is not positive")]
    InvalidEffect { outcome: String },
}
