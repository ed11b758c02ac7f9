use crate::grid::Axis;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("axis {axis} has {n} points, at least {min} required")]
    AxisTooSmall { axis: Axis, n: usize, min: usize },

    #[error("field shapes do not match")]
    ShapeMismatch,

    #[error("non-positive density {value:e} at node {index}")]
    NonPositiveDensity { index: usize, value: f64 },

    #[error("non-positive pressure {value:e} at node {index}")]
    NonPositivePressure { index: usize, value: f64 },

    #[error("zero pivot in tridiagonal elimination at row {row}")]
    ZeroPivot { row: usize },

    #[error("filter strength alpha = {0} outside the admissible interval")]
    BadAlpha(f64),

    #[error("{what} = {value} outside its domain")]
    DomainError { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("structure-function model requires dx = dy = dz")]
    AnisotropicGridUnsupported,

    #[error("grid does not match the case domain: {0}")]
    DomainMismatch(String),

    #[error("Biot-Savart quadrature not converged: peak speed {coarse:e} vs {fine:e}")]
    QuadratureNotConverged { coarse: f64, fine: f64 },

    #[error("energy spectrum requires a cubic grid")]
    NonCubicGrid,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("solver blow-up: {0}")]
    SolverBlowUp(String),
}
