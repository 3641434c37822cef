use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} is too small for {what} (need at least {min})")]
    DimensionTooSmall {
        what: &'static str,
        dim: usize,
        min: usize,
    },

    #[error("index out of range: {index} (dimension {dim})")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("sectional curvature needs two distinct indices, got ({0}, {0})")]
    DegeneratePlane(usize),

    #[error("frame is not orthonormal (max defect {defect:e})")]
    NonOrthonormalFrame { defect: f64 },

    #[error("bilinear form is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("metric is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("pullback metric has a negative eigenvalue {0:e}")]
    NegativePullback(f64),

    #[error("invalid singular values: {0}")]
    InvalidSingularValues(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("no curvature tensor available for {0}")]
    NoTensor(&'static str),

    #[error("background extinct at t = {t} (extinction time {t_max})")]
    Extinct { t: f64, t_max: f64 },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("shift parameter: theta_1221 + alpha = {0:e} must be positive")]
    NonPositiveShift(f64),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("optimization did not converge (best value reached {best})")]
    NotConverged { best: f64 },

    #[error("graph ceased to be controlled: {0}")]
    GraphBreakdown(String),

    #[error("time step {dt:e} violates the stability limit {limit:e}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
