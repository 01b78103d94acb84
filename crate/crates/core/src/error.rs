use thiserror::Error;

/// Errors raised by the geometric and spectral routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid form degree {0}: expected 1 or 2")]
    InvalidDegree(usize),

    #[error("point {0:?} is at the origin")]
    AtOrigin([f64; 4]),

    #[error("point at radius {radius} lies outside the annulus ({inner}, {outer})")]
    OutsideAnnulus { radius: f64, inner: f64, outer: f64 },

    #[error("field is not divergence free (residual {residual:e} > {tolerance:e})")]
    NotDivergenceFree { residual: f64, tolerance: f64 },

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("step count must be at least 1")]
    NoSteps,

    #[error("eigen solver failed: {0}")]
    EigenSolver(String),

    #[error("form is covariantly constant; ratio undefined")]
    ConstantForm,

    #[error("|omega| = {0:e} is too small for the ratio to be defined")]
    NearZero(f64),

    #[error("epsilon must be positive for this operation, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("negative parameter {name} = {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("extrapolation unstable: {0}")]
    Unstable(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
