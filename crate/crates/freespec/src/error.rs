use num_complex::Complex64;

/// Errors produced by the spectral pipeline.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid aspect ratio: n = {n} exceeds t = {t}; c = n/t > 1 is not supported")]
    InvalidRatio { n: usize, t: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("row {index} has zero variance and cannot be standardized")]
    DegenerateRow { index: usize },

    #[error("matrix is not symmetric within tolerance (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("evaluation point {z} collides with a spectral pole")]
    Pole { z: Complex64 },

    #[error("principal value on the real axis inside the support [{lo}, {hi}] is not supported")]
    PrincipalValue { lo: f64, hi: f64 },

    #[error("no closed-form Stieltjes transform for this law; build it through the convolution pipeline")]
    UnsupportedAnalytic,

    #[error("functional inversion did not converge: last iterate {last}, residual {residual:e}")]
    InversionFailure { last: Complex64, residual: f64 },

    #[error("contours are misaligned: {0}")]
    MisalignedContour(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("invalid law parameters: {0}")]
    InvalidLaw(String),

    #[error("scale by alpha = {alpha} leaves the invertible range at {failed} of {total} nodes")]
    ScaleRange {
        alpha: f64,
        failed: usize,
        total: usize,
    },

    #[error("convolution failed at {failed} of {total} output nodes")]
    ConvolutionFailure { failed: usize, total: usize },

    #[error("candidate library is empty")]
    EmptyLibrary,

    #[error("{count} combinations exceed the limit of {max}; use a smaller k")]
    TooManyCombos { count: u128, max: u128 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
