use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Dicke label: k = {k} exceeds n = {n}")]
    InvalidLabel { n: usize, k: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource cap exceeded: {what} = {value} exceeds cap {cap}")]
    Resource {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("singular angles alpha0 = {alpha0}, alpha1 = {alpha1} for closed form")]
    SingularAngle { alpha0: f64, alpha1: f64 },

    #[error("degenerate threshold ratio (denominator {0:e})")]
    Degenerate(f64),

    #[error("closed form left imaginary residual {residual:e} (relative to scale {scale:e})")]
    ImaginaryResidual { residual: f64, scale: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for cap violations; the CLI maps these to a dedicated exit code.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
