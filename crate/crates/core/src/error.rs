//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("refinement target {target} is coarser than the current scale {current}")]
    ScaleTooCoarse { target: i64, current: i64 },

    #[error("function is not mean zero: integral = {integral}")]
    NotMeanZero { integral: String },

    #[error("matrix does not preserve the norm")]
    NotUnitMatrix,

    #[error("vector does not lie on the unit sphere")]
    NotOnUnitSphere,

    #[error("wavelet direction J must be nonzero and have entries below p")]
    InvalidWaveletIndex,

    #[error("affine coefficient a must be nonzero")]
    ZeroDilation,

    #[error("window at scale {window} cannot hold level-{level} translates")]
    InvalidWindow { level: i64, window: i64 },

    #[error("orbit element failed classification: {witness}")]
    OrbitClassification { witness: String },
}
