use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ground size {n} exceeds the supported maximum of {max}")]
    GroundSizeTooLarge { n: usize, max: usize },
    #[error("ground size mismatch: {left} vs {right}")]
    GroundSizeMismatch { left: usize, right: usize },
    #[error("element {elem} is outside the ground set [1, {n}]")]
    ElementOutOfRange { elem: usize, n: usize },
    #[error("mask {bits:#x} does not fit in a ground set of size {n}")]
    MaskOutOfRange { bits: u32, n: usize },
    #[error("family is not {k}-wise intersecting")]
    NotIntersecting { k: usize },
    #[error("family is not maximal {k}-wise intersecting")]
    NotMaximal { k: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("divisibility constraint violated: {0}")]
    Divisibility(String),
    #[error("malformed family encoding: {0}")]
    Encoding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
