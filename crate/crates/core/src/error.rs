use thiserror::Error;

use crate::distributions::{Arm, Family};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("incomparable models: {left:?} vs {right:?}")]
    FamilyMismatch { left: Family, right: Family },

    #[error("estimator needs at least one round record")]
    EmptyRecords,

    #[error("expected {expected} round records, got {actual}")]
    RecordLength { expected: u64, actual: usize },

    #[error("sample mean undefined: arm {0} was never observed")]
    UnobservedArm(Arm),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
