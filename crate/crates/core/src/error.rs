use thiserror::Error;

use crate::scheme_core::Ordinal;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid type: {0}")]
    InvalidType(String),
    #[error("level {level} is not available: {reason}")]
    LevelUnavailable { level: usize, reason: String },
    #[error("cardinality {0} is not of the form m_k")]
    NotALevelCardinality(u64),
    #[error("ordinal {0} lies outside the handle's domain")]
    DomainExceeded(Ordinal),
    #[error("query ({alpha}, level {level}) is outside the stored fragment")]
    OutsideFragment { alpha: Ordinal, level: usize },
    #[error("value {0} does not fit into the 64-bit position space")]
    Overflow(String),
    #[error("arguments must satisfy {0}")]
    BadOrder(String),
    #[error("Xi of a set is only defined above its diameter (k={k}, diameter={diameter})")]
    XiUndefined { k: usize, diameter: usize },
    #[error("the type is not a 2-type")]
    NotATwoType,
    #[error("the type's fan-out is too small: {0}")]
    TypeTooSmall(String),
    #[error("not a member of the scheme: {0}")]
    NotAMember(String),
    #[error("no IH1 witness below level {0}")]
    NoWitnessInSchedule(usize),
    #[error("request refers to ordinals outside the extension domain: {0}")]
    RequestOutOfDomain(String),
    #[error("fuel exhausted after {0} appended conditions")]
    FuelExhausted(u64),
    #[error("not an order-preserving embedding: {0}")]
    NotAnEmbedding(String),
    #[error("point is outside the domain of the function")]
    OutOfDomain,
    #[error("unknown check: {0}")]
    UnknownCheck(String),
    #[error("unknown preset: {0}")]
    UnknownPreset(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
