use thiserror::Error;

use crate::abelian_q::Place;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero is not a valid input here")]
    ZeroInput,
    #[error("field is not cyclic over Q")]
    NonCyclic,
    #[error("degree {requested} does not divide the field degree {degree}")]
    BadDegree { requested: u64, degree: u64 },
    #[error("invalid field spec `{spec}`: {reason}")]
    BadFieldSpec { spec: String, reason: String },
    #[error("(Z/NZ)^× has {size} elements, above the modulus limit {limit}")]
    ModulusTooLarge { size: u64, limit: u64 },
    #[error("the Galois group of the compositum has {size} elements, above the limit {limit}")]
    GaloisTooLarge { size: u64, limit: u64 },
    #[error("ambient tuple space has {size} elements, above the limit {limit}")]
    AmbientTooLarge { size: u128, limit: u64 },
    #[error("malformed profile: {0}")]
    MalformedProfile(String),
    #[error("index-set tuple is not coherent: {0}")]
    NotCoherent(String),
    #[error("{}", match .0 { Some(i) => format!("factor {i} is not cyclic"), None => "no factor is cyclic".to_string() })]
    NoCyclicFactor(Option<usize>),
    #[error("pivot index {index} out of range for {len} factors")]
    BadPivot { index: usize, len: usize },
    #[error("partition view needs a pivot of prime degree (exponent 1), got exponent {0}")]
    WrongExponent(u32),
    #[error("not locally solvable at {0}")]
    NotLocallySolvable(Place),
    #[error("factor of degree {0} is not of the required prime degree")]
    NotPrimeDegree(u64),
    #[error("unsupported factor degree {0} (only Q and quadratic fields are searched)")]
    UnsupportedDegree(u64),
    #[error("wrong shape: {0}")]
    WrongShape(String),
    #[error("profile mismatch at prime {prime}: {detail}")]
    Mismatch { prime: u64, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
