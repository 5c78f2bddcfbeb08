use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid Cremona slots ({0}, {1}, {2}): indices must be distinct")]
    SlotCollision(usize, usize, usize),
    #[error("out of scope: {0}")]
    Scope(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("modulus {prime} is not usable for degree {degree}: need a prime p > d below 2^32")]
    Modulus { prime: u64, degree: i64 },
    #[error("malformed abstract class: {0}")]
    MalformedClass(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
