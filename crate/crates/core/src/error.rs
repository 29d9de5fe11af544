use num_bigint::{BigInt, BigUint};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {0}")]
    InvalidModulus(u64),

    #[error("{name} = {value} is outside {lo}..={hi}")]
    OutOfRange {
        name: &'static str,
        value: i128,
        lo: i128,
        hi: i128,
    },

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(usize, usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(BigUint, BigUint),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("divisibility failure: {0}")]
    Divisibility(String),

    #[error("negative multiplicity {value} of block [{i}] at quasi-length {ql}")]
    NegativeMultiplicity { i: usize, ql: BigUint, value: BigInt },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn out_of_range(name: &'static str, value: impl Into<i128>, lo: impl Into<i128>, hi: impl Into<i128>) -> Self {
        Error::OutOfRange {
            name,
            value: value.into(),
            lo: lo.into(),
            hi: hi.into(),
        }
    }

    /// True for malformed input text, as opposed to mathematically inconsistent data.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}

pub(crate) fn check_range(name: &'static str, value: usize, lo: usize, hi: usize) -> Result<()> {
    if value < lo || value > hi {
        Err(Error::out_of_range(name, value as i128, lo as i128, hi as i128))
    } else {
        Ok(())
    }
}
