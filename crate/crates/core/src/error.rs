use thiserror::Error;

/// Broad failure classes. The CLI maps each one to its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input, query line or index file.
    Format,
    /// Overflow guard, universe guard or memory budget.
    Guard,
    /// Digest mismatch or oracle disagreement.
    Verification,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("set {set}: value {value} outside universe [1, {universe}]")]
    OutOfUniverse { set: usize, value: i64, universe: i64 },

    #[error("set {set} is empty")]
    EmptySet { set: usize },

    #[error("universe bound {0} must be in [1, 2^40]")]
    UniverseTooLarge(i64),

    #[error("invalid range [{lo}, {hi}] for a set of size {len}")]
    InvalidRange { lo: i64, hi: i64, len: usize },

    #[error("set index {index} out of bounds (collection has {len} sets)")]
    SetIndex { index: usize, len: usize },

    #[error("arithmetic overflow: {what} needs {required_bits} bits (limit {limit_bits})")]
    Overflow { what: &'static str, required_bits: u32, limit_bits: u32 },

    #[error("memory budget exceeded: {what} needs {needed} bytes, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u64 },

    #[error("center distance {center} is not a positive multiple of 2^{level}")]
    MisalignedCenter { center: i64, level: u32 },

    #[error("level {level} not built (index has levels 1..={max})")]
    MissingLevel { level: u32, max: u32 },

    #[error("letter {0:?} is not in the alphabet")]
    ForeignLetter(char),

    #[error("alphabet of size {0} exceeds the supported maximum of 8")]
    AlphabetTooLarge(usize),

    #[error("histogram has dimension {got}, expected {expected}")]
    Dimension { got: usize, expected: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("index file: {0}")]
    Format(String),

    #[error("digest mismatch: index payload does not match its manifest")]
    DigestMismatch,

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::OutOfUniverse { .. }
            | Error::EmptySet { .. }
            | Error::InvalidRange { .. }
            | Error::SetIndex { .. }
            | Error::MisalignedCenter { .. }
            | Error::MissingLevel { .. }
            | Error::ForeignLetter(_)
            | Error::Dimension { .. }
            | Error::Parse { .. }
            | Error::Format(_) => ErrorClass::Format,
            Error::UniverseTooLarge(_)
            | Error::Overflow { .. }
            | Error::BudgetExceeded { .. }
            | Error::AlphabetTooLarge(_) => ErrorClass::Guard,
            Error::DigestMismatch | Error::Verification(_) => ErrorClass::Verification,
            Error::Io(_) => ErrorClass::Io,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Number of bits needed to represent `v` as an unsigned magnitude.
pub(crate) fn bits_needed(v: u128) -> u32 {
    128 - v.leading_zeros()
}
