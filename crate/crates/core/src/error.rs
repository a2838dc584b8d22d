use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::tree::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("alphabet size must be between 2 and 256, got {0}")]
    InvalidAlphabet(usize),

    #[error("depth bound must be between 1 and {max}, got {depth}", max = crate::tree::MAX_DEPTH)]
    InvalidDepth { depth: usize },

    #[error("dataset contains no sequences")]
    EmptyDataset,

    #[error(
        "symbol {symbol} in sequence {sequence} at position {position} is outside the alphabet of size {alphabet_size}"
    )]
    SymbolOutOfRange {
        sequence: usize,
        position: usize,
        symbol: usize,
        alphabet_size: usize,
    },

    #[error("sequence {sequence} has length {length}, which does not exceed the depth bound {depth}")]
    SequenceTooShort {
        sequence: usize,
        length: usize,
        depth: usize,
    },

    #[error("invalid context tree: {0}")]
    InvalidTree(Violations),

    #[error("invalid allowed-transition matrix: {0}")]
    InvalidAllowedMatrix(String),

    #[error("sequence {sequence} contains the prohibited transition {from} -> {to} at position {position}")]
    ProhibitedTransition {
        sequence: usize,
        position: usize,
        from: u8,
        to: u8,
    },

    #[error("invalid probabilistic context tree: {0}")]
    InvalidPct(String),

    #[error("tree prior has empty support: {0}")]
    EmptySupport(String),

    #[error("tree is outside the prior support")]
    OutsideSupport,

    #[error("no grow or prune move is available: the prior support is a single tree")]
    DegenerateSpace,

    #[error("tree space has {estimate} trees, more than the enumeration bound {bound}")]
    EnumerationBound { estimate: SpaceSize, bound: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    /// Numeric failures and refused enumerations, as opposed to invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_) | Error::EnumerationBound { .. })
    }
}

/// Violations found while validating a set of contexts.
#[derive(Debug, Clone, PartialEq)]
pub struct Violations(pub Vec<Violation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Size of a tree space, which may overflow 64 bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceSize {
    Exact(u64),
    /// Lower bound on log10 of the size once the exact count overflows.
    Log10AtLeast(f64),
}

impl fmt::Display for SpaceSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSize::Exact(n) => write!(f, "{n}"),
            SpaceSize::Log10AtLeast(x) => write!(f, "more than 10^{x:.1}"),
        }
    }
}
