use thiserror::Error;

/// Errors raised by the graphing machine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}): need 0 <= lo < hi <= 1")]
    InvalidInterval { lo: String, hi: String },

    #[error("realizer undefined on box {box_index} at coordinate {coord}")]
    DomainViolation { box_index: usize, coord: u32 },

    #[error("carriers overlap; disjoint union needs disjoint carriers")]
    OverlappingCarriers,

    #[error("weight monoids {left} and {right} are incompatible")]
    WeightMismatch { left: String, right: String },

    #[error("symbol {0:?} is not in the alphabet")]
    UnknownSymbol(char),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    #[error("missing named region: {0}")]
    MissingRegion(String),

    #[error("invalid compilation witness for edge {edge}, part {part}: {reason}")]
    InvalidWitness { edge: usize, part: usize, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("singular linear system while solving absorption probabilities")]
    SingularSystem,
}

pub type Result<T> = std::result::Result<T, Error>;
