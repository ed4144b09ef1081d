use thiserror::Error;

/// Errors produced while building, querying or (de)serializing a block graph.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty text")]
    EmptyText,

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("modulus bits {0} outside [8, 62]")]
    ModulusBits(u32),

    #[error("position {pos} out of range (length {len})")]
    OutOfRange { pos: usize, len: usize },

    #[error("symbol {0:#04x} is not tracked")]
    UntrackedSymbol(u8),

    #[error("occurrence does not exist")]
    NoSuchOccurrence,

    #[error("invalid parse: {0}")]
    InvalidParse(String),

    #[error("leftmost occurrence not within marked blocks")]
    Unmarked,

    #[error("hash collisions persist after {0} attempts")]
    CollisionsPersist(u32),

    #[error("not a balanced parentheses string: {0}")]
    Unbalanced(String),

    #[error("graph has no excess augmentation")]
    NoExcess,

    #[error("invalid node handle {0}")]
    InvalidNode(usize),

    #[error("bad magic")]
    BadMagic,

    #[error("unsupported version {0}")]
    Version(u16),

    #[error("checksum mismatch (stored {stored:#018x}, computed {computed:#018x})")]
    Checksum { stored: u64, computed: u64 },

    #[error("truncated input")]
    Truncated,

    #[error("malformed graph file: {0}")]
    Malformed(String),

    #[error("invalid corpus parameters: {0}")]
    Corpus(String),
}

pub type Result<T> = std::result::Result<T, Error>;
