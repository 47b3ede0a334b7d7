use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid letter {letter} for rank {rank}")]
    InvalidLetter { letter: i32, rank: u32 },

    #[error("rank must be at least 1")]
    InvalidRank,

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown generator `{name}` at position {pos}")]
    UnknownGenerator { name: String, pos: usize },

    #[error("unbalanced brackets at position {pos}")]
    Unbalanced { pos: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("word length {len} exceeds the cap of {cap}")]
    LengthCap { len: usize, cap: usize },

    #[error("sampler gave up after {0} retries")]
    RetriesExhausted(usize),

    #[error("empty input")]
    Empty,

    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    #[error("unsupported rank {0}")]
    UnsupportedRank(u32),
}
