use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("pass limit of {limit} exceeded ({used} passes)")]
    PassLimit { limit: u64, used: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("decode error in block {block}: {reason}")]
    BlockDecode { block: usize, reason: String },

    #[error("decode error: {0}")]
    Decode(String),

    #[error("grammar derivation is cyclic at nonterminal {0}")]
    Cycle(u32),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("result too large: {0}")]
    Overflow(String),

    #[error("length error: {0}")]
    Length(String),
}
