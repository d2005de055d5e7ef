use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown atomic proposition `{name}` at position {position}")]
    UnknownAtom { name: String, position: usize },

    #[error("invalid instance: {0}")]
    Schema(String),

    #[error("state `{0}` is blocking (no outgoing transition)")]
    BlockingState(String),

    #[error("edge endpoint `{0}` is not a declared state")]
    DanglingEdge(String),

    #[error("label of state `{state}` uses undeclared proposition `{atom}`")]
    UnknownLabel { state: String, atom: String },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid lasso word: {0}")]
    InvalidWord(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("alphabets with more than {max} propositions are not supported (got {got})")]
    AlphabetTooLarge { got: usize, max: usize },

    #[error("soft automaton {0} is not nonblocking")]
    BlockingAutomaton(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("unsupported format version {0}")]
    FormatVersion(u64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
