use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("satellite index {index} out of range for shell {shell} (valid 0..={max})", max = .bound - 1)]
    IndexOutOfRange {
        shell: String,
        index: usize,
        bound: usize,
    },

    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("slot {slot} is unroutable: no ground station holds links to both shells")]
    UnroutableSlot { slot: usize },

    #[error("trace parse error at line {line}: {message}")]
    TraceParse { line: u64, message: String },

    #[error("duplicate trace entry for slot {slot}, gs {gs_id}, shell {shell}")]
    DuplicateEntry {
        slot: usize,
        gs_id: u32,
        shell: String,
    },

    #[error("brute-force oracle would enumerate {sequences} sequences (cap {cap})")]
    OracleTooLarge { sequences: u128, cap: u128 },

    #[error("requested {requested} ground stations but only {available} are available")]
    SubsetTooLarge { requested: usize, available: usize },

    #[error("pair {pair_id} (src {src}, dst {dst}): {source}")]
    Pair {
        pair_id: usize,
        src: usize,
        dst: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Strips campaign annotations and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Pair { source, .. } => source.root(),
            other => other,
        }
    }
}
