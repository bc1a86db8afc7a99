use std::path::PathBuf;

/// Errors produced by the toolkit.
///
/// Variants are split along the line the command-line front end cares
/// about: [`Error::is_usage`] distinguishes bad requests from bad data.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown scheme `{0}` (expected one of bpsk, qpsk, qam16_rect, qam16_circ)")]
    UnknownScheme(String),

    #[error("invalid constellation: {0}")]
    InvalidScheme(String),

    #[error("invalid mapping key: {0}")]
    InvalidKey(String),

    #[error("key has {found} entries but the scheme has order {expected}")]
    KeyLength { expected: usize, found: usize },

    #[error("bit stream of length {len} is not a multiple of {bits_per_symbol} bits per symbol")]
    BitLength { len: usize, bits_per_symbol: usize },

    #[error("invalid bit `{0}` in bit stream")]
    InvalidBit(char),

    #[error("receiver carries {rx} bits per symbol but the sender only {tx}; alignment undefined")]
    BitAlignment { tx: usize, rx: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} exceeds the supported limit ({limit})")]
    TooLarge { what: String, limit: usize },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Record { path: PathBuf, line: u64, msg: String },

    #[error("{path}: {msg}")]
    InvalidInput { path: PathBuf, msg: String },

    #[error("missing series for receivers: {}", .0.join(", "))]
    MissingSeries(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Toml {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from how the toolkit was asked to do something
    /// rather than from the data it was handed.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::UnknownScheme(_)
                | Error::InvalidArgument(_)
                | Error::TooLarge { .. }
                | Error::BitAlignment { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
