//! Error type shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("signal too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("decomposition level {levels} out of range (max {max} for this input)")]
    LevelOutOfRange { levels: usize, max: usize },

    #[error("band {level} out of range: decomposition has {levels} levels")]
    BandOutOfRange { level: usize, levels: usize },

    #[error("corrupt decomposition: {0}")]
    CorruptDecomposition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("sensitivity undefined: no reference beats (TP + FN = 0)")]
    UndefinedSensitivity,

    #[error("input not sorted: {0}")]
    UnsortedInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty signal{}", path_suffix(.0))]
    EmptySignal(Option<PathBuf>),

    #[error("parse error at line {line}{}: {msg}", path_suffix(.path))]
    Parse {
        line: usize,
        msg: String,
        path: Option<PathBuf>,
    },

    #[error("unsupported signal format {0} (only format 212 is supported)")]
    UnsupportedFormat(u32),

    #[error("truncated file at byte offset {offset}{}", path_suffix(.path))]
    Truncated { offset: u64, path: Option<PathBuf> },

    #[error("channel {channel} out of range: record has {n_signals} signal(s)")]
    ChannelOutOfRange { channel: usize, n_signals: usize },

    #[error("corrupt file: {0}")]
    CorruptFile(String),

    #[error("span ({start}, {end}) out of signal bounds (len {len})")]
    SpanOutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("i/o error{}: {source}", path_suffix(.path))]
    Io {
        #[source]
        source: std::io::Error,
        path: Option<PathBuf>,
    },
}

impl From<std::io::Error> for Error {
    fn from(source: std::io::Error) -> Self {
        Error::Io { source, path: None }
    }
}

impl Error {
    /// An I/O error tagged with the file it came from.
    pub fn io(source: std::io::Error, path: impl Into<PathBuf>) -> Self {
        Error::Io {
            source,
            path: Some(path.into()),
        }
    }
}

fn path_suffix(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!(" in {}", p.display()),
        None => String::new(),
    }
}
