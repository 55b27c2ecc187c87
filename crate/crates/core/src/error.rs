use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed record: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: coordinate {value} outside [0, 255]")]
    Range { line: usize, value: f64 },

    #[error("sketch has no strokes")]
    EmptySketch,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("image shape mismatch: {0}x{1} vs {2}x{3}")]
    Shape(u32, u32, u32, u32),

    #[error("empty foreground in {0} image")]
    EmptyForeground(&'static str),

    #[error("need at least {needed} records, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("misplace and resize cannot fire together")]
    Exclusivity,

    #[error("incomplete statistics for categories: {}", .0.join(", "))]
    IncompleteStats(Vec<String>),

    #[error("degenerate hand geometry: {0}")]
    DegenerateGeometry(String),

    #[error("{0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Image { path: PathBuf, message: String },
}

/// Coarse error class, stable enough for scripts to match on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Io,
    Config,
    Data,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Io => "io",
            ErrorCategory::Config => "config",
            ErrorCategory::Data => "data",
        }
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Io { .. } | Error::Image { .. } => ErrorCategory::Io,
            Error::Config(_) | Error::Exclusivity => ErrorCategory::Config,
            _ => ErrorCategory::Data,
        }
    }
}
