use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// Display strings are stable: the CLI prints them verbatim and the FFI layer
/// exposes them through `tl_last_error_message`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no data")]
    NoData,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid window")]
    InvalidWindow,
    #[error("window exceeds data")]
    WindowExceedsData,
    #[error("short must be < long")]
    ShortNotBelowLong,
    #[error("invalid range: start must be before end")]
    InvalidRange,
    #[error("empty slice")]
    EmptySlice,
    #[error("series length mismatch: {left} vs {right}")]
    Misaligned { left: usize, right: usize },
    #[error("insufficient data")]
    InsufficientData,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("empty grid")]
    EmptyGrid,
    #[error("no tradeable parameters")]
    NoTradeableParameters,
    #[error("insufficient history")]
    InsufficientHistory,
    #[error("window < 2")]
    CorrelationWindowTooSmall,
    #[error("no overlapping dates")]
    EmptyIntersection,
    #[error("degenerate series")]
    DegenerateSeries,
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
