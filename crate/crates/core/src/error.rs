use thiserror::Error;

/// Errors produced by decoding, parameter validation, and pipeline contracts.
#[derive(Debug, Error)]
pub enum Error {
    /// Input ended before the image header was complete.
    #[error("truncated header: {0}")]
    TruncatedHeader(&'static str),

    /// Header was present but did not parse as expected.
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    /// Only maxval 255 (8-bit) rasters are accepted.
    #[error("unsupported maxval {0} (expected 255)")]
    UnsupportedMaxval(u32),

    /// Pixel payload shorter than the header promised.
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    /// Byte stream matched no supported image format.
    #[error("unsupported image format")]
    UnsupportedFormat,

    #[error("png decode: {0}")]
    Png(#[from] png::DecodingError),

    /// PNG layout outside the supported 8-bit gray / 8-bit RGB subset.
    #[error("unsupported png layout: {0}")]
    UnsupportedPng(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A documented precondition between modules was violated by the caller.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("malformed ground truth: {0}")]
    MalformedGroundTruth(String),
}

pub type Result<T> = std::result::Result<T, Error>;
