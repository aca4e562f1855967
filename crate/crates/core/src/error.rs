use thiserror::Error;

/// Rejected master key material.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeyError {
    #[error("key must be 2, 3 or 4 words, got {0}")]
    WordCount(usize),
    #[error("key must be 16, 24 or 32 bytes, got {0}")]
    ByteLength(usize),
    #[error("key length must be 32, 48 or 64 hex digits, got {0}")]
    HexLength(usize),
    #[error("key contains non-hex character {0:?}")]
    HexDigit(char),
}

/// Which class of failure a [`ContainerError`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Format,
    Padding,
    Length,
}

/// Failure to parse or decrypt a container.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContainerError {
    #[error("header field `magic`: expected \"XCRU\", found {0:02x?}")]
    Magic([u8; 4]),
    #[error("header field `version`: unsupported version {0}")]
    Version(u8),
    #[error("header field `key_bytes`: {0} is not 16, 24 or 32")]
    KeyBytes(u8),
    #[error("header field `key_bytes`: container was written with a {header}-byte key, got a {supplied}-byte key")]
    KeyMismatch { header: u8, supplied: u8 },
    #[error("header field `mode`: unknown mode {0}")]
    Mode(u8),
    #[error("header field `reserved`: expected 0, found {0}")]
    Reserved(u8),
    #[error("header field `nonce`: must be zero in ECB mode")]
    EcbNonce,
    #[error("header: need 32 bytes, got {0}")]
    TruncatedHeader(usize),
    #[error("body: expected {expected} bytes for payload_len {payload_len}, got {actual}")]
    BodyLength { payload_len: u64, expected: u64, actual: u64 },
    #[error("padding: final pad byte {0} is not in 1..=32")]
    PadValue(u8),
    #[error("padding: pad bytes are inconsistent")]
    PadBytes,
}

impl ContainerError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            ContainerError::TruncatedHeader(_) | ContainerError::BodyLength { .. } => ErrorKind::Length,
            ContainerError::PadValue(_) | ContainerError::PadBytes => ErrorKind::Padding,
            _ => ErrorKind::Format,
        }
    }
}

/// Rejected analysis parameters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("sample count must be at least {min}, got {got}")]
    TooFewSamples { min: u64, got: u64 },
}
