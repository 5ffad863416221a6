use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("geometry mismatch: expected {expected_height}x{expected_width}, got {actual_height}x{actual_width}")]
    GeometryMismatch {
        expected_height: usize,
        expected_width: usize,
        actual_height: usize,
        actual_width: usize,
    },

    #[error("centered samples have rank {rank}, need at least {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("IoU is undefined when both masks are empty")]
    EmptyMasks,

    #[error("{count} labels exceed the 16-bit label map limit of 65536")]
    TooManyLabels { count: usize },

    #[error("requested {k} clusters from {available} points")]
    TooManyClusters { k: usize, available: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

/// A structural problem in an input file, located by byte offset.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte offset {offset}")]
pub struct FormatError {
    pub offset: u64,
    pub kind: FormatErrorKind,
}

impl FormatError {
    pub(crate) fn new(offset: usize, kind: FormatErrorKind) -> Self {
        Self {
            offset: offset as u64,
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormatErrorKind {
    BadMagic { expected: [u8; 4], found: Vec<u8> },
    UnsupportedVersion(u8),
    UnsupportedDtype(u8),
    UnsupportedNdim(u8),
    NonZeroReserved,
    ZeroDimension,
    Truncated { needed: u64, available: u64 },
    SizeMismatch { expected: u64, actual: u64 },
    TrailingBytes { extra: u64 },
    NonFinite,
    InvalidGeometry(String),
    Netpbm(String),
}

impl fmt::Display for FormatErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatErrorKind::BadMagic { expected, found } => write!(
                f,
                "bad magic: expected {:?}, found {:?}",
                String::from_utf8_lossy(expected),
                String::from_utf8_lossy(found)
            ),
            FormatErrorKind::UnsupportedVersion(v) => write!(f, "unsupported version {v}"),
            FormatErrorKind::UnsupportedDtype(d) => write!(f, "unsupported dtype {d}"),
            FormatErrorKind::UnsupportedNdim(n) => write!(f, "unsupported ndim {n}"),
            FormatErrorKind::NonZeroReserved => write!(f, "reserved field is not zero"),
            FormatErrorKind::ZeroDimension => write!(f, "zero-sized dimension"),
            FormatErrorKind::Truncated { needed, available } => {
                write!(f, "truncated: need {needed} bytes, {available} available")
            }
            FormatErrorKind::SizeMismatch { expected, actual } => write!(
                f,
                "payload size mismatch: header implies {expected} bytes, found {actual}"
            ),
            FormatErrorKind::TrailingBytes { extra } => write!(f, "{extra} trailing bytes"),
            FormatErrorKind::NonFinite => write!(f, "non-finite value"),
            FormatErrorKind::InvalidGeometry(msg) => write!(f, "invalid geometry: {msg}"),
            FormatErrorKind::Netpbm(msg) => write!(f, "malformed netpbm: {msg}"),
        }
    }
}
