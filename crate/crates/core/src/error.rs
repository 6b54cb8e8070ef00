use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HsapError>;

/// Coarse classification used to map failures onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum HsapError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix shape {rows}x{cols} with {len} entries is invalid")]
    InvalidShape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("columns are not orthonormal (max |QᵀQ - I| = {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("cannot build {cols} orthonormal columns in R^{rows}")]
    RankOverflow { rows: usize, cols: usize },

    #[error("{}: line {line}: expected {expected} fields, found {found}", path.display())]
    RaggedRow {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{}: line {line}, field {field}: not a number: {token:?}", path.display())]
    NonNumeric {
        path: PathBuf,
        line: usize,
        field: usize,
        token: String,
    },

    #[error("bad magic bytes {found:?}, expected \"HSAP\"")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported binary matrix version {0}")]
    UnsupportedVersion(u32),

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("{extra} unexpected trailing bytes after matrix payload")]
    TrailingBytes { extra: u64 },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("cube payload has {found} values, descriptor requires {expected}")]
    CubeLength { expected: usize, found: usize },

    #[error("secant count {count} exceeds materialization cap {cap}; use hierarchical mode")]
    SecantCap { count: u64, cap: usize },

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("candidate set is empty")]
    EmptyCandidateSet,

    #[error("secant set is empty")]
    EmptySecantSet,

    #[error("stale candidate: projected vector lies {distance:.3e} outside span(P)")]
    StaleCandidate { distance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HsapError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HsapError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        use HsapError::*;
        match self {
            InvalidParameter(_) => ErrorClass::Usage,
            NotOrthonormal { .. }
            | RankOverflow { .. }
            | ZeroVector
            | EmptyCandidateSet
            | StaleCandidate { .. }
            | Numerical(_) => ErrorClass::Numerical,
            _ => ErrorClass::Data,
        }
    }
}
