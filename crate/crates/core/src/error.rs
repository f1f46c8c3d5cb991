use thiserror::Error;

use crate::grid::Coord;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification of an [`Error`], used by the command-line front end
/// to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input bytes or a failed read/write.
    Input,
    /// The input is well formed but violates a precondition (empty or
    /// disconnected region, too many subdivisions, bad parameters).
    Validation,
    /// The algorithm ran but could not produce a valid result.
    Algorithm,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid dimensions {width}x{height}: {reason}")]
    InvalidDims {
        width: usize,
        height: usize,
        reason: &'static str,
    },

    #[error("data length {actual} does not match grid size {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("coordinate ({}, {}) is outside a {width}x{height} grid", .coord.x, .coord.y)]
    OutOfBounds {
        coord: Coord,
        width: usize,
        height: usize,
    },

    #[error("grid dimensions differ between inputs")]
    DimsMismatch,

    #[error("empty region")]
    EmptyRegion,

    #[error("region not connected ({components} 4-connected components)")]
    NotConnected { components: usize },

    #[error("source ({}, {}) is not inside the domain", .0.x, .0.y)]
    SourceNotInDomain(Coord),

    #[error("potential at ({}, {}) must be positive and finite, got {value}", .coord.x, .coord.y)]
    InvalidPotential { coord: Coord, value: f64 },

    #[error("field has no finite value")]
    NoFiniteValue,

    #[error("start ({}, {}) has no finite arrival time", .0.x, .0.y)]
    UnreachedStart(Coord),

    #[error("stuck at non-source local minimum ({}, {})", .0.x, .0.y)]
    StuckAtLocalMinimum(Coord),

    #[error("path index {index} has no neighbor on both sides (path length {len})")]
    EndpointIndex { index: usize, len: usize },

    #[error("degenerate tangent at path index {0}")]
    DegenerateTangent(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("k too large for region (k = {k}, centerline length {path_len})")]
    KTooLarge { k: usize, path_len: usize },

    #[error("cut failed at segment {segment}")]
    CutFailed { segment: usize },

    #[error("balance failed: per-label areas {areas:?}, target {target}")]
    BalanceFailed { areas: Vec<usize>, target: usize },

    #[error("label map invariant violated: {0}")]
    InvalidLabels(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("label {0} exceeds the maximum writable label 65535")]
    LabelOverflow(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::Io(_) | Error::LabelOverflow(_) => ErrorKind::Input,
            Error::CutFailed { .. }
            | Error::BalanceFailed { .. }
            | Error::StuckAtLocalMinimum(_)
            | Error::DegenerateTangent(_) => ErrorKind::Algorithm,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
