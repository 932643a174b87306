//! Error type shared by all calibration stages.

use thiserror::Error;

/// Errors produced by the calibration toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A dual quaternion required to be unit was not, within the stated tolerance.
    #[error("dual quaternion is not unit (real norm {real_norm}, orthogonality {orthogonality})")]
    NonUnitDq { real_norm: f64, orthogonality: f64 },

    /// Interpolation requested outside the trajectory's time span.
    #[error("time {t} outside trajectory span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    /// The two trajectories share no usable time overlap.
    #[error("trajectories do not overlap in time (need at least 2 samples each inside the common window)")]
    NoOverlap,

    /// Trajectory timestamps must be strictly increasing.
    #[error("non-increasing timestamp at index {index}: {t} follows {prev}")]
    NonMonotonicTime { index: usize, t: f64, prev: f64 },

    /// Trajectory rotations must be unit quaternions.
    #[error("rotation at index {index} is not unit (norm {norm})")]
    NonUnitRotation { index: usize, norm: f64 },

    /// Point-set alignment needs at least three points.
    #[error("rigid fit needs at least 3 point pairs, got {0}")]
    TooFewPoints(usize),

    /// Point set is collinear (or coincident); rotation about the line is unobservable.
    #[error("degenerate point geometry: {0}")]
    DegenerateGeometry(String),

    /// Not enough usable relative motion to constrain the extrinsic.
    #[error("insufficient motion: {0}")]
    InsufficientMotion(String),

    /// The nullspace coefficient system had no real solution.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Error-metric inputs are not on the same timestamp grid.
    #[error("trajectory grids do not match: {0}")]
    GridMismatch(String),

    /// Simulator specification rejected.
    #[error("invalid rig/trajectory spec: {0}")]
    InvalidSpec(String),

    /// Kinematic time-offset search found no forward-motion minimum.
    #[error("no forward motion: {0}")]
    NoForwardMotion(String),

    /// Feature observation windows do not overlap after applying the time offset.
    #[error("no overlapping feature window: {0}")]
    NoOverlapWindow(String),

    /// A data file could not be parsed.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// Configuration file problem (unknown key, bad value).
    #[error("config error: {0}")]
    Config(String),

    /// Wrapped I/O error with the offending path.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
