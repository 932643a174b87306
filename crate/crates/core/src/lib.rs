//! Motion-based extrinsic calibration for rigidly mounted multi-lidar rigs.
//!
//! Given two asynchronous per-sensor pose trajectories the toolkit recovers
//! the fixed sensor-to-sensor transform: trajectories are time-aligned with
//! dual-quaternion ScLERP, relative motions are matched into a hand-eye
//! system solved by SVD nullspace analysis, and the result is checked with
//! trajectory-consistency metrics and kinematic curb-feature matching.
//!
//! The `synth` module simulates a complete rig (ground-truth extrinsic,
//! asynchronous noisy trajectories, curb features) so every stage can be
//! validated end to end without recorded data.

pub mod config;
pub mod dq;
pub mod error;
pub mod handeye;
pub mod init;
pub mod interp;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod pose;
pub mod quat;
pub mod synth;
pub mod tol;
pub mod trajectory;
pub mod verify;

#[cfg(test)]
pub(crate) mod test_util;

pub use dq::{DualQuaternion, ScrewParams};
pub use error::{Error, Result};
pub use handeye::{CalibrationResult, DegeneracyFlag, MotionPair};
pub use interp::{align, interpolate_at, sclerp, AlignedPair, GridPolicy};
pub use pose::Pose;
pub use quat::Quaternion;
pub use trajectory::Trajectory;
