//! Time-ordered pose sequences, one per sensor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pose::Pose;

/// A sensor trajectory in its own odometry frame. Timestamps are strictly
/// increasing; construction rejects anything else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub sensor_id: String,
    poses: Vec<Pose>,
}

impl Trajectory {
    pub fn new(sensor_id: impl Into<String>, poses: Vec<Pose>) -> Result<Self> {
        for (i, p) in poses.iter().enumerate() {
            if i > 0 && p.timestamp <= poses[i - 1].timestamp {
                return Err(Error::NonMonotonicTime {
                    index: i,
                    t: p.timestamp,
                    prev: poses[i - 1].timestamp,
                });
            }
            // quantized file input sits within ~1e-9 of unit; anything worse
            // than the precondition tolerance is corrupt data
            if !p.rotation.is_unit(crate::tol::UNIT_TOL_PRE) {
                return Err(Error::NonUnitRotation {
                    index: i,
                    norm: p.rotation.norm(),
                });
            }
        }
        Ok(Self {
            sensor_id: sensor_id.into(),
            poses,
        })
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn start_time(&self) -> Option<f64> {
        self.poses.first().map(|p| p.timestamp)
    }

    pub fn end_time(&self) -> Option<f64> {
        self.poses.last().map(|p| p.timestamp)
    }

    pub fn timestamps(&self) -> impl Iterator<Item = f64> + '_ {
        self.poses.iter().map(|p| p.timestamp)
    }

    /// Index of the last pose with `timestamp <= t`, if any.
    pub(crate) fn bracket_left(&self, t: f64) -> Option<usize> {
        if self.poses.is_empty() || t < self.poses[0].timestamp {
            return None;
        }
        let idx = self
            .poses
            .partition_point(|p| p.timestamp <= t)
            .saturating_sub(1);
        Some(idx)
    }

    /// Re-express every pose relative to the pose at `index` (left
    /// multiplication by its inverse). Rebasing to the first sample turns a
    /// world trajectory into odometry starting at identity.
    pub fn rebased_at(&self, index: usize) -> Trajectory {
        let anchor_inv = self.poses[index].inverse();
        Trajectory {
            sensor_id: self.sensor_id.clone(),
            poses: self
                .poses
                .iter()
                .map(|p| {
                    let mut q = anchor_inv.compose(p);
                    q.timestamp = p.timestamp;
                    q
                })
                .collect(),
        }
    }

    /// Apply a fixed transform change of frame `x^-1 * p * x` to every pose
    /// (conjugation expresses this odometry in the frame of a sensor mounted
    /// at `x` relative to this one).
    pub fn conjugated(&self, x: &Pose) -> Trajectory {
        let x_inv = x.inverse();
        Trajectory {
            sensor_id: self.sensor_id.clone(),
            poses: self
                .poses
                .iter()
                .map(|p| {
                    let mut q = x_inv.compose(p).compose(x);
                    q.timestamp = p.timestamp;
                    q
                })
                .collect(),
        }
    }
}
