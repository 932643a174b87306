//! Timestamped rigid transforms.

use nalgebra::{Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::dq::DualQuaternion;
use crate::error::Result;
use crate::quat::Quaternion;

/// A timestamped pose on SE(3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    /// Seconds.
    pub timestamp: f64,
    /// Unit quaternion.
    pub rotation: Quaternion,
    /// Meters.
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn new(timestamp: f64, rotation: Quaternion, translation: Vector3<f64>) -> Self {
        Self {
            timestamp,
            rotation: rotation.normalized(),
            translation,
        }
    }

    /// Build without renormalizing. For inputs already quantized to a fixed
    /// decimal precision, renormalization would move the stored digits.
    pub fn from_parts(timestamp: f64, rotation: Quaternion, translation: Vector3<f64>) -> Self {
        Self {
            timestamp,
            rotation,
            translation,
        }
    }

    pub fn identity(timestamp: f64) -> Self {
        Self {
            timestamp,
            rotation: Quaternion::IDENTITY,
            translation: Vector3::zeros(),
        }
    }

    /// Composition `self * rhs` (apply `rhs` first in `self`'s frame).
    pub fn compose(&self, rhs: &Pose) -> Pose {
        Pose {
            timestamp: rhs.timestamp,
            rotation: self.rotation.mul(&rhs.rotation).normalized(),
            translation: self.translation + self.rotation.rotate(&rhs.translation),
        }
    }

    pub fn inverse(&self) -> Pose {
        let rot_inv = self.rotation.conjugate();
        Pose {
            timestamp: self.timestamp,
            rotation: rot_inv,
            translation: -rot_inv.rotate(&self.translation),
        }
    }

    /// Relative motion from `self` to `other`: `self^-1 * other`.
    pub fn between(&self, other: &Pose) -> Pose {
        self.inverse().compose(other)
    }

    /// Apply to a point.
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate(p) + self.translation
    }

    /// Dual-quaternion form `q(R) + eps 1/2 q(t) q(R)`.
    pub fn to_dq(&self) -> DualQuaternion {
        DualQuaternion::from_rotation_translation(&self.rotation, &self.translation)
    }

    /// Pose encoded by a unit DQ, carrying the given timestamp.
    pub fn from_dq(q: &DualQuaternion, timestamp: f64) -> Result<Pose> {
        q.check_unit(crate::tol::UNIT_TOL_PRE)?;
        Ok(Pose {
            timestamp,
            rotation: q.real.normalized(),
            translation: q.translation(),
        })
    }

    /// Homogeneous 4x4 matrix.
    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&self.rotation.to_rotation_matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Geodesic distance to another pose: (translation meters, rotation radians).
    pub fn error_to(&self, other: &Pose) -> (f64, f64) {
        let delta = self.between(other);
        (delta.translation.norm(), delta.rotation.angle())
    }
}
