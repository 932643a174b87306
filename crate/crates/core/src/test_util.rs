//! Shared random generators for unit tests.

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dq::DualQuaternion;
use crate::pose::Pose;
use crate::quat::Quaternion;

pub(crate) fn random_vector(rng: &mut ChaCha8Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

pub(crate) fn random_rotation(rng: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let axis = random_vector(rng, 1.0);
        if axis.norm() > 0.1 {
            return Quaternion::from_axis_angle(&axis, rng.random_range(-3.0..3.0));
        }
    }
}

pub(crate) fn random_pose(rng: &mut ChaCha8Rng, timestamp: f64) -> Pose {
    Pose::new(timestamp, random_rotation(rng), random_vector(rng, 10.0))
}

pub(crate) fn random_unit_dq(rng: &mut ChaCha8Rng) -> DualQuaternion {
    DualQuaternion::from_rotation_translation(&random_rotation(rng), &random_vector(rng, 5.0))
}
