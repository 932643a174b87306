//! Closed-form initial estimate from trajectory translation clouds.
//!
//! Fits the rigid map `b ~ R a + t` between the two sensors' position
//! sequences (Umeyama's SVD solution with scale fixed to 1, reflection
//! guarded). Trajectory-shape alignment alone cannot observe the full
//! extrinsic, so the fit is used downstream only to gate outlier motion
//! pairs and to disambiguate the nullspace solution sign.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::AlignedPair;
use crate::quat::Quaternion;

/// Rigid least-squares fit between two point clouds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidFit {
    pub rotation: Quaternion,
    pub translation: Vector3<f64>,
    /// RMS of `|R a_i + t - b_i|` over the input pairs (meters).
    pub rms_residual: f64,
    /// Set when the residual exceeded the configured threshold.
    pub low_confidence: bool,
}

impl RigidFit {
    /// Residual of the fit objective for an arbitrary candidate `(R, t)`.
    pub fn objective(
        rotation: &Quaternion,
        translation: &Vector3<f64>,
        points_a: &[Vector3<f64>],
        points_b: &[Vector3<f64>],
    ) -> f64 {
        points_a
            .iter()
            .zip(points_b)
            .map(|(a, b)| (rotation.rotate(a) + translation - b).norm_squared())
            .sum()
    }
}

/// Relative spread below which the point cloud counts as collinear.
const COLLINEAR_RATIO: f64 = 1e-8;

/// Least-squares rigid transform mapping `points_a` onto `points_b`
/// (`b ~ R a + t`), scale fixed at 1, `det(R) = +1` enforced.
pub fn umeyama_fit(points_a: &[Vector3<f64>], points_b: &[Vector3<f64>]) -> Result<RigidFit> {
    if points_a.len() != points_b.len() {
        return Err(Error::DegenerateGeometry(format!(
            "point counts differ: {} vs {}",
            points_a.len(),
            points_b.len()
        )));
    }
    let n = points_a.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let nf = n as f64;
    let mean_a: Vector3<f64> = points_a.iter().sum::<Vector3<f64>>() / nf;
    let mean_b: Vector3<f64> = points_b.iter().sum::<Vector3<f64>>() / nf;

    let mut cov = Matrix3::<f64>::zeros();
    for (a, b) in points_a.iter().zip(points_b) {
        cov += (b - mean_b) * (a - mean_a).transpose();
    }
    cov /= nf;

    let svd = cov.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let sv = svd.singular_values;

    // Collinear (or coincident) clouds leave rotation about the line free.
    if sv[0] <= f64::MIN_POSITIVE || sv[1] <= COLLINEAR_RATIO * sv[0] {
        return Err(Error::DegenerateGeometry(format!(
            "points are collinear: singular values {:?}",
            [sv[0], sv[1], sv[2]]
        )));
    }

    // Sign correction on the smallest singular direction keeps det(R) = +1.
    let mut d = Vector3::new(1.0, 1.0, 1.0);
    if (u * v_t).determinant() < 0.0 {
        d[2] = -1.0;
    }
    let r = u * Matrix3::from_diagonal(&d) * v_t;
    let rotation = Quaternion::from_rotation_matrix(&r);
    let translation = mean_b - r * mean_a;

    let ss = RigidFit::objective(&rotation, &translation, points_a, points_b);
    Ok(RigidFit {
        rotation,
        translation,
        rms_residual: (ss / nf).sqrt(),
        low_confidence: false,
    })
}

/// Initial extrinsic estimate from the two aligned translation sequences.
///
/// Flags `low_confidence` when the RMS residual exceeds
/// `residual_threshold` meters.
pub fn initial_extrinsic(pair: &AlignedPair, residual_threshold: f64) -> Result<RigidFit> {
    let pa: Vec<Vector3<f64>> = pair.poses_a.iter().map(|p| p.translation).collect();
    let pb: Vec<Vector3<f64>> = pair.poses_b.iter().map(|p| p.translation).collect();
    let mut fit = umeyama_fit(&pa, &pb)?;
    fit.low_confidence = fit.rms_residual > residual_threshold;
    Ok(fit)
}
