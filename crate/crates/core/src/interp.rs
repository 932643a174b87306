//! ScLERP interpolation and time alignment of asynchronous trajectories.
//!
//! Screw linear interpolation `ScLERP(n; q1, q2) = q1 (q1^-1 q2)^n` follows
//! the constant-screw geodesic between two unit dual quaternions, which is
//! the shortest path between the two poses on SE(3). Alignment resamples one
//! trajectory onto the other's timestamp grid so downstream motion pairs
//! cover identical intervals.

use serde::{Deserialize, Serialize};

use crate::dq::DualQuaternion;
use crate::error::{Error, Result};
use crate::pose::Pose;
use crate::tol::TIME_EPS;
use crate::trajectory::Trajectory;

/// Which clock supplies the common timestamp grid.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum GridPolicy {
    /// Use sensor A's sample times (A's poses stay exact).
    #[default]
    SensorA,
    /// Use sensor B's sample times.
    SensorB,
    /// Uniform grid with the given step, starting at the overlap start.
    Uniform(f64),
}

/// Two pose sequences on a shared timestamp grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    pub timestamps: Vec<f64>,
    pub poses_a: Vec<Pose>,
    pub poses_b: Vec<Pose>,
}

impl AlignedPair {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }
}

/// Screw linear interpolation between two unit DQs, `n` in `[0, 1]`.
///
/// `q2` is sign-aligned to `q1` first so the interpolation takes the short
/// arc; endpoints are exact up to that sign choice.
pub fn sclerp(q1: &DualQuaternion, q2: &DualQuaternion, n: f64) -> Result<DualQuaternion> {
    q1.check_unit(crate::tol::UNIT_TOL_PRE)?;
    q2.check_unit(crate::tol::UNIT_TOL_PRE)?;
    let q2 = if q1.real.dot(&q2.real) < 0.0 {
        q2.neg()
    } else {
        *q2
    };
    let rel = q1.conjugate().mul(&q2);
    Ok(q1.mul(&rel.pow(n)?).canonicalized())
}

/// Pose at time `t` on the trajectory: exact at samples, ScLERP of the
/// bracketing poses in between.
pub fn interpolate_at(traj: &Trajectory, t: f64) -> Result<Pose> {
    let (start, end) = match (traj.start_time(), traj.end_time()) {
        (Some(s), Some(e)) => (s, e),
        _ => {
            return Err(Error::OutOfRange {
                t,
                start: f64::NAN,
                end: f64::NAN,
            })
        }
    };
    if t < start - TIME_EPS || t > end + TIME_EPS {
        return Err(Error::OutOfRange { t, start, end });
    }
    let t_clamped = t.clamp(start, end);
    let i = traj.bracket_left(t_clamped).expect("t inside span");
    let poses = traj.poses();
    if (poses[i].timestamp - t).abs() <= TIME_EPS {
        return Ok(poses[i]);
    }
    if i + 1 < poses.len() && (poses[i + 1].timestamp - t).abs() <= TIME_EPS {
        return Ok(poses[i + 1]);
    }
    let (p0, p1) = (&poses[i], &poses[i + 1]);
    let n = (t - p0.timestamp) / (p1.timestamp - p0.timestamp);
    let q = sclerp(&p0.to_dq(), &p1.to_dq(), n)?;
    let mut p = Pose::from_dq(&q, t)?;
    p.timestamp = t;
    Ok(p)
}

/// Resample both trajectories onto a common grid inside their time overlap.
///
/// Grid points outside the overlap are dropped, never extrapolated. Errors
/// with `NoOverlap` unless both trajectories keep at least two samples
/// inside the common window.
pub fn align(a: &Trajectory, b: &Trajectory, grid: GridPolicy) -> Result<AlignedPair> {
    let (a0, a1, b0, b1) = match (a.start_time(), a.end_time(), b.start_time(), b.end_time()) {
        (Some(a0), Some(a1), Some(b0), Some(b1)) => (a0, a1, b0, b1),
        _ => return Err(Error::NoOverlap),
    };
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if hi <= lo {
        return Err(Error::NoOverlap);
    }
    let in_window = |t: f64| t >= lo - TIME_EPS && t <= hi + TIME_EPS;
    let samples_inside = |tr: &Trajectory| tr.timestamps().filter(|&t| in_window(t)).count();
    if samples_inside(a) < 2 || samples_inside(b) < 2 {
        return Err(Error::NoOverlap);
    }

    let grid_times: Vec<f64> = match grid {
        GridPolicy::SensorA => a.timestamps().filter(|&t| in_window(t)).collect(),
        GridPolicy::SensorB => b.timestamps().filter(|&t| in_window(t)).collect(),
        GridPolicy::Uniform(dt) => {
            if !dt.is_finite() || dt <= 0.0 {
                return Err(Error::GridMismatch(format!("uniform grid step {dt} <= 0")));
            }
            let n = ((hi - lo) / dt).floor() as usize;
            (0..=n).map(|k| lo + k as f64 * dt).collect()
        }
    };
    if grid_times.len() < 2 {
        return Err(Error::NoOverlap);
    }

    let mut poses_a = Vec::with_capacity(grid_times.len());
    let mut poses_b = Vec::with_capacity(grid_times.len());
    for &t in &grid_times {
        poses_a.push(interpolate_at(a, t)?);
        poses_b.push(interpolate_at(b, t)?);
    }
    Ok(AlignedPair {
        timestamps: grid_times,
        poses_a,
        poses_b,
    })
}
