//! Trajectory-consistency metrics.
//!
//! RPE compares relative motions over a fixed interval,
//! `RPE_ij = (T_a(t_i)^-1 T_a(t_j))^-1 (T_b(t_i)^-1 T_b(t_j))`, and measures
//! local consistency; APE compares absolute poses,
//! `APE_i = T_a(t_i)^-1 T_b(t_i)`, and measures global consistency. Both
//! require the trajectories to share a timestamp grid (align first).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pose::Pose;
use crate::tol::TIME_EPS;
use crate::trajectory::Trajectory;

/// Interval for RPE, as a grid-step count or a time span.
#[derive(Debug, Clone, Copy)]
pub enum Delta {
    Steps(usize),
    Seconds(f64),
}

impl Default for Delta {
    fn default() -> Self {
        Delta::Steps(1)
    }
}

/// Summary statistics of one error channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub rmse: f64,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub max: f64,
}

impl SeriesStats {
    pub fn of(values: &[f64]) -> SeriesStats {
        if values.is_empty() {
            return SeriesStats {
                rmse: 0.0,
                mean: 0.0,
                median: 0.0,
                std: 0.0,
                max: 0.0,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mean_sq = values.iter().map(|v| v * v).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
        };
        SeriesStats {
            rmse: mean_sq.sqrt(),
            mean,
            median,
            std: (mean_sq - mean * mean).max(0.0).sqrt(),
            max: *sorted.last().unwrap(),
        }
    }
}

/// Per-sample pose errors with summary statistics per channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorSeries {
    pub timestamps: Vec<f64>,
    /// Meters per sample.
    pub translation_err: Vec<f64>,
    /// Radians per sample (geodesic angle).
    pub rotation_err: Vec<f64>,
    pub translation_stats: SeriesStats,
    pub rotation_stats: SeriesStats,
}

impl ErrorSeries {
    fn from_errors(timestamps: Vec<f64>, errors: Vec<(f64, f64)>) -> ErrorSeries {
        let translation_err: Vec<f64> = errors.iter().map(|e| e.0).collect();
        let rotation_err: Vec<f64> = errors.iter().map(|e| e.1).collect();
        let translation_stats = SeriesStats::of(&translation_err);
        let rotation_stats = SeriesStats::of(&rotation_err);
        ErrorSeries {
            timestamps,
            translation_err,
            rotation_err,
            translation_stats,
            rotation_stats,
        }
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }
}

fn check_same_grid(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    for (i, (ta, tb)) in a.timestamps().zip(b.timestamps()).enumerate() {
        if (ta - tb).abs() > TIME_EPS {
            return Err(Error::GridMismatch(format!(
                "timestamp {i} differs: {ta} vs {tb}"
            )));
        }
    }
    if a.is_empty() {
        return Err(Error::GridMismatch("empty trajectories".into()));
    }
    Ok(())
}

/// Magnitudes of an error pose: (|translation|, rotation geodesic angle).
fn error_magnitudes(e: &Pose) -> (f64, f64) {
    let r = e.rotation.to_rotation_matrix();
    let cos_theta = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    (e.translation.norm(), cos_theta.acos())
}

/// Relative pose error between two same-grid trajectories.
pub fn rpe(a: &Trajectory, b: &Trajectory, delta: Delta) -> Result<ErrorSeries> {
    check_same_grid(a, b)?;
    let step = match delta {
        Delta::Steps(s) => s.max(1),
        Delta::Seconds(dt) => {
            let times: Vec<f64> = a.timestamps().collect();
            let mean_dt = (times[times.len() - 1] - times[0]) / (times.len() - 1).max(1) as f64;
            ((dt / mean_dt).round() as usize).max(1)
        }
    };
    let pa = a.poses();
    let pb = b.poses();
    let mut timestamps = Vec::new();
    let mut errors = Vec::new();
    for i in 0..pa.len().saturating_sub(step) {
        let j = i + step;
        let rel_a = pa[i].between(&pa[j]);
        let rel_b = pb[i].between(&pb[j]);
        let e = rel_a.inverse().compose(&rel_b);
        timestamps.push(pa[i].timestamp);
        errors.push(error_magnitudes(&e));
    }
    Ok(ErrorSeries::from_errors(timestamps, errors))
}

/// Absolute pose error between two same-grid trajectories. No alignment is
/// applied first: the series measures the raw frame offset.
pub fn ape(a: &Trajectory, b: &Trajectory) -> Result<ErrorSeries> {
    check_same_grid(a, b)?;
    let mut timestamps = Vec::new();
    let mut errors = Vec::new();
    for (pa, pb) in a.poses().iter().zip(b.poses()) {
        let e = pa.between(pb);
        timestamps.push(pa.timestamp);
        errors.push(error_magnitudes(&e));
    }
    Ok(ErrorSeries::from_errors(timestamps, errors))
}
