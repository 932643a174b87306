//! Post-calibration verification for non-overlapping fields of view.
//!
//! The two lidars never see the same scene at the same instant, so the
//! check works through time: a kinematic search finds the delay after which
//! the rear sensor occupies the front sensor's old position, rear curb
//! observations are pulled from the delayed window, both observation sets
//! are lifted into a common frame through the extrinsic under test, and the
//! RMSE of rear points against the interpolated front curb polyline scores
//! the extrinsic. Matching uses piecewise-linear interpolation of the
//! 3D polyline over arc length ("sorted points").

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::interpolate_at;
use crate::pose::Pose;
use crate::trajectory::Trajectory;

/// One labeled feature observation in a sensor frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureObs {
    pub label: String,
    pub timestamp: f64,
    pub point: Vector3<f64>,
}

/// Base trajectory plus the known base-to-front mount; everything needed to
/// lift observations out of the moving sensor frames.
#[derive(Debug, Clone)]
pub struct VerifyScene<'a> {
    pub base: &'a Trajectory,
    pub base_to_front: Pose,
}

/// Per-anchor kinematic delay estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OffsetSample {
    pub anchor: f64,
    /// Seconds until the rear sensor reaches the front sensor's position.
    pub offset: f64,
    /// Achieved minimum distance (meters).
    pub residual: f64,
}

/// Kinematic time-offset estimate over a set of anchors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OffsetEstimate {
    pub samples: Vec<OffsetSample>,
    pub method: String,
}

impl OffsetEstimate {
    /// Offset at an arbitrary time: linear interpolation between anchors,
    /// clamped at the ends.
    pub fn offset_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        if s.is_empty() {
            return 0.0;
        }
        if t <= s[0].anchor {
            return s[0].offset;
        }
        if t >= s[s.len() - 1].anchor {
            return s[s.len() - 1].offset;
        }
        let i = s.partition_point(|x| x.anchor <= t) - 1;
        let (a, b) = (&s[i], &s[i + 1]);
        let frac = (t - a.anchor) / (b.anchor - a.anchor);
        a.offset + frac * (b.offset - a.offset)
    }

    pub fn mean_offset(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.offset).sum::<f64>() / self.samples.len() as f64
    }

    pub fn mean_residual(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.residual).sum::<f64>() / self.samples.len() as f64
    }

    /// The reverse-direction estimate (front reaching the rear's position
    /// `offset` seconds earlier).
    pub fn negated(&self) -> OffsetEstimate {
        OffsetEstimate {
            samples: self
                .samples
                .iter()
                .map(|s| OffsetSample {
                    anchor: s.anchor + s.offset,
                    offset: -s.offset,
                    residual: s.residual,
                })
                .collect(),
            method: self.method.clone(),
        }
    }
}

/// A fraction of the initial separation the minimum must undercut to count
/// as a genuine pass-over rather than noise on a flat distance profile.
const MIN_APPROACH_RATIO: f64 = 0.75;

/// Estimate, for each anchor time, how long until the rear sensor reaches
/// the front sensor's position there. Positions come from the base
/// trajectory composed with the mounts under test; the search runs over the
/// base trajectory's own sample times within `horizon` seconds.
pub fn kinematic_offset(
    base_traj: &Trajectory,
    anchors: &[f64],
    base_to_front: &Pose,
    base_to_rear: &Pose,
    horizon: f64,
) -> Result<OffsetEstimate> {
    let mut samples = Vec::new();
    let poses = base_traj.poses();
    for &t_i in anchors {
        let anchor_pose = match interpolate_at(base_traj, t_i) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let p_front = anchor_pose.compose(base_to_front).translation;

        let first = poses.partition_point(|p| p.timestamp <= t_i);
        let window: Vec<&Pose> = poses[first..]
            .iter()
            .take_while(|p| p.timestamp <= t_i + horizon)
            .collect();
        if window.len() < 3 {
            continue;
        }
        let distances: Vec<f64> = window
            .iter()
            .map(|p| (p.compose(base_to_rear).translation - p_front).norm())
            .collect();
        let (best, &best_d) = distances
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        // a usable minimum is interior and clearly below the start distance
        if best == 0 || best == distances.len() - 1 || best_d > MIN_APPROACH_RATIO * distances[0] {
            continue;
        }
        samples.push(OffsetSample {
            anchor: t_i,
            offset: window[best].timestamp - t_i,
            residual: best_d,
        });
    }
    if samples.is_empty() {
        return Err(Error::NoForwardMotion(
            "no anchor produced an interior distance minimum within the horizon".into(),
        ));
    }
    Ok(OffsetEstimate {
        samples,
        method: "kinematic-passover".into(),
    })
}

/// Residuals of one curb segment under one extrinsic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentResidual {
    pub label: String,
    pub matched: usize,
    pub unmatched: usize,
    /// None when nothing matched.
    pub rmse: Option<f64>,
}

/// Association outcome for one extrinsic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureMatch {
    pub rmse: f64,
    pub matched_count: usize,
    pub unmatched_count: usize,
    pub per_segment: Vec<SegmentResidual>,
}

/// Before/after comparison with a paired sign test over segments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureMatchReport {
    pub rmse_before: f64,
    pub rmse_after: f64,
    pub matched_before: usize,
    pub matched_after: usize,
    pub segments_compared: usize,
    /// One-sided sign-test p-value for `rmse_after < rmse_before`.
    pub p_value: Option<f64>,
    /// Set when too few segments support the test.
    pub low_power: bool,
    pub per_segment_before: Vec<SegmentResidual>,
    pub per_segment_after: Vec<SegmentResidual>,
}

/// Extra slack (seconds) around the offset-shifted window when selecting
/// rear observations for a segment.
const WINDOW_MARGIN: f64 = 1.0;

fn sort_along_curve(points: &mut Vec<Vector3<f64>>) {
    if points.len() < 2 {
        return;
    }
    let n = points.len() as f64;
    let centroid: Vector3<f64> = points.iter().sum::<Vector3<f64>>() / n;
    let mut cov = Matrix3::<f64>::zeros();
    for p in points.iter() {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let principal = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .unwrap();
    points.sort_by(|a, b| {
        let ka = (a - centroid).dot(&principal);
        let kb = (b - centroid).dot(&principal);
        ka.partial_cmp(&kb).unwrap()
    });
    // collapse duplicates so the polyline has no zero-length segments
    points.dedup_by(|a, b| (*a - *b).norm() < 1e-3);
}

fn distance_to_polyline(p: &Vector3<f64>, polyline: &[Vector3<f64>]) -> f64 {
    if polyline.len() == 1 {
        return (p - polyline[0]).norm();
    }
    let mut best = f64::INFINITY;
    for w in polyline.windows(2) {
        let (u, v) = (w[0], w[1]);
        let d = v - u;
        let len_sq = d.norm_squared();
        let s = if len_sq > 0.0 {
            ((p - u).dot(&d) / len_sq).clamp(0.0, 1.0)
        } else {
            0.0
        };
        best = best.min((p - (u + d.scale(s))).norm());
    }
    best
}

fn lift_to_world(
    obs: &FeatureObs,
    scene: &VerifyScene,
    mount: &Pose,
) -> Result<Vector3<f64>> {
    let base = interpolate_at(scene.base, obs.timestamp)?;
    Ok(base.compose(mount).transform_point(&obs.point))
}

/// Associate rear curb observations with the front curb polylines under an
/// extrinsic hypothesis, after shifting rear selection windows by the
/// kinematic offset. Points farther than `gate` meters from the polyline
/// remain unmatched.
pub fn associate_features(
    front_obs: &[FeatureObs],
    rear_obs: &[FeatureObs],
    offset: &OffsetEstimate,
    extrinsic: &Pose,
    scene: &VerifyScene,
    gate: f64,
) -> Result<FeatureMatch> {
    if front_obs.is_empty() || rear_obs.is_empty() {
        return Err(Error::NoOverlapWindow(
            "a sensor's observation set is empty".into(),
        ));
    }
    let base_to_rear = scene.base_to_front.compose(extrinsic);

    // group front observations into segments by label
    let mut labels: Vec<String> = front_obs.iter().map(|o| o.label.clone()).collect();
    labels.sort();
    labels.dedup();

    let mut per_segment = Vec::new();
    let mut sum_sq = 0.0;
    let mut matched_count = 0usize;
    let mut unmatched_count = 0usize;
    let mut any_candidates = false;

    for label in &labels {
        let seg_obs: Vec<&FeatureObs> = front_obs.iter().filter(|o| &o.label == label).collect();
        let mut polyline = Vec::new();
        let mut t_min = f64::INFINITY;
        let mut t_max = f64::NEG_INFINITY;
        for o in &seg_obs {
            if let Ok(w) = lift_to_world(o, scene, &scene.base_to_front) {
                polyline.push(w);
                t_min = t_min.min(o.timestamp);
                t_max = t_max.max(o.timestamp);
            }
        }
        if polyline.is_empty() {
            continue;
        }
        sort_along_curve(&mut polyline);

        let window = (
            t_min + offset.offset_at(t_min) - WINDOW_MARGIN,
            t_max + offset.offset_at(t_max) + WINDOW_MARGIN,
        );
        let lo = window.0.min(window.1);
        let hi = window.0.max(window.1);

        let mut matched = 0usize;
        let mut unmatched = 0usize;
        let mut seg_sum_sq = 0.0;
        for o in rear_obs {
            // same feature class, observed inside the delayed window
            if &o.label != label || o.timestamp < lo || o.timestamp > hi {
                continue;
            }
            any_candidates = true;
            let w = match lift_to_world(o, scene, &base_to_rear) {
                Ok(w) => w,
                Err(_) => continue,
            };
            let d = distance_to_polyline(&w, &polyline);
            if d <= gate {
                matched += 1;
                seg_sum_sq += d * d;
            } else {
                unmatched += 1;
            }
        }
        matched_count += matched;
        unmatched_count += unmatched;
        sum_sq += seg_sum_sq;
        per_segment.push(SegmentResidual {
            label: label.clone(),
            matched,
            unmatched,
            rmse: if matched > 0 {
                Some((seg_sum_sq / matched as f64).sqrt())
            } else {
                None
            },
        });
    }

    if !any_candidates {
        return Err(Error::NoOverlapWindow(
            "the time offset leaves no rear observations inside any segment window".into(),
        ));
    }
    let rmse = if matched_count > 0 {
        (sum_sq / matched_count as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(FeatureMatch {
        rmse,
        matched_count,
        unmatched_count,
        per_segment,
    })
}

/// One-sided sign test: probability of at least `k_plus` positives among
/// `m` fair coin flips.
fn sign_test_p(k_plus: usize, m: usize) -> f64 {
    let ln_half = 0.5f64.ln();
    let mut p = 0.0;
    for i in k_plus..=m {
        // ln C(m, i)
        let mut ln_c = 0.0;
        for j in 1..=i {
            ln_c += ((m - i + j) as f64).ln() - (j as f64).ln();
        }
        p += (ln_c + m as f64 * ln_half).exp();
    }
    p.min(1.0)
}

/// Run the association under two extrinsics on identical inputs and compare
/// per-segment residuals with a paired sign test.
#[allow(clippy::too_many_arguments)]
pub fn compare(
    before: &Pose,
    after: &Pose,
    front_obs: &[FeatureObs],
    rear_obs: &[FeatureObs],
    offset: &OffsetEstimate,
    scene: &VerifyScene,
    gate: f64,
) -> Result<FeatureMatchReport> {
    let run_before = associate_features(front_obs, rear_obs, offset, before, scene, gate)?;
    let run_after = associate_features(front_obs, rear_obs, offset, after, scene, gate)?;

    let mut diffs = Vec::new();
    for sb in &run_before.per_segment {
        if let Some(sa) = run_after.per_segment.iter().find(|s| s.label == sb.label) {
            if let (Some(rb), Some(ra)) = (sb.rmse, sa.rmse) {
                diffs.push(rb - ra);
            }
        }
    }
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let (p_value, low_power) = if diffs.len() < 2 {
        (None, true)
    } else if nonzero.is_empty() {
        // identical residuals everywhere: no evidence either way
        (Some(1.0), false)
    } else {
        let k_plus = nonzero.iter().filter(|d| **d > 0.0).count();
        (Some(sign_test_p(k_plus, nonzero.len())), false)
    };

    Ok(FeatureMatchReport {
        rmse_before: run_before.rmse,
        rmse_after: run_after.rmse,
        matched_before: run_before.matched_count,
        matched_after: run_after.matched_count,
        segments_compared: diffs.len(),
        p_value,
        low_power,
        per_segment_before: run_before.per_segment,
        per_segment_after: run_after.per_segment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;
    use crate::synth::{generate, RigSpec, TrajectorySpec};

    fn straight_base(speed: f64, duration: f64, rate: f64) -> Trajectory {
        let n = (duration * rate) as usize;
        let poses = (0..=n)
            .map(|k| {
                let t = k as f64 / rate;
                Pose::new(
                    t,
                    Quaternion::IDENTITY,
                    Vector3::new(speed * t, 0.0, 0.0),
                )
            })
            .collect();
        Trajectory::new("base", poses).unwrap()
    }

    #[test]
    fn straight_drive_offset_matches_kinematics() {
        // sensors 5 m apart longitudinally, 5 m/s: the rear reaches the
        // front's old position after one second
        let base = straight_base(5.0, 30.0, 10.0);
        let front = Pose::new(0.0, Quaternion::IDENTITY, Vector3::new(2.5, 0.4, 1.5));
        let rear = Pose::new(0.0, Quaternion::IDENTITY, Vector3::new(-2.5, 0.4, 1.5));
        let anchors: Vec<f64> = (1..10).map(|k| k as f64).collect();
        let est = kinematic_offset(&base, &anchors, &front, &rear, 30.0).unwrap();
        assert!(!est.samples.is_empty());
        for s in &est.samples {
            assert!((s.offset - 1.0).abs() <= 0.2, "offset {}", s.offset);
            assert!(s.residual < 0.1);
        }
    }

    #[test]
    fn stationary_vehicle_has_no_offset() {
        let poses = (0..100)
            .map(|k| Pose::identity(k as f64 * 0.1))
            .collect::<Vec<_>>();
        let base = Trajectory::new("base", poses).unwrap();
        let front = Pose::new(0.0, Quaternion::IDENTITY, Vector3::new(2.5, 0.0, 0.0));
        let rear = Pose::new(0.0, Quaternion::IDENTITY, Vector3::new(-2.5, 0.0, 0.0));
        let err = kinematic_offset(&base, &[1.0, 2.0, 3.0], &front, &rear, 5.0);
        assert!(matches!(err, Err(Error::NoForwardMotion(_))));
    }

    fn synth_scene() -> (crate::synth::SynthOutput, RigSpec) {
        let rig = RigSpec::default();
        let out = generate(&rig, &TrajectorySpec::default()).unwrap();
        (out, rig)
    }

    fn flatten_obs(
        tracks: &[crate::synth::FeatureTrack],
    ) -> (Vec<FeatureObs>, Vec<FeatureObs>) {
        let mut front = Vec::new();
        let mut rear = Vec::new();
        for t in tracks {
            for (ts, p) in &t.front_observations {
                front.push(FeatureObs {
                    label: t.label.clone(),
                    timestamp: *ts,
                    point: *p,
                });
            }
            for (ts, p) in &t.rear_observations {
                rear.push(FeatureObs {
                    label: t.label.clone(),
                    timestamp: *ts,
                    point: *p,
                });
            }
        }
        (front, rear)
    }

    fn scene_offset(out: &crate::synth::SynthOutput, rig: &RigSpec) -> OffsetEstimate {
        let base_to_rear = rig.base_to_front.compose(&rig.extrinsic_fr);
        let end = out.base_world.end_time().unwrap();
        let anchors: Vec<f64> = (1..(end as usize).saturating_sub(10))
            .step_by(2)
            .map(|k| k as f64)
            .collect();
        kinematic_offset(
            &out.base_world,
            &anchors,
            &rig.base_to_front,
            &base_to_rear,
            30.0,
        )
        .unwrap()
    }

    #[test]
    fn ground_truth_extrinsic_scores_zero() {
        let (out, rig) = synth_scene();
        let (front, rear) = flatten_obs(&out.features);
        let offset = scene_offset(&out, &rig);
        let scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front,
        };
        let m = associate_features(&front, &rear, &offset, &rig.extrinsic_fr, &scene, 1.0)
            .unwrap();
        assert!(m.matched_count > 500, "matched {}", m.matched_count);
        assert!(m.rmse < 1e-9, "rmse {}", m.rmse);
    }

    fn base_frame_shift(rig: &RigSpec, offset_vec: Vector3<f64>) -> Pose {
        let shift = Pose::new(0.0, Quaternion::IDENTITY, offset_vec);
        rig.base_to_front
            .inverse()
            .compose(&shift)
            .compose(&rig.base_to_front)
            .compose(&rig.extrinsic_fr)
    }

    #[test]
    fn vertical_shift_shows_up_as_rmse() {
        let (out, rig) = synth_scene();
        let (front, rear) = flatten_obs(&out.features);
        let offset = scene_offset(&out, &rig);
        let scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front,
        };
        // 10 cm up in the vehicle base frame stays perpendicular to the
        // near-horizontal curb whatever the heading does
        let perturbed = base_frame_shift(&rig, Vector3::new(0.0, 0.0, 0.1));
        let m = associate_features(&front, &rear, &offset, &perturbed, &scene, 1.0).unwrap();
        assert!(
            (m.rmse - 0.1).abs() <= 0.02,
            "rmse {} not within 20% of 0.1",
            m.rmse
        );
    }

    #[test]
    fn lateral_shift_shows_up_as_rmse() {
        let (out, rig) = synth_scene();
        let (front, rear) = flatten_obs(&out.features);
        let offset = scene_offset(&out, &rig);
        let scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front,
        };
        // a sideways shift partially projects along the curb because the
        // heading turns during the front-to-rear observation delay, so the
        // visible residual is a large fraction of 10 cm rather than all of it
        let perturbed = base_frame_shift(&rig, Vector3::new(0.0, 0.1, 0.0));
        let m = associate_features(&front, &rear, &offset, &perturbed, &scene, 1.0).unwrap();
        assert!(
            m.rmse > 0.04 && m.rmse < 0.11,
            "rmse {} outside the expected band",
            m.rmse
        );
    }

    #[test]
    fn empty_rear_set_is_no_overlap() {
        let (out, rig) = synth_scene();
        let (front, _) = flatten_obs(&out.features);
        let offset = OffsetEstimate {
            samples: vec![OffsetSample {
                anchor: 0.0,
                offset: 2.0,
                residual: 0.0,
            }],
            method: "fixed".into(),
        };
        let scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front,
        };
        let err = associate_features(&front, &[], &offset, &rig.extrinsic_fr, &scene, 1.0);
        assert!(matches!(err, Err(Error::NoOverlapWindow(_))));
    }

    #[test]
    fn loosening_the_gate_never_loses_matches() {
        let (out, rig) = synth_scene();
        let (front, rear) = flatten_obs(&out.features);
        let offset = scene_offset(&out, &rig);
        let scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front,
        };
        let shift = Pose::new(0.0, Quaternion::IDENTITY, Vector3::new(0.1, 0.3, 0.0));
        let bad = rig.extrinsic_fr.compose(&shift);
        let mut last = 0usize;
        for gate in [0.05, 0.2, 0.5, 1.0, 3.0] {
            let m = associate_features(&front, &rear, &offset, &bad, &scene, gate).unwrap();
            assert!(m.matched_count >= last);
            last = m.matched_count;
        }
    }

    #[test]
    fn role_swap_preserves_rmse_scale() {
        let (out, rig) = synth_scene();
        let (front, rear) = flatten_obs(&out.features);
        let offset = scene_offset(&out, &rig);
        let scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front,
        };
        let shift = Pose::new(0.0, Quaternion::IDENTITY, Vector3::new(0.0, 0.08, 0.0));
        let perturbed = rig.extrinsic_fr.compose(&shift);
        let fwd = associate_features(&front, &rear, &offset, &perturbed, &scene, 1.0).unwrap();

        // swapped roles: rear observations build the polylines (lifted with
        // the extrinsic under test), front points are matched against them
        let swapped_scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front.compose(&perturbed),
        };
        let inverse_ext = perturbed.inverse();
        let rev = associate_features(
            &rear,
            &front,
            &offset.negated(),
            &inverse_ext,
            &swapped_scene,
            1.0,
        )
        .unwrap();
        assert!(
            (fwd.rmse - rev.rmse).abs() < 0.02,
            "fwd {} vs rev {}",
            fwd.rmse,
            rev.rmse
        );
    }

    #[test]
    fn compare_prefers_the_truth() {
        let (out, rig) = synth_scene();
        let (front, rear) = flatten_obs(&out.features);
        let offset = scene_offset(&out, &rig);
        let scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front,
        };
        let shift = Pose::new(0.0, Quaternion::IDENTITY, Vector3::new(0.05, 0.1, -0.03));
        let cad = rig.extrinsic_fr.compose(&shift);
        let report = compare(
            &cad,
            &rig.extrinsic_fr,
            &front,
            &rear,
            &offset,
            &scene,
            1.0,
        )
        .unwrap();
        assert!(report.rmse_after < report.rmse_before);
        assert!(report.segments_compared >= 20);
        assert!(report.p_value.unwrap() < 0.05);
        assert!(!report.low_power);
    }

    #[test]
    fn identical_extrinsics_compare_equal() {
        let (out, rig) = synth_scene();
        let (front, rear) = flatten_obs(&out.features);
        let offset = scene_offset(&out, &rig);
        let scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front,
        };
        let report = compare(
            &rig.extrinsic_fr,
            &rig.extrinsic_fr,
            &front,
            &rear,
            &offset,
            &scene,
            1.0,
        )
        .unwrap();
        assert_eq!(report.rmse_before, report.rmse_after);
        assert_eq!(report.matched_before, report.matched_after);
    }

    #[test]
    fn single_segment_is_low_power() {
        let (out, rig) = synth_scene();
        let (front, rear) = flatten_obs(&out.features);
        let only: Vec<FeatureObs> = front
            .into_iter()
            .filter(|o| o.label == "curb_05")
            .collect();
        let offset = scene_offset(&out, &rig);
        let scene = VerifyScene {
            base: &out.base_world,
            base_to_front: rig.base_to_front,
        };
        let shift = Pose::new(0.0, Quaternion::IDENTITY, Vector3::new(0.0, 0.1, 0.0));
        let report = compare(
            &rig.extrinsic_fr.compose(&shift),
            &rig.extrinsic_fr,
            &only,
            &rear,
            &offset,
            &scene,
            1.0,
        )
        .unwrap();
        assert!(report.low_power);
        assert!(report.p_value.is_none());
    }

    #[test]
    fn sign_test_values() {
        // 20 of 20 positives: p = 2^-20
        assert!((sign_test_p(20, 20) - 2f64.powi(-20)).abs() < 1e-12);
        // at least half of two flips: p = 0.75
        assert!((sign_test_p(1, 2) - 0.75).abs() < 1e-12);
        assert!((sign_test_p(0, 5) - 1.0).abs() < 1e-12);
    }
}
