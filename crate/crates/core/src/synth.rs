//! Synthetic rig simulator.
//!
//! Produces a ground-truth extrinsic, per-sensor asynchronous trajectories
//! (optionally noisy) and labeled curb-like feature points, all derived
//! from one analytic world trajectory. The world path is piecewise constant
//! screw between keyposes, so screw interpolation between samples that fall
//! inside one segment is exact and the noiseless pipeline can be checked to
//! float precision.
//!
//! Everything is deterministic in the seed: one `ChaCha8` stream drives the
//! trajectory randomization and the motion noise in a fixed order.

use nalgebra::Vector3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::handeye::CalibrationResult;
use crate::pose::Pose;
use crate::quat::Quaternion;
use crate::trajectory::Trajectory;

/// Spacing of world-path keyposes (seconds). A multiple of the default
/// sample interval, so segment boundaries land on sample times and never
/// inside an interpolation bracket.
const KEYPOSE_DT: f64 = 1.0;

/// How motion noise is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseMode {
    /// Perturb each relative motion, then re-compose (odometry-like drift).
    RelativeMotion,
    /// Perturb each absolute pose independently.
    AbsolutePose,
}

/// Gaussian noise levels on the SE(3) tangent.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Per-axis translation sigma (meters).
    pub trans_sigma: f64,
    /// Per-axis rotation sigma (radians, axis-angle).
    pub rot_sigma: f64,
    pub mode: NoiseMode,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            trans_sigma: 0.0,
            rot_sigma: 0.0,
            mode: NoiseMode::RelativeMotion,
        }
    }
}

/// Curb feature generation parameters.
///
/// Each curb point is tied to the path time of its drive-by; the sensors
/// see it inside time windows around that moment (front before, rear
/// after), reproducing the delayed re-observation geometry of a forward
/// and a backward looking lidar.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FeatureSpec {
    /// Number of separate curb segments along the path.
    pub segments: usize,
    /// Points sampled along each segment.
    pub points_per_segment: usize,
    /// Lateral offset of the curb from the driven path (meters, +left).
    pub lateral_offset: f64,
    /// Curb height above the path (meters).
    pub height: f64,
    /// `(near, far)` seconds before its drive-by that the front sensor
    /// sees a point.
    pub front_view: (f64, f64),
    /// `(near, far)` seconds after its drive-by that the rear sensor
    /// sees a point.
    pub rear_view: (f64, f64),
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self {
            segments: 24,
            points_per_segment: 12,
            lateral_offset: 3.0,
            height: 0.2,
            front_view: (0.5, 5.0),
            rear_view: (0.5, 5.0),
        }
    }
}

/// Full rig description: mounts, clocks, noise, seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigSpec {
    /// Ground-truth front-to-rear extrinsic.
    pub extrinsic_fr: Pose,
    /// Known vehicle-base-to-front mount.
    pub base_to_front: Pose,
    pub front_rate_hz: f64,
    pub rear_rate_hz: f64,
    pub front_phase: f64,
    pub rear_phase: f64,
    pub noise: NoiseSpec,
    pub features: FeatureSpec,
    pub seed: u64,
}

/// Shape of the driven world trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryKind {
    /// One fixed screw for the whole duration.
    ConstantScrew,
    /// 3D figure-eight with varying yaw, pitch and roll (non-planar).
    Figure8,
    /// Flat circular loop, yaw only (rotation axes all vertical).
    PlanarLoop,
    /// Random keyposes joined by screws, axes kept non-parallel.
    PiecewiseRandomScrew,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub kind: TrajectoryKind,
    pub duration: f64,
    pub scale: f64,
}

/// One curb segment: world polyline plus per-sensor observations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureTrack {
    pub label: String,
    /// World-frame points along the curb curve.
    pub points: Vec<Vector3<f64>>,
    /// `(timestamp, point in front sensor frame)`.
    pub front_observations: Vec<(f64, Vector3<f64>)>,
    /// `(timestamp, point in rear sensor frame)`.
    pub rear_observations: Vec<(f64, Vector3<f64>)>,
}

/// Everything one simulation run produces.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    /// Front odometry, own frame, starts at identity.
    pub front: Trajectory,
    /// Rear odometry, own frame, starts at identity.
    pub rear: Trajectory,
    /// Ground-truth extrinsic (same as `rig.extrinsic_fr`).
    pub ground_truth: Pose,
    pub features: Vec<FeatureTrack>,
    /// Noise-free base trajectory in the world frame, sampled at the union
    /// of both sensors' sample times.
    pub base_world: Trajectory,
}

/// Extrinsic error against the simulated ground truth.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GroundTruthError {
    pub translation_m: f64,
    pub rotation_rad: f64,
}

/// World path as keyposes joined by constant screws.
pub(crate) struct WorldPath {
    times: Vec<f64>,
    poses: Vec<Pose>,
}

impl WorldPath {
    fn pose_at(&self, t: f64) -> Pose {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.poses[0];
        }
        if t >= self.times[n - 1] {
            return self.poses[n - 1];
        }
        let i = self.times.partition_point(|&k| k <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        if t == t0 {
            return self.poses[i];
        }
        let frac = (t - t0) / (t1 - t0);
        let rel = self.poses[i].between(&self.poses[i + 1]).to_dq();
        let step = rel.pow(frac).expect("keypose motions are unit");
        let mut p = self.poses[i].compose(&Pose::from_dq(&step, t).expect("unit"));
        p.timestamp = t;
        p
    }
}

fn ypr(yaw: f64, pitch: f64, roll: f64) -> Quaternion {
    Quaternion::from_axis_angle(&Vector3::z(), yaw)
        .mul(&Quaternion::from_axis_angle(&Vector3::y(), pitch))
        .mul(&Quaternion::from_axis_angle(&Vector3::x(), roll))
        .normalized()
}

fn build_world_path(traj: &TrajectorySpec, rng: &mut ChaCha8Rng) -> WorldPath {
    let mut times: Vec<f64> = Vec::new();
    let mut t = 0.0;
    while t < traj.duration - 1e-9 {
        times.push(t);
        t += KEYPOSE_DT;
    }
    times.push(traj.duration);

    let poses: Vec<Pose> = match traj.kind {
        TrajectoryKind::ConstantScrew => {
            let axis = Vector3::new(0.15, -0.1, 1.0);
            let end = Pose::new(
                traj.duration,
                Quaternion::from_axis_angle(&axis, 0.9),
                Vector3::new(1.0, 0.35, 0.12).scale(traj.scale),
            );
            let full = Pose::identity(0.0).between(&end).to_dq();
            times
                .iter()
                .map(|&tk| {
                    let q = full.pow(tk / traj.duration).expect("unit");
                    Pose::from_dq(&q, tk).expect("unit")
                })
                .collect()
        }
        TrajectoryKind::Figure8 => times
            .iter()
            .map(|&tk| {
                // three laps per run: stronger per-motion rotation relative
                // to odometry noise
                let u = 6.0 * std::f64::consts::PI * tk / traj.duration;
                let pos = Vector3::new(
                    traj.scale * u.sin(),
                    0.5 * traj.scale * (2.0 * u).sin(),
                    0.1 * traj.scale * (2.0 * u + 0.9).sin(),
                );
                let dx = u.cos();
                let dy = (2.0 * u).cos();
                let dz = 0.2 * (2.0 * u + 0.9).cos();
                let yaw = dy.atan2(dx);
                let pitch = -dz.atan2((dx * dx + dy * dy).sqrt());
                let roll = 0.3 * (2.0 * u + 0.4).sin();
                Pose::new(tk, ypr(yaw, pitch, roll), pos)
            })
            .collect(),
        TrajectoryKind::PlanarLoop => times
            .iter()
            .map(|&tk| {
                // flat figure-eight: turning centers vary but every rotation
                // axis stays vertical
                let u = 2.0 * std::f64::consts::PI * tk / traj.duration;
                let pos = Vector3::new(
                    traj.scale * u.sin(),
                    0.5 * traj.scale * (2.0 * u).sin(),
                    0.0,
                );
                let yaw = (2.0 * u).cos().atan2(u.cos());
                Pose::new(tk, ypr(yaw, 0.0, 0.0), pos)
            })
            .collect(),
        TrajectoryKind::PiecewiseRandomScrew => {
            let mut poses = vec![Pose::identity(0.0)];
            let step_scale = traj.scale / times.len() as f64;
            let mut last_axis: Option<Vector3<f64>> = None;
            for (k, &tk) in times.iter().enumerate().skip(1) {
                let axis = loop {
                    let candidate = Vector3::new(
                        rng.random_range(-1.0_f64..1.0),
                        rng.random_range(-1.0_f64..1.0),
                        rng.random_range(-1.0_f64..1.0),
                    );
                    if candidate.norm() < 0.1 {
                        continue;
                    }
                    let candidate = candidate.normalize();
                    match last_axis {
                        Some(prev) if prev.dot(&candidate).abs() > 0.95 => continue,
                        _ => break candidate,
                    }
                };
                last_axis = Some(axis);
                let angle = rng.random_range(0.15..0.5);
                let trans = Vector3::new(
                    rng.random_range(0.5..1.5) * step_scale,
                    rng.random_range(-0.5..0.5) * step_scale,
                    rng.random_range(-0.2..0.2) * step_scale,
                );
                let motion = Pose::new(0.0, Quaternion::from_axis_angle(&axis, angle), trans);
                let mut next = poses[k - 1].compose(&motion);
                next.timestamp = tk;
                poses.push(next);
            }
            poses
        }
    };

    WorldPath { times, poses }
}

fn validate(rig: &RigSpec, traj: &TrajectorySpec) -> Result<()> {
    if !traj.duration.is_finite() || traj.duration <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "duration must be positive, got {}",
            traj.duration
        )));
    }
    if !traj.scale.is_finite() || traj.scale <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "scale must be positive, got {}",
            traj.scale
        )));
    }
    let rate_ok = |r: f64| r.is_finite() && r > 0.0;
    if !rate_ok(rig.front_rate_hz) || !rate_ok(rig.rear_rate_hz) {
        return Err(Error::InvalidSpec("sensor rates must be positive".into()));
    }
    if rig.noise.trans_sigma < 0.0 || rig.noise.rot_sigma < 0.0 {
        return Err(Error::InvalidSpec("noise sigmas must be >= 0".into()));
    }
    if rig.front_phase < 0.0 || rig.rear_phase < 0.0 {
        return Err(Error::InvalidSpec("phase offsets must be >= 0".into()));
    }
    Ok(())
}

fn sample_times(phase: f64, rate_hz: f64, duration: f64) -> Vec<f64> {
    let dt = 1.0 / rate_hz;
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let t = phase + k as f64 * dt;
        if t > duration + 1e-12 {
            break;
        }
        out.push(t);
        k += 1;
    }
    out
}

fn noise_pose(rng: &mut ChaCha8Rng, noise: &NoiseSpec) -> Pose {
    let draw3 = |rng: &mut ChaCha8Rng, sigma: f64| {
        if sigma <= 0.0 {
            return Vector3::zeros();
        }
        let normal = Normal::new(0.0, sigma).expect("sigma validated");
        Vector3::new(
            normal.sample(rng),
            normal.sample(rng),
            normal.sample(rng),
        )
    };
    let rot_vec = draw3(rng, noise.rot_sigma);
    let trans = draw3(rng, noise.trans_sigma);
    Pose::new(0.0, Quaternion::from_scaled_axis(&rot_vec), trans)
}

/// Rebase world samples into odometry starting at identity, then apply noise.
fn to_noisy_odometry(
    sensor_id: &str,
    world_poses: Vec<Pose>,
    noise: &NoiseSpec,
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory> {
    let clean = Trajectory::new(sensor_id, world_poses)?.rebased_at(0);
    if noise.trans_sigma <= 0.0 && noise.rot_sigma <= 0.0 {
        return Ok(clean);
    }
    let poses = clean.poses();
    let noisy = match noise.mode {
        NoiseMode::RelativeMotion => {
            let mut out = vec![poses[0]];
            for i in 1..poses.len() {
                let motion = poses[i - 1].between(&poses[i]);
                let noisy_motion = motion.compose(&noise_pose(rng, noise));
                let mut next = out[i - 1].compose(&noisy_motion);
                next.timestamp = poses[i].timestamp;
                out.push(next);
            }
            out
        }
        NoiseMode::AbsolutePose => poses
            .iter()
            .map(|p| {
                let mut q = p.compose(&noise_pose(rng, noise));
                q.timestamp = p.timestamp;
                q
            })
            .collect(),
    };
    Trajectory::new(sensor_id, noisy)
}

fn generate_features(
    rig: &RigSpec,
    traj: &TrajectorySpec,
    path: &WorldPath,
    front_times: &[f64],
    rear_times: &[f64],
) -> Vec<FeatureTrack> {
    let spec = &rig.features;
    if spec.segments == 0 || spec.points_per_segment == 0 {
        return Vec::new();
    }
    let margin = 0.07 * traj.duration;
    let usable = traj.duration - 2.0 * margin;
    let slot = usable / spec.segments as f64;

    let base_to_rear = rig.base_to_front.compose(&rig.extrinsic_fr);
    let mut tracks = Vec::with_capacity(spec.segments);
    for s in 0..spec.segments {
        let start = margin + s as f64 * slot;
        let seg_dur = 0.5 * slot;
        let mut point_times = Vec::with_capacity(spec.points_per_segment);
        let points: Vec<Vector3<f64>> = (0..spec.points_per_segment)
            .map(|j| {
                let tau = start + seg_dur * j as f64 / (spec.points_per_segment - 1).max(1) as f64;
                point_times.push(tau);
                let base = path.pose_at(tau);
                base.transform_point(&Vector3::new(0.0, spec.lateral_offset, spec.height))
            })
            .collect();

        // window = (lo, hi) seconds relative to each point's drive-by time
        let observe = |times: &[f64],
                       mount: &Pose,
                       window: (f64, f64)|
         -> Vec<(f64, Vector3<f64>)> {
            let mut obs = Vec::new();
            for &t in times {
                let sensor_inv = path.pose_at(t).compose(mount).inverse();
                for (c, &tau) in points.iter().zip(&point_times) {
                    let dt = t - tau;
                    if dt >= window.0 && dt <= window.1 {
                        obs.push((t, sensor_inv.transform_point(c)));
                    }
                }
            }
            obs
        };

        let front_observations = observe(
            front_times,
            &rig.base_to_front,
            (-spec.front_view.1, -spec.front_view.0),
        );
        let rear_observations = observe(
            rear_times,
            &base_to_rear,
            (spec.rear_view.0, spec.rear_view.1),
        );
        tracks.push(FeatureTrack {
            label: format!("curb_{s:02}"),
            points,
            front_observations,
            rear_observations,
        });
    }
    tracks
}

/// Simulate the rig: per-sensor odometry, ground truth and curb features.
pub fn generate(rig: &RigSpec, traj: &TrajectorySpec) -> Result<SynthOutput> {
    validate(rig, traj)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rig.seed);
    let path = build_world_path(traj, &mut rng);

    let front_times = sample_times(rig.front_phase, rig.front_rate_hz, traj.duration);
    let rear_times = sample_times(rig.rear_phase, rig.rear_rate_hz, traj.duration);
    if front_times.len() < 2 || rear_times.len() < 2 {
        return Err(Error::InvalidSpec(
            "duration too short for the sensor rates".into(),
        ));
    }

    let base_to_rear = rig.base_to_front.compose(&rig.extrinsic_fr);
    let world_at = |times: &[f64], mount: &Pose| -> Vec<Pose> {
        times
            .iter()
            .map(|&t| {
                let mut p = path.pose_at(t).compose(mount);
                p.timestamp = t;
                p
            })
            .collect()
    };

    let front = to_noisy_odometry(
        "front",
        world_at(&front_times, &rig.base_to_front),
        &rig.noise,
        &mut rng,
    )?;
    let rear = to_noisy_odometry(
        "rear",
        world_at(&rear_times, &base_to_rear),
        &rig.noise,
        &mut rng,
    )?;

    // union grid: every keypose corner is a sample, so interpolating the
    // base path between samples never crosses a screw-segment boundary
    let mut base_times: Vec<f64> = front_times
        .iter()
        .chain(rear_times.iter())
        .copied()
        .collect();
    base_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    base_times.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let base_world = Trajectory::new(
        "base",
        base_times
            .iter()
            .map(|&t| {
                let mut p = path.pose_at(t);
                p.timestamp = t;
                p
            })
            .collect(),
    )?;

    let features = generate_features(rig, traj, &path, &front_times, &rear_times);

    Ok(SynthOutput {
        front,
        rear,
        ground_truth: rig.extrinsic_fr,
        features,
        base_world,
    })
}

/// Error of a calibration result against the rig's ground truth.
pub fn ground_truth_report(rig: &RigSpec, result: &CalibrationResult) -> GroundTruthError {
    let (translation_m, rotation_rad) = rig.extrinsic_fr.error_to(&result.extrinsic_pose);
    GroundTruthError {
        translation_m,
        rotation_rad,
    }
}

/// Rig defaults used by the pipeline configuration: a front-right to
/// rear-left lidar pair with a large yaw offset, 10 Hz clocks skewed by
/// 37 ms, no noise.
impl Default for RigSpec {
    fn default() -> Self {
        let extrinsic = Pose::new(
            0.0,
            ypr(150f64.to_radians(), -1f64.to_radians(), 2f64.to_radians()),
            Vector3::new(-4.8, -2.4, -0.5),
        );
        let base_to_front = Pose::new(
            0.0,
            ypr(-20f64.to_radians(), 0.0, 0.0),
            Vector3::new(3.6, -1.1, 2.4),
        );
        Self {
            extrinsic_fr: extrinsic,
            base_to_front,
            front_rate_hz: 10.0,
            rear_rate_hz: 10.0,
            front_phase: 0.037,
            rear_phase: 0.0,
            noise: NoiseSpec::none(),
            features: FeatureSpec::default(),
            seed: 7,
        }
    }
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        Self {
            kind: TrajectoryKind::Figure8,
            duration: 60.0,
            scale: 20.0,
        }
    }
}
