//! Pipeline configuration: a flat `key = value` text file.
//!
//! Unknown keys are rejected so typos fail loudly. Every key has a default;
//! `PipelineConfig::default_file()` prints the documented set.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::handeye::SolveOptions;
use crate::interp::GridPolicy;
use crate::pose::Pose;
use crate::quat::Quaternion;
use crate::synth::{
    FeatureSpec, NoiseMode, NoiseSpec, RigSpec, TrajectoryKind, TrajectorySpec,
};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub grid_policy: GridPolicy,
    /// Grid step (seconds) when `grid_policy = uniform`.
    pub grid_dt: f64,
    /// Minimum per-motion rotation (degrees) for a usable pair.
    pub min_angle_deg: f64,
    /// Pairs per solver batch; 0 solves the whole matrix at once.
    pub batch_size: usize,
    /// Screw-congruence tolerance on DQ scalar parts.
    pub congruence_tol: f64,
    /// `NearPlanar` when `sigma_6/sigma_5` drops below this.
    pub degeneracy_threshold: f64,
    /// Axis gate (degrees) applied with a confident initial fit.
    pub init_axis_gate_deg: f64,
    /// Initial fit flagged low-confidence above this RMS residual (meters).
    pub init_residual_threshold: f64,
    /// Feature association gate (meters).
    pub gating_distance: f64,
    /// Kinematic offset search horizon (seconds).
    pub offset_horizon: f64,
    /// Spacing of offset anchors (seconds).
    pub offset_anchor_step: f64,
    pub noise_trans_sigma: f64,
    pub noise_rot_sigma_deg: f64,
    pub noise_mode: NoiseMode,
    pub seed: u64,
    pub base_to_front: Pose,
    /// Simulation ground-truth extrinsic.
    pub extrinsic: Pose,
    pub traj_kind: TrajectoryKind,
    pub traj_duration: f64,
    pub traj_scale: f64,
    pub front_rate_hz: f64,
    pub rear_rate_hz: f64,
    pub front_phase: f64,
    pub rear_phase: f64,
    pub curb_segments: usize,
    pub curb_points: usize,
    pub curb_offset: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let rig = RigSpec::default();
        let traj = TrajectorySpec::default();
        Self {
            grid_policy: GridPolicy::SensorA,
            grid_dt: 0.1,
            min_angle_deg: 0.5,
            batch_size: 50,
            congruence_tol: 0.02,
            degeneracy_threshold: 1e-3,
            init_axis_gate_deg: 30.0,
            init_residual_threshold: 0.5,
            gating_distance: 1.0,
            offset_horizon: 30.0,
            offset_anchor_step: 2.0,
            noise_trans_sigma: 0.0,
            noise_rot_sigma_deg: 0.0,
            noise_mode: NoiseMode::RelativeMotion,
            seed: rig.seed,
            base_to_front: rig.base_to_front,
            extrinsic: rig.extrinsic_fr,
            traj_kind: traj.kind,
            traj_duration: traj.duration,
            traj_scale: traj.scale,
            front_rate_hz: rig.front_rate_hz,
            rear_rate_hz: rig.rear_rate_hz,
            front_phase: rig.front_phase,
            rear_phase: rig.rear_phase,
            curb_segments: rig.features.segments,
            curb_points: rig.features.points_per_segment,
            curb_offset: rig.features.lateral_offset,
        }
    }
}

fn parse_pose_value(value: &str) -> Result<Pose> {
    let nums: Vec<f64> = value
        .split_whitespace()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {f:?} in pose value")))
        })
        .collect::<Result<_>>()?;
    if nums.len() != 7 {
        return Err(Error::Config(format!(
            "pose value needs 7 numbers (tx ty tz qx qy qz qw), got {}",
            nums.len()
        )));
    }
    let q = Quaternion::new(nums[6], nums[3], nums[4], nums[5]);
    let norm = q.norm();
    if norm < 1e-6 {
        return Err(Error::Config("pose quaternion is zero".into()));
    }
    // keep quantized digits intact; only rescue clearly broken rotations
    let q = if (norm - 1.0).abs() > 1e-3 {
        q.normalized()
    } else {
        q
    };
    Ok(Pose::from_parts(
        0.0,
        q,
        Vector3::new(nums[0], nums[1], nums[2]),
    ))
}

fn pose_value(p: &Pose) -> String {
    format!(
        "{:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9}",
        p.translation.x,
        p.translation.y,
        p.translation.z,
        p.rotation.x,
        p.rotation.y,
        p.rotation.z,
        p.rotation.w
    )
}

impl PipelineConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("bad value {value:?} for {what}"));
        let f = || value.parse::<f64>().map_err(|_| bad(key));
        let u = || value.parse::<u64>().map_err(|_| bad(key));
        match key {
            "grid_policy" => {
                self.grid_policy = match value {
                    "sensor_a" => GridPolicy::SensorA,
                    "sensor_b" => GridPolicy::SensorB,
                    "uniform" => GridPolicy::Uniform(self.grid_dt),
                    _ => return Err(bad("grid_policy (sensor_a|sensor_b|uniform)")),
                }
            }
            "grid_dt" => {
                self.grid_dt = f()?;
                if let GridPolicy::Uniform(_) = self.grid_policy {
                    self.grid_policy = GridPolicy::Uniform(self.grid_dt);
                }
            }
            "min_angle_deg" => self.min_angle_deg = f()?,
            "batch_size" => self.batch_size = u()? as usize,
            "congruence_tol" => self.congruence_tol = f()?,
            "degeneracy_threshold" => self.degeneracy_threshold = f()?,
            "init_axis_gate_deg" => self.init_axis_gate_deg = f()?,
            "init_residual_threshold" => self.init_residual_threshold = f()?,
            "gating_distance" => self.gating_distance = f()?,
            "offset_horizon" => self.offset_horizon = f()?,
            "offset_anchor_step" => self.offset_anchor_step = f()?,
            "noise_trans_sigma" => self.noise_trans_sigma = f()?,
            "noise_rot_sigma_deg" => self.noise_rot_sigma_deg = f()?,
            "noise_mode" => {
                self.noise_mode = match value {
                    "relative" => NoiseMode::RelativeMotion,
                    "absolute" => NoiseMode::AbsolutePose,
                    _ => return Err(bad("noise_mode (relative|absolute)")),
                }
            }
            "seed" => self.seed = u()?,
            "base_to_front" => self.base_to_front = parse_pose_value(value)?,
            "extrinsic" => self.extrinsic = parse_pose_value(value)?,
            "traj_kind" => {
                self.traj_kind = match value {
                    "constant_screw" => TrajectoryKind::ConstantScrew,
                    "figure8" => TrajectoryKind::Figure8,
                    "planar_loop" => TrajectoryKind::PlanarLoop,
                    "piecewise_random" => TrajectoryKind::PiecewiseRandomScrew,
                    _ => {
                        return Err(bad(
                            "traj_kind (constant_screw|figure8|planar_loop|piecewise_random)",
                        ))
                    }
                }
            }
            "traj_duration" => self.traj_duration = f()?,
            "traj_scale" => self.traj_scale = f()?,
            "front_rate_hz" => self.front_rate_hz = f()?,
            "rear_rate_hz" => self.rear_rate_hz = f()?,
            "front_phase" => self.front_phase = f()?,
            "rear_phase" => self.rear_phase = f()?,
            "curb_segments" => self.curb_segments = u()? as usize,
            "curb_points" => self.curb_points = u()? as usize,
            "curb_offset" => self.curb_offset = f()?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parse a config file body; `#` starts a comment.
    pub fn parse(content: &str) -> Result<PipelineConfig> {
        let mut config = PipelineConfig::default();
        for (idx, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", idx + 1))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<PipelineConfig> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&content)
    }

    /// The full key set with current values, parseable back by `parse`.
    pub fn to_file_string(&self) -> String {
        let grid = match self.grid_policy {
            GridPolicy::SensorA => "sensor_a",
            GridPolicy::SensorB => "sensor_b",
            GridPolicy::Uniform(_) => "uniform",
        };
        let kind = match self.traj_kind {
            TrajectoryKind::ConstantScrew => "constant_screw",
            TrajectoryKind::Figure8 => "figure8",
            TrajectoryKind::PlanarLoop => "planar_loop",
            TrajectoryKind::PiecewiseRandomScrew => "piecewise_random",
        };
        let mode = match self.noise_mode {
            NoiseMode::RelativeMotion => "relative",
            NoiseMode::AbsolutePose => "absolute",
        };
        format!(
            "grid_policy = {grid}\n\
             grid_dt = {}\n\
             min_angle_deg = {}\n\
             batch_size = {}\n\
             congruence_tol = {}\n\
             degeneracy_threshold = {}\n\
             init_axis_gate_deg = {}\n\
             init_residual_threshold = {}\n\
             gating_distance = {}\n\
             offset_horizon = {}\n\
             offset_anchor_step = {}\n\
             noise_trans_sigma = {}\n\
             noise_rot_sigma_deg = {}\n\
             noise_mode = {mode}\n\
             seed = {}\n\
             base_to_front = {}\n\
             extrinsic = {}\n\
             traj_kind = {kind}\n\
             traj_duration = {}\n\
             traj_scale = {}\n\
             front_rate_hz = {}\n\
             rear_rate_hz = {}\n\
             front_phase = {}\n\
             rear_phase = {}\n\
             curb_segments = {}\n\
             curb_points = {}\n\
             curb_offset = {}\n",
            self.grid_dt,
            self.min_angle_deg,
            self.batch_size,
            self.congruence_tol,
            self.degeneracy_threshold,
            self.init_axis_gate_deg,
            self.init_residual_threshold,
            self.gating_distance,
            self.offset_horizon,
            self.offset_anchor_step,
            self.noise_trans_sigma,
            self.noise_rot_sigma_deg,
            self.seed,
            pose_value(&self.base_to_front),
            pose_value(&self.extrinsic),
            self.traj_duration,
            self.traj_scale,
            self.front_rate_hz,
            self.rear_rate_hz,
            self.front_phase,
            self.rear_phase,
            self.curb_segments,
            self.curb_points,
            self.curb_offset,
        )
    }

    pub fn grid(&self) -> GridPolicy {
        match self.grid_policy {
            GridPolicy::Uniform(_) => GridPolicy::Uniform(self.grid_dt),
            other => other,
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            batch_size: if self.batch_size == 0 {
                None
            } else {
                Some(self.batch_size)
            },
            degeneracy_threshold: self.degeneracy_threshold,
            init_axis_gate: self.init_axis_gate_deg.to_radians(),
            ..SolveOptions::default()
        }
    }

    pub fn rig_spec(&self) -> RigSpec {
        RigSpec {
            extrinsic_fr: self.extrinsic,
            base_to_front: self.base_to_front,
            front_rate_hz: self.front_rate_hz,
            rear_rate_hz: self.rear_rate_hz,
            front_phase: self.front_phase,
            rear_phase: self.rear_phase,
            noise: NoiseSpec {
                trans_sigma: self.noise_trans_sigma,
                rot_sigma: self.noise_rot_sigma_deg.to_radians(),
                mode: self.noise_mode,
            },
            features: FeatureSpec {
                segments: self.curb_segments,
                points_per_segment: self.curb_points,
                lateral_offset: self.curb_offset,
                ..FeatureSpec::default()
            },
            seed: self.seed,
        }
    }

    pub fn trajectory_spec(&self) -> TrajectorySpec {
        TrajectorySpec {
            kind: self.traj_kind,
            duration: self.traj_duration,
            scale: self.traj_scale,
        }
    }
}
