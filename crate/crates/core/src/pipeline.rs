//! Command pipelines behind the CLI: simulate, calibrate, evaluate, verify.
//!
//! Each function is a pure-ish library entry point so the full flows are
//! testable without spawning the binary; the CLI maps them onto subcommands
//! and exit codes.

use std::path::Path;

use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::handeye::{self, CalibrationResult, DegeneracyFlag};
use crate::init;
use crate::interp::{align, GridPolicy};
use crate::io;
use crate::metrics::{self, Delta, SeriesStats};
use crate::pose::Pose;
use crate::synth;
use crate::trajectory::Trajectory;
use crate::verify::{self, FeatureObs, VerifyScene};

/// Sensor ids used in generated files.
pub const FRONT_ID: &str = "front";
pub const REAR_ID: &str = "rear";

/// What `simulate` wrote.
#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub front_file: String,
    pub rear_file: String,
    pub features_file: String,
    pub ground_truth_file: String,
    pub front_samples: usize,
    pub rear_samples: usize,
    pub feature_observations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
struct GroundTruthFile {
    extrinsic_pose: Pose,
    extrinsic_dq: [f64; 8],
    extrinsic_in_base: Pose,
    base_to_front: Pose,
    seed: u64,
    traj_kind: String,
    duration: f64,
}

/// Simulate a rig run and write `front.txt`, `rear.txt`, `features.txt`
/// and `ground_truth.json` into `out_dir`.
pub fn cmd_simulate(config: &PipelineConfig, out_dir: &Path) -> Result<SimulateReport> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let rig = config.rig_spec();
    let traj = config.trajectory_spec();
    let out = synth::generate(&rig, &traj)?;

    let front_file = out_dir.join("front.txt");
    let rear_file = out_dir.join("rear.txt");
    let features_file = out_dir.join("features.txt");
    let ground_truth_file = out_dir.join("ground_truth.json");

    io::write_pose_file(&front_file, &out.front)?;
    io::write_pose_file(&rear_file, &out.rear)?;
    std::fs::write(
        &features_file,
        io::serialize_features(&out.features, FRONT_ID, REAR_ID),
    )
    .map_err(|e| Error::io(features_file.display().to_string(), e))?;

    let gt = GroundTruthFile {
        extrinsic_pose: rig.extrinsic_fr,
        extrinsic_dq: rig.extrinsic_fr.to_dq().to_array(),
        extrinsic_in_base: handeye::express_in_base(&rig.extrinsic_fr, &rig.base_to_front),
        base_to_front: rig.base_to_front,
        seed: rig.seed,
        traj_kind: format!("{:?}", traj.kind),
        duration: traj.duration,
    };
    io::write_report_json(&ground_truth_file, &gt)?;

    Ok(SimulateReport {
        front_file: front_file.display().to_string(),
        rear_file: rear_file.display().to_string(),
        features_file: features_file.display().to_string(),
        ground_truth_file: ground_truth_file.display().to_string(),
        front_samples: out.front.len(),
        rear_samples: out.rear.len(),
        feature_observations: out
            .features
            .iter()
            .map(|t| t.front_observations.len() + t.rear_observations.len())
            .sum(),
        seed: rig.seed,
    })
}

/// Full calibration output written as JSON.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub extrinsic_pose: Pose,
    pub extrinsic_dq: [f64; 8],
    pub extrinsic_in_base: Pose,
    pub singular_values: Vec<f64>,
    pub pairs_used: usize,
    pub rejected_small_angle: usize,
    pub rejected_congruence: usize,
    pub rejected_by_init: usize,
    pub mean_residual: f64,
    pub degeneracy_flag: DegeneracyFlag,
    pub batches: usize,
    pub aligned_samples: usize,
    pub init_rms_residual: Option<f64>,
    pub init_low_confidence: Option<bool>,
    pub warnings: Vec<String>,
}

impl CalibrationReport {
    fn build(
        result: &CalibrationResult,
        config: &PipelineConfig,
        aligned_samples: usize,
        rejected_small_angle: usize,
        rejected_congruence: usize,
        init: Option<&init::RigidFit>,
        warnings: Vec<String>,
    ) -> Self {
        CalibrationReport {
            extrinsic_pose: result.extrinsic_pose,
            extrinsic_dq: result.extrinsic.to_array(),
            extrinsic_in_base: handeye::express_in_base(
                &result.extrinsic_pose,
                &config.base_to_front,
            ),
            singular_values: result.singular_values.clone(),
            pairs_used: result.pairs_used,
            rejected_small_angle,
            rejected_congruence,
            rejected_by_init: result.rejected_by_init,
            mean_residual: result.mean_residual,
            degeneracy_flag: result.degeneracy_flag,
            batches: result.batches,
            aligned_samples,
            init_rms_residual: init.map(|f| f.rms_residual),
            init_low_confidence: init.map(|f| f.low_confidence),
            warnings,
        }
    }
}

/// Calibrate from two trajectories already in memory.
pub fn calibrate_trajectories(
    front: &Trajectory,
    rear: &Trajectory,
    config: &PipelineConfig,
) -> Result<CalibrationReport> {
    let mut warnings = Vec::new();
    let pair = align(front, rear, config.grid())?;

    let fit = match init::initial_extrinsic(&pair, config.init_residual_threshold) {
        Ok(fit) => Some(fit),
        Err(e) => {
            warnings.push(format!("initialization skipped: {e}"));
            None
        }
    };

    let extraction = handeye::extract_motions(
        &pair,
        config.min_angle_deg.to_radians(),
        config.congruence_tol,
    );
    let result = handeye::solve(&extraction.pairs, fit.as_ref(), &config.solve_options())?;
    Ok(CalibrationReport::build(
        &result,
        config,
        pair.len(),
        extraction.rejected_small_angle,
        extraction.rejected_congruence,
        fit.as_ref(),
        warnings,
    ))
}

/// Parse the two pose files and run the calibration pipeline.
pub fn cmd_calibrate(
    front_file: &Path,
    rear_file: &Path,
    config: &PipelineConfig,
) -> Result<CalibrationReport> {
    let front = io::parse_pose_file(front_file, FRONT_ID)?;
    let rear = io::parse_pose_file(rear_file, REAR_ID)?;
    let mut report = calibrate_trajectories(&front.trajectory, &rear.trajectory, config)?;
    let mut warnings = front.warnings;
    warnings.extend(rear.warnings);
    warnings.extend(report.warnings);
    report.warnings = warnings;
    Ok(report)
}

/// APE/RPE summaries under an extrinsic hypothesis.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub samples: usize,
    pub ape_translation: SeriesStats,
    pub ape_rotation: SeriesStats,
    pub rpe_translation: SeriesStats,
    pub rpe_rotation: SeriesStats,
}

/// Evaluate an extrinsic against two trajectories: align onto a common
/// grid, map the rear stream through the extrinsic, re-anchor both at the
/// first grid sample (odometry frames are arbitrary up to their anchor) and
/// measure APE/RPE.
pub fn evaluate_trajectories(
    front: &Trajectory,
    rear: &Trajectory,
    extrinsic: &Pose,
    grid: GridPolicy,
    delta: Delta,
) -> Result<(metrics::ErrorSeries, metrics::ErrorSeries)> {
    let pair = align(front, rear, grid)?;
    let front_aligned = Trajectory::new(FRONT_ID, pair.poses_a)?;
    let rear_aligned = Trajectory::new(REAR_ID, pair.poses_b)?;
    let rear_mapped = rear_aligned.conjugated(&extrinsic.inverse());

    let front_rebased = front_aligned.rebased_at(0);
    let rear_rebased = rear_mapped.rebased_at(0);

    let ape = metrics::ape(&front_rebased, &rear_rebased)?;
    let rpe = metrics::rpe(&front_rebased, &rear_rebased, delta)?;
    Ok((ape, rpe))
}

/// Run the evaluation and write `ape.csv`, `rpe.csv` and `evaluation.json`.
pub fn cmd_evaluate(
    front_file: &Path,
    rear_file: &Path,
    extrinsic_json: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<EvaluationReport> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let front = io::parse_pose_file(front_file, FRONT_ID)?;
    let rear = io::parse_pose_file(rear_file, REAR_ID)?;
    let extrinsic = read_extrinsic_pose(extrinsic_json)?;

    let (ape, rpe) = evaluate_trajectories(
        &front.trajectory,
        &rear.trajectory,
        &extrinsic,
        config.grid(),
        Delta::Steps(1),
    )?;

    let ape_csv = out_dir.join("ape.csv");
    let rpe_csv = out_dir.join("rpe.csv");
    std::fs::write(&ape_csv, io::error_series_csv(&ape))
        .map_err(|e| Error::io(ape_csv.display().to_string(), e))?;
    std::fs::write(&rpe_csv, io::error_series_csv(&rpe))
        .map_err(|e| Error::io(rpe_csv.display().to_string(), e))?;

    let report = EvaluationReport {
        samples: ape.len(),
        ape_translation: ape.translation_stats,
        ape_rotation: ape.rotation_stats,
        rpe_translation: rpe.translation_stats,
        rpe_rotation: rpe.rotation_stats,
    };
    io::write_report_json(&out_dir.join("evaluation.json"), &report)?;
    Ok(report)
}

/// Pull an `extrinsic_pose` out of any report JSON (calibration output or
/// simulation ground truth).
pub fn read_extrinsic_pose(path: &Path) -> Result<Pose> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let value: serde_json::Value = serde_json::from_str(&content).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        msg: format!("not valid JSON: {e}"),
    })?;
    let pose_value = value.get("extrinsic_pose").ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        msg: "missing field extrinsic_pose".into(),
    })?;
    let mut pose: Pose =
        serde_json::from_value(pose_value.clone()).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: 0,
            msg: format!("bad extrinsic_pose: {e}"),
        })?;
    pose.rotation = pose.rotation.normalized();
    Ok(pose)
}

/// Verification outcome: kinematic offset plus the before/after feature
/// comparison.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub mean_offset_s: f64,
    pub mean_offset_residual_m: f64,
    pub offset_anchors: usize,
    pub rmse_before: f64,
    pub rmse_after: f64,
    pub matched_before: usize,
    pub matched_after: usize,
    pub segments_compared: usize,
    pub p_value: Option<f64>,
    pub low_power: bool,
}

/// Verify two extrinsic hypotheses against curb features. `base_traj` is
/// the reference (front) sensor trajectory; base poses are derived through
/// the known mount.
pub fn verify_scene(
    front_obs: &[FeatureObs],
    rear_obs: &[FeatureObs],
    front_traj: &Trajectory,
    before: &Pose,
    after: &Pose,
    config: &PipelineConfig,
) -> Result<VerifyReport> {
    // base(t) = front(t) * T_B_F^-1, a constant gauge away from the true
    // base trajectory, which cancels in all distances
    let base = Trajectory::new(
        "base",
        front_traj
            .poses()
            .iter()
            .map(|p| {
                let mut q = p.compose(&config.base_to_front.inverse());
                q.timestamp = p.timestamp;
                q
            })
            .collect(),
    )?;

    let start = base.start_time().ok_or(Error::NoOverlap)?;
    let end = base.end_time().ok_or(Error::NoOverlap)?;
    let mut anchors = Vec::new();
    let mut t = start;
    while t < end {
        anchors.push(t);
        t += config.offset_anchor_step.max(0.1);
    }

    let base_to_rear = config.base_to_front.compose(after);
    let offset = verify::kinematic_offset(
        &base,
        &anchors,
        &config.base_to_front,
        &base_to_rear,
        config.offset_horizon,
    )?;

    let scene = VerifyScene {
        base: &base,
        base_to_front: config.base_to_front,
    };
    let report = verify::compare(
        before,
        after,
        front_obs,
        rear_obs,
        &offset,
        &scene,
        config.gating_distance,
    )?;

    Ok(VerifyReport {
        mean_offset_s: offset.mean_offset(),
        mean_offset_residual_m: offset.mean_residual(),
        offset_anchors: offset.samples.len(),
        rmse_before: report.rmse_before,
        rmse_after: report.rmse_after,
        matched_before: report.matched_before,
        matched_after: report.matched_after,
        segments_compared: report.segments_compared,
        p_value: report.p_value,
        low_power: report.low_power,
    })
}

/// File-based verification: features + reference trajectory + two
/// extrinsic report JSONs.
pub fn cmd_verify(
    features_file: &Path,
    base_traj_file: &Path,
    extrinsic_before: &Path,
    extrinsic_after: &Path,
    config: &PipelineConfig,
    out_dir: &Path,
) -> Result<VerifyReport> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let (front_obs, rear_obs) = io::parse_feature_file(features_file, FRONT_ID, REAR_ID)?;
    let front = io::parse_pose_file(base_traj_file, FRONT_ID)?;
    let before = read_extrinsic_pose(extrinsic_before)?;
    let after = read_extrinsic_pose(extrinsic_after)?;
    let report = verify_scene(
        &front_obs,
        &rear_obs,
        &front.trajectory,
        &before,
        &after,
        config,
    )?;
    io::write_report_json(&out_dir.join("verification.json"), &report)?;
    Ok(report)
}
