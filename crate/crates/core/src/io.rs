//! File formats: TUM-style pose files, feature observation files, CSV and
//! deterministic JSON reports.
//!
//! Pose files follow the TUM trajectory convention, one line per pose:
//! `timestamp tx ty tz qx qy qz qw`, whitespace separated, `#` comments.
//! All numbers are written with 9 decimal places so serialize/parse
//! round-trips are byte stable. Feature files carry one observation per
//! line: `sensor_id timestamp label x y z`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::metrics::ErrorSeries;
use crate::pose::Pose;
use crate::quat::Quaternion;
use crate::trajectory::Trajectory;
use crate::verify::FeatureObs;

/// Schema tag stamped into every JSON report.
pub const SCHEMA_VERSION: &str = "1";

/// Result of parsing a pose file: the trajectory plus non-fatal warnings
/// (e.g. quaternions that needed renormalization).
#[derive(Debug)]
pub struct PoseFileParse {
    pub trajectory: Trajectory,
    pub warnings: Vec<String>,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Parse a TUM-style pose file.
pub fn parse_pose_file(path: &Path, sensor_id: &str) -> Result<PoseFileParse> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_pose_str(&content, path, sensor_id)
}

pub fn parse_pose_str(content: &str, path: &Path, sensor_id: &str) -> Result<PoseFileParse> {
    let mut poses = Vec::new();
    let mut warnings = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 8 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 8 fields (t tx ty tz qx qy qz qw), got {}", fields.len()),
            ));
        }
        let mut v = [0.0f64; 8];
        for (i, f) in fields.iter().enumerate() {
            v[i] = f
                .parse::<f64>()
                .map_err(|_| parse_err(path, line_no, format!("bad number {f:?}")))?;
        }
        let q = Quaternion::new(v[7], v[4], v[5], v[6]);
        let norm = q.norm();
        if norm < 1e-6 {
            return Err(parse_err(path, line_no, "zero quaternion"));
        }
        // renormalize only clearly broken rotations; quantization-level
        // deviations stay untouched so the 9-decimal round trip is stable
        let q = if (norm - 1.0).abs() > 1e-3 {
            warnings.push(format!(
                "{}:{line_no}: quaternion norm {norm:.6} off unit by more than 1e-3, renormalized",
                path.display()
            ));
            q.normalized()
        } else {
            q
        };
        poses.push(Pose::from_parts(v[0], q, Vector3::new(v[1], v[2], v[3])));
    }
    let trajectory = Trajectory::new(sensor_id, poses)?;
    Ok(PoseFileParse {
        trajectory,
        warnings,
    })
}

/// Serialize a trajectory in the TUM convention at 9 decimal places.
pub fn serialize_trajectory(traj: &Trajectory) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# timestamp tx ty tz qx qy qz qw");
    for p in traj.poses() {
        let q = p.rotation;
        let _ = writeln!(
            out,
            "{:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9}",
            p.timestamp, p.translation.x, p.translation.y, p.translation.z, q.x, q.y, q.z, q.w
        );
    }
    out
}

pub fn write_pose_file(path: &Path, traj: &Trajectory) -> Result<()> {
    fs::write(path, serialize_trajectory(traj))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Parse a feature observation file into per-sensor observation lists.
/// Returns `(front, rear)` keyed by the `sensor_id` column.
pub fn parse_feature_file(
    path: &Path,
    front_id: &str,
    rear_id: &str,
) -> Result<(Vec<FeatureObs>, Vec<FeatureObs>)> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut front = Vec::new();
    let mut rear = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(parse_err(
                path,
                line_no,
                format!(
                    "expected 6 fields (sensor_id timestamp label x y z), got {}",
                    fields.len()
                ),
            ));
        }
        let timestamp: f64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("bad timestamp {:?}", fields[1])))?;
        let mut xyz = [0.0f64; 3];
        for (i, f) in fields[3..6].iter().enumerate() {
            xyz[i] = f
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("bad coordinate {f:?}")))?;
        }
        let obs = FeatureObs {
            label: fields[2].to_string(),
            timestamp,
            point: Vector3::new(xyz[0], xyz[1], xyz[2]),
        };
        if fields[0] == front_id {
            front.push(obs);
        } else if fields[0] == rear_id {
            rear.push(obs);
        } else {
            return Err(parse_err(
                path,
                line_no,
                format!(
                    "unknown sensor_id {:?} (expected {front_id:?} or {rear_id:?})",
                    fields[0]
                ),
            ));
        }
    }
    Ok((front, rear))
}

/// Serialize feature observations (both sensors) into one file.
pub fn serialize_features(
    tracks: &[crate::synth::FeatureTrack],
    front_id: &str,
    rear_id: &str,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sensor_id timestamp label x y z");
    for track in tracks {
        for (t, p) in &track.front_observations {
            let _ = writeln!(
                out,
                "{front_id} {t:.9} {} {:.9} {:.9} {:.9}",
                track.label, p.x, p.y, p.z
            );
        }
        for (t, p) in &track.rear_observations {
            let _ = writeln!(
                out,
                "{rear_id} {t:.9} {} {:.9} {:.9} {:.9}",
                track.label, p.x, p.y, p.z
            );
        }
    }
    out
}

/// Round every float in a JSON value to 12 significant digits so repeated
/// runs emit byte-identical reports.
pub fn round_json_floats(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if f.is_finite() && f.fract() != 0.0 {
                    let rounded: f64 = format!("{f:.11e}").parse().unwrap_or(f);
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *value = serde_json::Value::Number(num);
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json_floats),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json_floats),
        _ => {}
    }
}

/// Serialize a report to pretty JSON with the schema version stamped in and
/// floats fixed at 12 significant digits.
pub fn to_report_json<T: serde::Serialize>(report: &T) -> Result<String> {
    let mut value = serde_json::to_value(report)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    if let serde_json::Value::Object(map) = &mut value {
        map.insert(
            "schema_version".to_string(),
            serde_json::Value::String(SCHEMA_VERSION.to_string()),
        );
    }
    round_json_floats(&mut value);
    serde_json::to_string_pretty(&value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))
}

pub fn write_report_json<T: serde::Serialize>(path: &Path, report: &T) -> Result<()> {
    let json = to_report_json(report)?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path.display().to_string(), e))
}

/// CSV with one row per sample: `timestamp,translation_err,rotation_err`.
pub fn error_series_csv(series: &ErrorSeries) -> String {
    let mut out = String::from("timestamp,translation_err_m,rotation_err_rad\n");
    for i in 0..series.len() {
        let _ = writeln!(
            out,
            "{:.9},{:.9},{:.9}",
            series.timestamps[i], series.translation_err[i], series.rotation_err[i]
        );
    }
    out
}
