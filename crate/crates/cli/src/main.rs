//! `rigcal`: simulate, calibrate, evaluate and verify multi-lidar rigs.
//!
//! Exit codes: 0 success (calibrate: well conditioned), 2 degenerate
//! calibration geometry, 1 any error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use rigcal_core::config::PipelineConfig;
use rigcal_core::handeye::DegeneracyFlag;
use rigcal_core::io::to_report_json;
use rigcal_core::pipeline;

#[derive(Parser)]
#[command(
    name = "rigcal",
    about = "Motion-based extrinsic calibration for rigidly mounted multi-lidar rigs"
)]
struct Cli {
    /// Configuration file (key = value lines); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for generated files and reports.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic rig data: front.txt, rear.txt, features.txt,
    /// ground_truth.json.
    Simulate,
    /// Recover the front-to-rear extrinsic from two pose files.
    Calibrate {
        front_file: PathBuf,
        rear_file: PathBuf,
    },
    /// APE/RPE of two trajectories under an extrinsic (JSON report file).
    Evaluate {
        front_file: PathBuf,
        rear_file: PathBuf,
        extrinsic_json: PathBuf,
    },
    /// Compare two extrinsics via kinematic time offset + curb features.
    Verify {
        features_file: PathBuf,
        base_traj_file: PathBuf,
        extrinsic_before: PathBuf,
        extrinsic_after: PathBuf,
    },
    /// Print the default configuration with all keys documented.
    PrintConfig,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)
            .with_context(|| format!("loading config {}", path.display()))?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::Simulate => {
            let report = pipeline::cmd_simulate(&config, &cli.out).context("simulate")?;
            println!("{}", to_report_json(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Calibrate {
            front_file,
            rear_file,
        } => {
            let report =
                pipeline::cmd_calibrate(front_file, rear_file, &config).context("calibrate")?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let json = to_report_json(&report)?;
            std::fs::create_dir_all(&cli.out)
                .with_context(|| format!("creating {}", cli.out.display()))?;
            std::fs::write(cli.out.join("calibration.json"), format!("{json}\n"))
                .context("writing calibration.json")?;
            println!("{json}");
            match report.degeneracy_flag {
                DegeneracyFlag::WellConditioned => Ok(ExitCode::SUCCESS),
                DegeneracyFlag::NearPlanar | DegeneracyFlag::Insufficient => {
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Evaluate {
            front_file,
            rear_file,
            extrinsic_json,
        } => {
            let report =
                pipeline::cmd_evaluate(front_file, rear_file, extrinsic_json, &config, &cli.out)
                    .context("evaluate")?;
            println!("{}", to_report_json(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            features_file,
            base_traj_file,
            extrinsic_before,
            extrinsic_after,
        } => {
            let report = pipeline::cmd_verify(
                features_file,
                base_traj_file,
                extrinsic_before,
                extrinsic_after,
                &config,
                &cli.out,
            )
            .context("verify")?;
            println!("{}", to_report_json(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::PrintConfig => {
            print!("{}", config.to_file_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
