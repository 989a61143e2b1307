//! `camera` — pinhole projection through a calibrated stereo rig.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;

use boardlens::camera::{load_calibration, reprojection_error, CameraCalib, StereoRig};

use crate::io::{emit_text, read_correspondences, read_points3, CliError, CmdResult};

#[derive(Subcommand)]
pub enum CameraCmd {
    /// Project world points to pixel coordinates, one `u v` line each.
    Project(ProjectArgs),
    /// Mean pixel distance between projected world points and the pixels
    /// they were observed at.
    Reproject(ReprojectArgs),
}

#[derive(Args)]
pub struct ProjectArgs {
    /// Calibration file with per-camera intrinsics and extrinsics.
    #[arg(long)]
    pub calib: PathBuf,
    /// Which camera of the rig projects.
    #[arg(long, value_enum, default_value_t = Side::Left)]
    pub camera: Side,
    /// World points file: one `x y z` triple per line, in millimeters.
    pub points: PathBuf,
    /// Write the projected pixels here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReprojectArgs {
    /// Calibration file with per-camera intrinsics and extrinsics.
    #[arg(long)]
    pub calib: PathBuf,
    /// Which camera of the rig projects.
    #[arg(long, value_enum, default_value_t = Side::Left)]
    pub camera: Side,
    /// Correspondence file: one `x y z u v` line per point — world
    /// millimeters followed by the observed pixel.
    pub points: PathBuf,
    /// Write the JSON result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn pick(self, rig: &StereoRig) -> &CameraCalib {
        match self {
            Side::Left => &rig.left,
            Side::Right => &rig.right,
        }
    }
}

pub fn run(cmd: CameraCmd) -> CmdResult<()> {
    match cmd {
        CameraCmd::Project(args) => {
            let loaded =
                load_calibration(&args.calib).map_err(|e| CliError::in_file(&args.calib, e))?;
            for warning in &loaded.warnings {
                eprintln!("warning: {warning}");
            }
            let camera = args.camera.pick(&loaded.rig);
            let points = read_points3(&args.points)?;
            let mut out = String::new();
            for point in points {
                let (u, v) = camera.project(point)?;
                out.push_str(&format!("{u} {v}\n"));
            }
            emit_text(args.output.as_deref(), &out)
        }
        CameraCmd::Reproject(args) => {
            let loaded =
                load_calibration(&args.calib).map_err(|e| CliError::in_file(&args.calib, e))?;
            for warning in &loaded.warnings {
                eprintln!("warning: {warning}");
            }
            let camera = args.camera.pick(&loaded.rig);
            let pairs = read_correspondences(&args.points)?;
            let error =
                reprojection_error(&pairs, &camera.intrinsics, &camera.extrinsics)?;
            let line = json!({ "mean_error_px": error });
            emit_text(args.output.as_deref(), &format!("{line}\n"))
        }
    }
}
