//! `barcode` — locating printed bar regions in grayscale images.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use boardlens::barcode::{candidates_jsonl, locate_barcode, BarcodeConfig};
use boardlens::edges::HysteresisThresholds;
use boardlens::filters::GaussianSpec;
use boardlens::linefit::TukeySpec;

use crate::io::{emit_text, read_gray, CmdResult};

#[derive(Subcommand)]
pub enum BarcodeCmd {
    /// Find candidate bar regions and report each with its white/black
    /// area ratio as JSON Lines (no candidates produce no output).
    Locate(LocateArgs),
}

#[derive(Args)]
pub struct LocateArgs {
    /// Input image (PGM).
    pub input: PathBuf,
    /// Lower edge of the accepted white/black area ratio interval
    /// (closed).
    #[arg(allow_negative_numbers = true, long, default_value_t = 0.7)]
    pub accept_lo: f64,
    /// Upper edge of the accepted white/black area ratio interval
    /// (closed).
    #[arg(allow_negative_numbers = true, long, default_value_t = 1.5)]
    pub accept_hi: f64,
    /// Maximum orientation spread in degrees for edge chains grouped
    /// into one candidate.
    #[arg(allow_negative_numbers = true, long, default_value_t = 5.0)]
    pub max_angle_spread: f64,
    /// Minimum number of near-parallel chains backing a candidate.
    #[arg(long, default_value_t = 8)]
    pub min_chains: usize,
    /// Minimum chain length in pixels.
    #[arg(long, default_value_t = 10)]
    pub min_chain_len: usize,
    /// Maximum deviation of a bar edge from vertical, in degrees.
    #[arg(allow_negative_numbers = true, long, default_value_t = 45.0)]
    pub vertical_tol: f64,
    /// Pre-gradient smoothing standard deviation in pixels.
    #[arg(allow_negative_numbers = true, long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Pre-gradient smoothing kernel radius in pixels.
    #[arg(long, default_value_t = 2)]
    pub radius: u32,
    /// Weak-edge hysteresis threshold (gray levels).
    #[arg(allow_negative_numbers = true, long, default_value_t = 40.0)]
    pub low: f64,
    /// Strong-edge hysteresis threshold (gray levels).
    #[arg(allow_negative_numbers = true, long, default_value_t = 120.0)]
    pub high: f64,
    /// Residual scale in pixels for the per-chain robust line fits.
    #[arg(allow_negative_numbers = true, long, default_value_t = 2.0)]
    pub tau: f64,
    /// Write the JSON Lines result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(cmd: BarcodeCmd) -> CmdResult<()> {
    let BarcodeCmd::Locate(args) = cmd;
    let (img, _) = read_gray(&args.input)?;
    let cfg = BarcodeConfig {
        accept_lo: args.accept_lo,
        accept_hi: args.accept_hi,
        max_angle_spread_deg: args.max_angle_spread,
        min_chains: args.min_chains,
        min_chain_len: args.min_chain_len,
        vertical_tol_deg: args.vertical_tol,
        gaussian: GaussianSpec::new(args.sigma, args.radius)?,
        thresholds: HysteresisThresholds::new(args.low, args.high)?,
        tukey: TukeySpec::new(args.tau, 20, 1e-6)?,
    };
    cfg.validate()?;
    let candidates = locate_barcode(&img, &cfg);
    emit_text(args.output.as_deref(), &candidates_jsonl(&candidates))
}
