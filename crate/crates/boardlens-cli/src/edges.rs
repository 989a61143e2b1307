//! `edges` — gradient operators and the composed edge detector.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use boardlens::edges::{canny, gradient, roberts, GradientOperator, HysteresisThresholds};
use boardlens::filters::GaussianSpec;

use crate::io::{gray_format_like, read_gray, write_gray, CmdResult};

#[derive(Subcommand)]
pub enum EdgesCmd {
    /// Cross-difference edge strength over 2x2 neighborhoods.
    Roberts(GradientArgs),
    /// Sobel gradient magnitude over 3x3 neighborhoods.
    Sobel(GradientArgs),
    /// Prewitt gradient magnitude over 3x3 neighborhoods.
    Prewitt(GradientArgs),
    /// Full detector: Gaussian smoothing, Sobel gradients, non-maximum
    /// suppression, and dual-threshold hysteresis. Edge pixels are 255.
    Canny(CannyArgs),
}

#[derive(Args)]
pub struct GradientArgs {
    /// Input image (PGM).
    pub input: PathBuf,
    /// Output image path; gradient magnitudes clamped to [0, 255].
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args)]
pub struct CannyArgs {
    /// Input image (PGM).
    pub input: PathBuf,
    /// Output edge map path (edge pixels 255, everything else 0).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Smoothing standard deviation in pixels.
    #[arg(allow_negative_numbers = true, long, default_value_t = 1.4)]
    pub sigma: f64,
    /// Smoothing kernel radius in pixels.
    #[arg(long, default_value_t = 2)]
    pub radius: u32,
    /// Weak-edge threshold on gradient magnitude (gray levels).
    #[arg(allow_negative_numbers = true, long, default_value_t = 40.0)]
    pub low: f64,
    /// Strong-edge threshold on gradient magnitude (gray levels).
    #[arg(allow_negative_numbers = true, long, default_value_t = 120.0)]
    pub high: f64,
}

pub fn run(cmd: EdgesCmd) -> CmdResult<()> {
    match cmd {
        EdgesCmd::Roberts(args) => {
            let (img, format) = read_gray(&args.input)?;
            let strength = roberts(&img)?;
            write_gray(&args.output, &strength.quantize(), gray_format_like(format))
        }
        EdgesCmd::Sobel(args) => run_gradient(args, GradientOperator::Sobel),
        EdgesCmd::Prewitt(args) => run_gradient(args, GradientOperator::Prewitt),
        EdgesCmd::Canny(args) => {
            let (img, format) = read_gray(&args.input)?;
            let spec = GaussianSpec::new(args.sigma, args.radius)?;
            let thresholds = HysteresisThresholds::new(args.low, args.high)?;
            let edges = canny(&img, spec, thresholds)?;
            write_gray(&args.output, &edges, gray_format_like(format))
        }
    }
}

fn run_gradient(args: GradientArgs, operator: GradientOperator) -> CmdResult<()> {
    let (img, format) = read_gray(&args.input)?;
    let field = gradient(&img, operator)?;
    write_gray(
        &args.output,
        &field.magnitude.quantize(),
        gray_format_like(format),
    )
}
