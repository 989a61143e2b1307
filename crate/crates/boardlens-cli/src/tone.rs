//! `tone` — grayscale conversion and tonal transforms.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use boardlens::imgcore::PnmFormat;
use boardlens::tone::{
    emphasize, exp_transform, linear_transform, log_transform, rgb_to_gray, stretch, ExpParams,
    LinearMap, LogParams,
};

use crate::io::{emit_text, gray_format_like, read_gray, read_rgb, write_gray, CmdResult};

#[derive(Subcommand)]
pub enum ToneCmd {
    /// Map the gray range [a, b] linearly onto [c, d].
    Linear(LinearArgs),
    /// Apply the logarithmic curve a + log_b(f + c).
    Log(CurveArgs),
    /// Apply the exponential curve a * (f + b)^c.
    Exp(CurveArgs),
    /// Stretch the observed gray range onto the full [0, 255] scale and
    /// print the chosen gain/offset as JSON.
    Stretch(PlainArgs),
    /// Add back local contrast: each pixel moves away from its windowed
    /// mean by the given factor.
    Emphasize(EmphasizeArgs),
    /// Convert a color image to grayscale by luma weighting.
    Gray(PlainArgs),
}

#[derive(Args)]
pub struct LinearArgs {
    /// Input image (PGM).
    pub input: PathBuf,
    /// Output image path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Lower end of the input gray range.
    #[arg(allow_negative_numbers = true, long, default_value_t = 0.0)]
    pub a: f64,
    /// Upper end of the input gray range; must exceed a.
    #[arg(allow_negative_numbers = true, long, default_value_t = 255.0)]
    pub b: f64,
    /// Output gray level that a maps to.
    #[arg(allow_negative_numbers = true, long, default_value_t = 0.0)]
    pub c: f64,
    /// Output gray level that b maps to.
    #[arg(allow_negative_numbers = true, long, default_value_t = 255.0)]
    pub d: f64,
}

#[derive(Args)]
pub struct CurveArgs {
    /// Input image (PGM).
    pub input: PathBuf,
    /// Output image path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Curve parameter a (offset for log, output scale for exp).
    #[arg(allow_negative_numbers = true, long)]
    pub a: f64,
    /// Curve parameter b (logarithm base for log, input offset for exp).
    #[arg(allow_negative_numbers = true, long)]
    pub b: f64,
    /// Curve parameter c (input offset for log, exponent for exp).
    #[arg(allow_negative_numbers = true, long)]
    pub c: f64,
}

#[derive(Args)]
pub struct PlainArgs {
    /// Input image.
    pub input: PathBuf,
    /// Output image path.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args)]
pub struct EmphasizeArgs {
    /// Input image (PGM).
    pub input: PathBuf,
    /// Output image path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Averaging window side length in pixels; odd, at least 3.
    #[arg(long, default_value_t = 3)]
    pub mask: u32,
    /// How strongly the local difference is added back; 0 is identity.
    #[arg(allow_negative_numbers = true, long, default_value_t = 1.0)]
    pub factor: f64,
}

pub fn run(cmd: ToneCmd) -> CmdResult<()> {
    match cmd {
        ToneCmd::Linear(args) => {
            let (img, format) = read_gray(&args.input)?;
            let map = LinearMap::new(args.a, args.b, args.c, args.d)?;
            write_gray(
                &args.output,
                &linear_transform(&img, map),
                gray_format_like(format),
            )
        }
        ToneCmd::Log(args) => {
            let (img, format) = read_gray(&args.input)?;
            let params = LogParams::new(args.a, args.b, args.c)?;
            write_gray(
                &args.output,
                &log_transform(&img, params)?,
                gray_format_like(format),
            )
        }
        ToneCmd::Exp(args) => {
            let (img, format) = read_gray(&args.input)?;
            let params = ExpParams::new(args.a, args.b, args.c)?;
            write_gray(
                &args.output,
                &exp_transform(&img, params)?,
                gray_format_like(format),
            )
        }
        ToneCmd::Stretch(args) => {
            let (img, format) = read_gray(&args.input)?;
            let (out, params) = stretch(&img)?;
            write_gray(&args.output, &out, gray_format_like(format))?;
            let line = serde_json::to_string(&params).expect("stretch params serialize");
            emit_text(None, &format!("{line}\n"))
        }
        ToneCmd::Emphasize(args) => {
            let (img, format) = read_gray(&args.input)?;
            write_gray(
                &args.output,
                &emphasize(&img, args.mask, args.factor)?,
                gray_format_like(format),
            )
        }
        ToneCmd::Gray(args) => {
            let (img, format) = read_rgb(&args.input)?;
            let out_format = if format == PnmFormat::P3 {
                PnmFormat::P2
            } else {
                PnmFormat::P5
            };
            write_gray(&args.output, &rgb_to_gray(&img), out_format)
        }
    }
}
