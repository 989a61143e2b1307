//! `synth` — generating reference and test boards.

use std::path::PathBuf;

use clap::Args;

use boardlens::imgcore::PnmFormat;
use boardlens::inspect::{add_gaussian_noise, generate_board, BoardKind};

use crate::io::{emit_text, write_rgb, CliError, CmdResult};

#[derive(Args)]
pub struct SynthArgs {
    /// Output board image path (PPM).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Board population to draw from: standard, defect, or color_diff.
    #[arg(long, value_parser = parse_kind, default_value = "standard")]
    pub kind: BoardKind,
    /// Random seed; identical seeds reproduce the board exactly.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of Gaussian pixel noise added after drawing
    /// (gray levels per channel); 0 leaves the board clean.
    #[arg(allow_negative_numbers = true, long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    /// Separate seed for the noise stream.
    #[arg(long, default_value_t = 0)]
    pub noise_seed: u64,
    /// Print the generated board's ground truth as JSON on stdout.
    #[arg(long)]
    pub truth: bool,
}

fn parse_kind(value: &str) -> Result<BoardKind, String> {
    value.parse()
}

pub fn run(args: SynthArgs) -> CmdResult<()> {
    if !(args.noise_sigma.is_finite() && args.noise_sigma >= 0.0) {
        return Err(CliError(format!(
            "noise sigma must be finite and nonnegative, got {}",
            args.noise_sigma
        )));
    }
    let (board, truth) = generate_board(args.kind, args.seed);
    let board = if args.noise_sigma > 0.0 {
        add_gaussian_noise(&board, args.noise_sigma, args.noise_seed)
    } else {
        board
    };
    write_rgb(&args.output, &board, PnmFormat::P6)?;
    if args.truth {
        let line = serde_json::to_string(&truth).expect("ground truth serializes");
        emit_text(None, &format!("{line}\n"))?;
    }
    Ok(())
}
