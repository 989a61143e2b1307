//! `match` — template scoring against a search image.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde_json::json;

use boardlens::matching::{ncc_match, ncc_score_at, sad, ssd, Template};

use crate::io::{emit_text, read_gray, CmdResult};

#[derive(Subcommand)]
pub enum MatchCmd {
    /// Normalized cross-correlation in [-1, 1]. Without --at, scans every
    /// window and reports the best position; with --at, scores one window.
    Ncc(NccArgs),
    /// Sum of absolute differences for the window at --at.
    Sad(PointArgs),
    /// Sum of squared differences for the window at --at.
    Ssd(PointArgs),
}

#[derive(Args)]
pub struct NccArgs {
    /// Search image (PGM).
    pub input: PathBuf,
    /// Template image (PGM) slid over the search image.
    #[arg(long)]
    pub template: PathBuf,
    /// Score only the window whose top-left corner is at X,Y (pixels).
    #[arg(long, value_parser = parse_xy, value_name = "X,Y")]
    pub at: Option<(u32, u32)>,
    /// Write the JSON result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct PointArgs {
    /// Search image (PGM).
    pub input: PathBuf,
    /// Template image (PGM) compared against one window.
    #[arg(long)]
    pub template: PathBuf,
    /// Top-left corner of the scored window, in pixels.
    #[arg(long, value_parser = parse_xy, value_name = "X,Y")]
    pub at: (u32, u32),
    /// Write the JSON result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn parse_xy(value: &str) -> Result<(u32, u32), String> {
    let (x, y) = value
        .split_once(',')
        .ok_or_else(|| format!("`{value}` is not of the form X,Y"))?;
    let parse = |s: &str, axis: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| format!("`{s}` is not a valid {axis} coordinate"))
    };
    Ok((parse(x, "x")?, parse(y, "y")?))
}

pub fn run(cmd: MatchCmd) -> CmdResult<()> {
    match cmd {
        MatchCmd::Ncc(args) => {
            let (img, _) = read_gray(&args.input)?;
            let (patch, _) = read_gray(&args.template)?;
            let template = Template::new(patch);
            let line = match args.at {
                Some(at) => {
                    let score = ncc_score_at(&img, &template, at)?;
                    json!({ "score": score })
                }
                None => {
                    let result = ncc_match(&img, &template)?;
                    json!({
                        "x": result.position.0,
                        "y": result.position.1,
                        "score": result.score,
                    })
                }
            };
            emit_text(args.output.as_deref(), &format!("{line}\n"))
        }
        MatchCmd::Sad(args) => {
            let (img, _) = read_gray(&args.input)?;
            let (patch, _) = read_gray(&args.template)?;
            let template = Template::new(patch);
            let score = sad(&img, &template, args.at)?;
            emit_text(
                args.output.as_deref(),
                &format!("{}\n", json!({ "score": score })),
            )
        }
        MatchCmd::Ssd(args) => {
            let (img, _) = read_gray(&args.input)?;
            let (patch, _) = read_gray(&args.template)?;
            let template = Template::new(patch);
            let score = ssd(&img, &template, args.at)?;
            emit_text(
                args.output.as_deref(),
                &format!("{}\n", json!({ "score": score })),
            )
        }
    }
}
