//! Batch command-line front end for the board inspection toolkit.
//!
//! Every subcommand is a thin binding over one library operation: images
//! travel as PNM files, structured results as JSON Lines or CSV, and all
//! randomness flows from explicit seed flags, so a fixed invocation
//! produces byte-identical output on every run.
//!
//! Exit status: 0 on success (a defective verdict is a result, not a
//! failure), 1 when an operation fails on its inputs, 2 when the
//! invocation itself is malformed.

mod aco;
mod barcode;
mod camera;
mod deeppcb;
mod edges;
mod experiment;
mod filter;
mod fitline;
mod inspect;
mod io;
mod matching;
mod overrides;
mod synth;
mod tone;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use io::{CliError, CmdResult};

#[derive(Parser)]
#[command(
    name = "boardlens",
    version,
    about = "Classical image-processing toolkit for circuit-board inspection",
    arg_required_else_help = true,
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smooth a grayscale image.
    #[command(subcommand)]
    Filter(filter::FilterCmd),
    /// Convert color to gray or remap gray tones.
    #[command(subcommand)]
    Tone(tone::ToneCmd),
    /// Compute gradient strength or a binary edge map.
    #[command(subcommand)]
    Edges(edges::EdgesCmd),
    /// Score a template against windows of a search image.
    #[command(subcommand)]
    Match(matching::MatchCmd),
    /// Fit a straight line through noisy 2-D points.
    Fitline(fitline::FitlineArgs),
    /// Locate printed-bar regions.
    #[command(subcommand)]
    Barcode(barcode::BarcodeCmd),
    /// Ant-colony search over tours and gray thresholds.
    #[command(subcommand)]
    Aco(aco::AcoCmd),
    /// Project world points through a calibrated stereo rig.
    #[command(subcommand)]
    Camera(camera::CameraCmd),
    /// Inspect one board image and report its verdict.
    Inspect(inspect::InspectArgs),
    /// Run a planned batch of generated boards and tabulate accuracy.
    Experiment(experiment::ExperimentArgs),
    /// Ingest or evaluate paired-image defect datasets.
    #[command(subcommand)]
    Deeppcb(deeppcb::DeepPcbCmd),
    /// Generate a synthetic board image.
    Synth(synth::SynthArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> CmdResult<ExitCode> {
    let done = |r: CmdResult<()>| r.map(|()| ExitCode::SUCCESS);
    match command {
        Command::Filter(cmd) => done(filter::run(cmd)),
        Command::Tone(cmd) => done(tone::run(cmd)),
        Command::Edges(cmd) => done(edges::run(cmd)),
        Command::Match(cmd) => done(matching::run(cmd)),
        Command::Fitline(args) => done(fitline::run(args)),
        Command::Barcode(cmd) => done(barcode::run(cmd)),
        Command::Aco(cmd) => done(aco::run(cmd)),
        Command::Camera(cmd) => done(camera::run(cmd)),
        Command::Inspect(args) => inspect::run(args),
        Command::Experiment(args) => done(experiment::run(args)),
        Command::Deeppcb(cmd) => done(deeppcb::run(cmd)),
        Command::Synth(args) => done(synth::run(args)),
    }
}
