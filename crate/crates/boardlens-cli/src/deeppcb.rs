//! `deeppcb` — ingesting and evaluating paired-image defect datasets.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde_json::json;

use boardlens::inspect::{evaluate_deeppcb, ingest_deeppcb, DeepPcbConfig};

use crate::io::{emit_text, CmdResult};

#[derive(Subcommand)]
pub enum DeepPcbCmd {
    /// Walk a dataset tree and list its samples as JSON Lines.
    Ingest(IngestArgs),
    /// Align each test/template pair, predict defect boxes from their
    /// difference, and score them against the annotations.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
pub struct IngestArgs {
    /// Dataset root: each sample is `<base>.txt` annotations beside
    /// `<base>_test.pgm` and `<base>_temp.pgm` images.
    pub root: PathBuf,
    /// Write the JSON Lines listing here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Dataset root: each sample is `<base>.txt` annotations beside
    /// `<base>_test.pgm` and `<base>_temp.pgm` images.
    pub root: PathBuf,
    /// Maximum per-axis alignment shift tried, in pixels.
    #[arg(long, default_value_t = 4)]
    pub align_radius: u32,
    /// Minimum absolute gray difference that counts as defect residue.
    #[arg(long, default_value_t = 60)]
    pub diff_threshold: u8,
    /// Minimum connected-blob size, in pixels, that becomes a prediction.
    #[arg(long, default_value_t = 12)]
    pub min_blob: usize,
    /// Minimum intersection-over-union for a prediction to claim an
    /// annotation.
    #[arg(allow_negative_numbers = true, long, default_value_t = 0.3)]
    pub iou: f64,
    /// Write the JSON Lines result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(cmd: DeepPcbCmd) -> CmdResult<()> {
    match cmd {
        DeepPcbCmd::Ingest(args) => {
            let ingest = ingest_deeppcb(&args.root)?;
            for warning in &ingest.warnings {
                eprintln!("warning: {warning}");
            }
            let mut out = String::new();
            for sample in &ingest.samples {
                let line = json!({
                    "base": sample.base,
                    "annotations": sample.annotations.len(),
                });
                out.push_str(&format!("{line}\n"));
            }
            emit_text(args.output.as_deref(), &out)
        }
        DeepPcbCmd::Evaluate(args) => {
            let cfg = DeepPcbConfig {
                align_radius: args.align_radius,
                diff_threshold: args.diff_threshold,
                min_blob_px: args.min_blob,
                iou_threshold: args.iou,
            };
            let ingest = ingest_deeppcb(&args.root)?;
            for warning in &ingest.warnings {
                eprintln!("warning: {warning}");
            }
            let eval = evaluate_deeppcb(&ingest.samples, &cfg)?;
            let mut out = String::new();
            for sample in &eval.samples {
                out.push_str(&serde_json::to_string(sample).expect("sample eval serializes"));
                out.push('\n');
            }
            let summary = json!({
                "precision": eval.precision,
                "recall": eval.recall,
            });
            out.push_str(&format!("{summary}\n"));
            emit_text(args.output.as_deref(), &out)
        }
    }
}
