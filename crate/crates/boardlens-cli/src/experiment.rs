//! `experiment` — planned batch runs over generated boards.

use std::path::PathBuf;

use clap::Args;

use boardlens::inspect::{parse_plan, run_experiment};

use crate::inspect::load_golden;
use crate::io::{emit_text, CliError, CmdResult};
use crate::overrides::ConfigFlags;

#[derive(Args)]
pub struct ExperimentArgs {
    /// Plan file: `group = STANDARD DEFECT COLOR_DIFF` counts per line,
    /// plus optional `seed`, `repetitions`, and `noise_sigma` keys.
    pub plan: PathBuf,
    #[command(flatten)]
    pub config: ConfigFlags,
    /// Defect-free reference board (PPM) the edge and matching checks
    /// compare against; defaults to the built-in generated reference.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Worker threads for the batch; defaults to all available cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4096))]
    pub workers: Option<u64>,
    /// Write the CSV table here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: ExperimentArgs) -> CmdResult<()> {
    if let Some(workers) = args.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers as usize)
            .build_global()
            .map_err(CliError::domain)?;
    }
    let text =
        std::fs::read_to_string(&args.plan).map_err(|e| CliError::in_file(&args.plan, e))?;
    let plan = parse_plan(&text).map_err(|e| CliError::in_file(&args.plan, e))?;
    let cfg = args.config.effective()?;
    let golden = load_golden(args.golden.as_ref(), &cfg)?;
    let table = run_experiment(&plan, &cfg, &golden)?;
    emit_text(args.output.as_deref(), &table.to_csv())
}
