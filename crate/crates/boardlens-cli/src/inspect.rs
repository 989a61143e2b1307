//! `inspect` — running the full pipeline on one board image.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;

use boardlens::inspect::{golden_board, run_pipeline, Golden, PipelineConfig, Verdict};

use crate::io::{emit_text, read_rgb, CliError, CmdResult};
use crate::overrides::ConfigFlags;

#[derive(Args)]
pub struct InspectArgs {
    /// Board image to inspect (PPM).
    pub board: PathBuf,
    #[command(flatten)]
    pub config: ConfigFlags,
    /// Defect-free reference board (PPM) the edge and matching checks
    /// compare against; defaults to the built-in generated reference.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Board identifier used in the report; defaults to the input file
    /// stem.
    #[arg(long)]
    pub id: Option<String>,
    /// Write the JSON Lines report here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Append a `REMOVE <board_id> <timestamp>` line here when the board
    /// is judged defective.
    #[arg(long)]
    pub event_log: Option<PathBuf>,
    /// Timestamp stamped onto removal events.
    #[arg(long, default_value_t = 0)]
    pub timestamp: u64,
    /// Exit with status 1 when the verdict is defective (for CI-style
    /// gating; by default a defective verdict is a result, not a
    /// failure, and exits 0).
    #[arg(long)]
    pub fail_on_defect: bool,
}

/// Builds the comparison reference: a user-supplied golden image when
/// given, the generator's reference board otherwise.
pub fn load_golden(path: Option<&PathBuf>, cfg: &PipelineConfig) -> CmdResult<Golden> {
    let board = match path {
        Some(p) => read_rgb(p)?.0,
        None => golden_board(),
    };
    Ok(Golden::from_board(&board, cfg)?)
}

pub fn run(args: InspectArgs) -> CmdResult<ExitCode> {
    let cfg = args.config.effective()?;
    let golden = load_golden(args.golden.as_ref(), &cfg)?;
    let (board, _) = read_rgb(&args.board)?;
    let id = match &args.id {
        Some(id) => id.clone(),
        None => args
            .board
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "board".to_string()),
    };
    let report = run_pipeline(&id, &board, &cfg, Some(&golden))?;

    if let Some(log) = &args.event_log {
        if let Some(line) = report.event_log_line(args.timestamp) {
            append_line(log, &line)?;
        }
    }

    let jsonl = boardlens::inspect::reports_jsonl(std::slice::from_ref(&report));
    emit_text(args.output.as_deref(), &jsonl)?;

    if args.fail_on_defect && report.verdict == Verdict::Defective {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn append_line(path: &PathBuf, line: &str) -> CmdResult<()> {
    use std::io::Write as _;
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::in_file(path, e))?;
    writeln!(file, "{line}").map_err(|e| CliError::in_file(path, e))
}
