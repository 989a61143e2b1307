//! `aco` — ant colony optimization over tours and gray thresholds.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde_json::json;

use boardlens::aco::{run_aco, threshold_adapter, AcoParams, TourProblem};
use boardlens::imgcore::{between_class_variance, histogram};

use crate::io::{emit_text, read_gray, read_points2, CmdResult};

#[derive(Subcommand)]
pub enum AcoCmd {
    /// Find a short closed tour through 2-D cities.
    Tsp(TspArgs),
    /// Pick k gray thresholds maximizing between-class variance.
    Threshold(ThresholdArgs),
}

#[derive(Args)]
pub struct TspArgs {
    /// Cities file: one `x y` pair per line, `#` comments allowed.
    pub points: PathBuf,
    #[command(flatten)]
    pub params: ParamFlags,
    /// Write the per-iteration convergence trace here as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct ThresholdArgs {
    /// Input image (PGM) whose histogram is partitioned.
    pub input: PathBuf,
    /// Number of thresholds to place.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[command(flatten)]
    pub params: ParamFlags,
    /// Write the per-iteration convergence trace here as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Colony parameters shared by both problems.
#[derive(Args)]
pub struct ParamFlags {
    /// Pheromone influence exponent.
    #[arg(allow_negative_numbers = true, long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Heuristic influence exponent.
    #[arg(allow_negative_numbers = true, long, default_value_t = 2.0)]
    pub beta: f64,
    /// Pheromone evaporation rate per iteration, in (0, 1).
    #[arg(allow_negative_numbers = true, long, default_value_t = 0.5)]
    pub rho: f64,
    /// Total pheromone one ant spreads over its path.
    #[arg(allow_negative_numbers = true, long, default_value_t = 1.0)]
    pub deposit: f64,
    /// Ants per iteration.
    #[arg(long, default_value_t = 20)]
    pub ants: u32,
    /// Number of iterations.
    #[arg(long, default_value_t = 50)]
    pub iterations: u32,
    /// Initial pheromone on every arc.
    #[arg(allow_negative_numbers = true, long, default_value_t = 1.0)]
    pub tau0: f64,
    /// Pheromone floor after evaporation.
    #[arg(allow_negative_numbers = true, long, default_value_t = 1e-4)]
    pub tau_min: f64,
    /// Pheromone ceiling after deposits.
    #[arg(allow_negative_numbers = true, long, default_value_t = 10.0)]
    pub tau_max: f64,
    /// Probability of greedy arc choice instead of roulette sampling,
    /// in [0, 1).
    #[arg(allow_negative_numbers = true, long, default_value_t = 0.0)]
    pub q0: f64,
    /// Random seed; identical seeds reproduce the run exactly.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ParamFlags {
    fn to_params(&self) -> AcoParams {
        AcoParams {
            alpha: self.alpha,
            beta: self.beta,
            rho: self.rho,
            big_h: self.deposit,
            ants: self.ants,
            iterations: self.iterations,
            tau0: self.tau0,
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            q0: self.q0,
            seed: self.seed,
        }
    }
}

pub fn run(cmd: AcoCmd) -> CmdResult<()> {
    match cmd {
        AcoCmd::Tsp(args) => {
            let points = read_points2(&args.points)?;
            let problem = TourProblem::from_points(&points)?;
            let run = run_aco(&problem, &args.params.to_params())?;
            if let Some(trace) = &args.trace {
                crate::io::emit_text(Some(trace), &run.trace_csv())?;
            }
            let line = json!({
                "order": run.best.visited,
                "cost": run.best.cost,
            });
            emit_text(args.output.as_deref(), &format!("{line}\n"))
        }
        AcoCmd::Threshold(args) => {
            let (img, _) = read_gray(&args.input)?;
            let hist = histogram(&img);
            let problem = threshold_adapter(&hist, args.k)?;
            let run = run_aco(&problem, &args.params.to_params())?;
            if let Some(trace) = &args.trace {
                crate::io::emit_text(Some(trace), &run.trace_csv())?;
            }
            let thresholds = problem.thresholds_of(&run.best.visited);
            let variance = between_class_variance(&hist, &thresholds);
            let line = json!({
                "thresholds": thresholds,
                "variance": variance,
            });
            emit_text(args.output.as_deref(), &format!("{line}\n"))
        }
    }
}
