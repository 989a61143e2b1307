//! `fitline` — robust straight-line fitting through a 2-D point cloud.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;

use boardlens::linefit::{fit_line_irls, fit_line_tls, TukeySpec};

use crate::io::{emit_text, read_points2, CmdResult};

#[derive(Args)]
pub struct FitlineArgs {
    /// Points file: one `x y` pair per line, `#` comments allowed.
    pub points: PathBuf,
    /// Fitting method.
    #[arg(long, value_enum, default_value_t = Method::Irls)]
    pub method: Method,
    /// Residual scale in the same units as the points; residuals at or
    /// beyond this distance get weight 1/2 or less.
    #[arg(allow_negative_numbers = true, long, default_value_t = 2.0)]
    pub tau: f64,
    /// Maximum number of reweighted refits.
    #[arg(long, default_value_t = 20)]
    pub max_iters: u32,
    /// Convergence tolerance on the line parameters between refits.
    #[arg(allow_negative_numbers = true, long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Use the classic biweight profile, which cuts weights to zero
    /// beyond tau instead of following the printed rational tail.
    #[arg(long)]
    pub classic: bool,
    /// Write the JSON result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Iteratively reweighted least squares with the biweight function.
    Irls,
    /// Plain total least squares, no outlier handling.
    Tls,
}

pub fn run(args: FitlineArgs) -> CmdResult<()> {
    let points = read_points2(&args.points)?;
    let line = match args.method {
        Method::Tls => {
            let line = fit_line_tls(&points)?;
            json!({
                "nx": line.nx(),
                "ny": line.ny(),
                "offset": line.offset(),
            })
        }
        Method::Irls => {
            let spec = TukeySpec::new(args.tau, args.max_iters, args.tol)?
                .with_classic_tukey(args.classic);
            let fit = fit_line_irls(&points, &spec)?;
            json!({
                "nx": fit.line.nx(),
                "ny": fit.line.ny(),
                "offset": fit.line.offset(),
                "iterations": fit.iterations,
                "weights": fit.weights,
            })
        }
    };
    emit_text(args.output.as_deref(), &format!("{line}\n"))
}
