//! `filter` — smoothing operators on grayscale images.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use boardlens::filters::{gaussian_filter, mean_filter, median_filter, GaussianSpec};

use crate::io::{gray_format_like, read_gray, write_gray, CmdResult};

#[derive(Subcommand)]
pub enum FilterCmd {
    /// Replace each pixel with the average of its square window.
    Mean(WindowArgs),
    /// Replace each pixel with the median of its square window.
    Median(WindowArgs),
    /// Smooth with a sampled, normalized Gaussian kernel.
    Gaussian(GaussianArgs),
}

#[derive(Args)]
pub struct WindowArgs {
    /// Input image (PGM).
    pub input: PathBuf,
    /// Output image path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Window radius in pixels; the window is (2*radius+1) squared.
    #[arg(long, default_value_t = 1)]
    pub radius: u32,
}

#[derive(Args)]
pub struct GaussianArgs {
    /// Input image (PGM).
    pub input: PathBuf,
    /// Output image path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Gaussian standard deviation in pixels. The default and a radius
    /// of 1 sample the classic 3x3 kernel with corner weight 1/16.
    #[arg(allow_negative_numbers = true, long, default_value_t = 0.8493)]
    pub sigma: f64,
    /// Kernel radius in pixels; the kernel spans (2*radius+1) squared.
    #[arg(long, default_value_t = 1)]
    pub radius: u32,
}

pub fn run(cmd: FilterCmd) -> CmdResult<()> {
    match cmd {
        FilterCmd::Mean(args) => {
            let (img, format) = read_gray(&args.input)?;
            let out = mean_filter(&img, args.radius);
            write_gray(&args.output, &out, gray_format_like(format))
        }
        FilterCmd::Median(args) => {
            let (img, format) = read_gray(&args.input)?;
            let out = median_filter(&img, args.radius);
            write_gray(&args.output, &out, gray_format_like(format))
        }
        FilterCmd::Gaussian(args) => {
            let (img, format) = read_gray(&args.input)?;
            let spec = GaussianSpec::new(args.sigma, args.radius)?;
            let out = gaussian_filter(&img, spec);
            write_gray(&args.output, &out, gray_format_like(format))
        }
    }
}
