//! Image-processing toolkit for optical inspection of populated circuit
//! boards.
//!
//! The crate is organized as a stack of small, composable modules:
//!
//! * [`imgcore`] — raster containers, region-of-interest algebra, region
//!   statistics, and a PNM (PGM/PPM) codec.
//! * [`filters`] — mean, median, and Gaussian smoothing.
//! * [`tone`] — grayscale conversion and tonal transforms (linear, log,
//!   exponential, contrast stretch, local emphasis).
//! * [`colorspace`] — channel decomposition, RGB↔HSV conversion, and HSV
//!   range masks.
//! * [`edges`] — Roberts/Sobel/Prewitt gradients, non-maximum suppression,
//!   dual-threshold hysteresis, and the composed edge detector.
//! * [`linefit`] — robust straight-line fitting by iteratively reweighted
//!   least squares.
//! * [`matching`] — normalized cross-correlation template matching plus
//!   SAD/SSD window scores.
//! * [`barcode`] — bar-region enhancement and candidate location via edge
//!   chains and parallel-line clustering.
//! * [`aco`] — ant colony optimization with tour and gray-threshold
//!   adapters.
//! * [`camera`] — pinhole projection and stereo calibration file support.
//! * [`inspect`] — the end-to-end board inspection pipeline, a synthetic
//!   board generator, batch experiments, and external dataset ingestion.
//!
//! Every operation is deterministic: stochastic components take explicit
//! seeds, and batch runs produce identical artifacts for identical inputs.

pub mod aco;
pub mod barcode;
pub mod camera;
pub mod colorspace;
pub mod edges;
pub mod filters;
pub mod imgcore;
pub mod inspect;
pub mod linefit;
pub mod matching;
pub mod tone;

pub use imgcore::{FloatImage, GrayImage, PixelSet, Region, RegionStats, RgbImage};
