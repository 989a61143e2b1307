//! Spatial smoothing filters: arithmetic mean, median, and Gaussian.
//!
//! All filters use replicate (clamp-to-edge) padding so output dimensions
//! equal input dimensions, and quantize results with the crate-wide
//! half-up rounding rule.

use thiserror::Error;

use crate::imgcore::{quantize, GrayImage};

/// Errors raised when constructing filter parameter sets.
#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    /// Gaussian sigma must be positive and finite.
    #[error("sigma must be positive and finite, got {sigma}")]
    BadSigma { sigma: f64 },
    /// Window radius must be at least 1.
    #[error("radius must be at least 1")]
    BadRadius,
}

/// Parameters of a sampled Gaussian kernel: standard deviation and window
/// radius (the kernel is `(2 * radius + 1)` samples on a side).
///
/// The default is `sigma = 0.8493` with radius 1, which reproduces the
/// classic 3x3 smoothing template `[[1,2,1],[2,4,2],[1,2,1]] / 16`: at
/// that sigma, `exp(-d^2 / (2 sigma^2))` halves for each unit increase of
/// the squared distance `d^2`, so the sampled weights sit in exact
/// 4:2:1 proportion before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    sigma: f64,
    radius: u32,
}

impl GaussianSpec {
    pub fn new(sigma: f64, radius: u32) -> Result<Self, FilterError> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(FilterError::BadSigma { sigma });
        }
        if radius == 0 {
            return Err(FilterError::BadRadius);
        }
        Ok(Self { sigma, radius })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Kernel side length, `2 * radius + 1`.
    pub fn side(&self) -> usize {
        2 * self.radius as usize + 1
    }
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self {
            sigma: 0.8493,
            radius: 1,
        }
    }
}

/// A square convolution kernel with normalized weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    side: usize,
    weights: Vec<f64>,
}

impl Kernel {
    /// Side length (always odd).
    pub fn side(&self) -> usize {
        self.side
    }

    /// Row-major weights, `side * side` of them, summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at kernel offset `(dr, dc)`, each in `[-radius, radius]`.
    pub fn at(&self, dr: i64, dc: i64) -> f64 {
        let radius = (self.side / 2) as i64;
        debug_assert!(dr.abs() <= radius && dc.abs() <= radius);
        self.weights[((dr + radius) * self.side as i64 + (dc + radius)) as usize]
    }
}

/// Samples an isotropic Gaussian on the integer grid and normalizes the
/// weights to sum to 1.
pub fn gaussian_kernel(spec: GaussianSpec) -> Kernel {
    let radius = spec.radius as i64;
    let side = spec.side();
    let inv_two_sigma_sq = 1.0 / (2.0 * spec.sigma * spec.sigma);
    let mut weights = Vec::with_capacity(side * side);
    for dr in -radius..=radius {
        for dc in -radius..=radius {
            let d_sq = (dr * dr + dc * dc) as f64;
            weights.push((-d_sq * inv_two_sigma_sq).exp());
        }
    }
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Kernel { side, weights }
}

/// Arithmetic mean over a `(2 * radius + 1)` square window with replicate
/// padding.
///
/// # Panics
/// Panics if `radius` is 0.
pub fn mean_filter(img: &GrayImage, radius: u32) -> GrayImage {
    assert!(radius >= 1, "radius must be at least 1");
    let r = radius as i64;
    let window = ((2 * r + 1) * (2 * r + 1)) as f64;
    GrayImage::from_fn(img.width(), img.height(), |row, col| {
        let mut sum: u64 = 0;
        for dr in -r..=r {
            for dc in -r..=r {
                sum += img.at_clamped(row as i64 + dr, col as i64 + dc) as u64;
            }
        }
        // The window size is odd squared, hence odd, so `sum / window`
        // never lands exactly on .5 and half-up rounding is unambiguous.
        quantize(sum as f64 / window)
    })
}

/// Median over a `(2 * radius + 1)` square window with replicate padding.
/// The window always holds an odd number of samples, so the median is an
/// actual input value and needs no quantization.
///
/// # Panics
/// Panics if `radius` is 0.
pub fn median_filter(img: &GrayImage, radius: u32) -> GrayImage {
    assert!(radius >= 1, "radius must be at least 1");
    let r = radius as i64;
    let window = ((2 * r + 1) * (2 * r + 1)) as u64;
    let middle = window / 2; // 0-based rank of the median
    GrayImage::from_fn(img.width(), img.height(), |row, col| {
        let mut hist = [0u64; 256];
        for dr in -r..=r {
            for dc in -r..=r {
                hist[img.at_clamped(row as i64 + dr, col as i64 + dc) as usize] += 1;
            }
        }
        let mut seen = 0u64;
        for (value, &count) in hist.iter().enumerate() {
            seen += count;
            if seen > middle {
                return value as u8;
            }
        }
        unreachable!("window histogram always holds {window} samples")
    })
}

/// Convolves with a sampled Gaussian kernel (replicate padding) and
/// quantizes the result.
pub fn gaussian_filter(img: &GrayImage, spec: GaussianSpec) -> GrayImage {
    let kernel = gaussian_kernel(spec);
    let radius = spec.radius as i64;
    GrayImage::from_fn(img.width(), img.height(), |row, col| {
        let mut acc = 0.0;
        for dr in -radius..=radius {
            for dc in -radius..=radius {
                let v = img.at_clamped(row as i64 + dr, col as i64 + dc) as f64;
                acc += kernel.at(dr, dc) * v;
            }
        }
        quantize(acc)
    })
}
