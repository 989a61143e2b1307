//! Template matching: normalized cross-correlation over all window
//! offsets, plus the simpler SAD/SSD distances for fixed-offset window
//! comparison.
//!
//! Positions are `(x, y)` = (column, row) of a window's top-left corner.

use rayon::prelude::*;
use thiserror::Error;

use crate::imgcore::{FloatImage, GrayImage};

/// Errors raised by matching operations.
#[derive(Debug, Error, PartialEq)]
pub enum MatchError {
    /// A constant template has zero centered norm, leaving the correlation
    /// denominator undefined.
    #[error("template is constant (centered norm 0); correlation is undefined")]
    ConstantTemplate,
    /// The template does not fit inside the searched image.
    #[error("template {tw}x{th} does not fit in image {iw}x{ih}")]
    TemplateTooLarge { tw: u32, th: u32, iw: u32, ih: u32 },
    /// The requested window extends past the image boundary.
    #[error("window at ({x},{y}) size {tw}x{th} leaves image {iw}x{ih}")]
    WindowOutOfBounds {
        x: u32,
        y: u32,
        tw: u32,
        th: u32,
        iw: u32,
        ih: u32,
    },
}

/// A search patch with its mean and centered norm precomputed, so repeated
/// correlation scans don't re-derive them.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    patch: GrayImage,
    mean: f64,
    centered_norm: f64,
}

impl Template {
    /// Wraps a patch, precomputing its mean and `sqrt(sum((T - mean)^2))`.
    ///
    /// Constant patches are representable (SAD/SSD handle them fine);
    /// correlation rejects them at match time.
    pub fn new(patch: GrayImage) -> Self {
        let n = (patch.width() as u64 * patch.height() as u64) as f64;
        let mean = patch.samples().iter().map(|&v| v as f64).sum::<f64>() / n;
        let centered_norm = patch
            .samples()
            .iter()
            .map(|&v| {
                let d = v as f64 - mean;
                d * d
            })
            .sum::<f64>()
            .sqrt();
        Self {
            patch,
            mean,
            centered_norm,
        }
    }

    pub fn patch(&self) -> &GrayImage {
        &self.patch
    }

    pub fn width(&self) -> u32 {
        self.patch.width()
    }

    pub fn height(&self) -> u32 {
        self.patch.height()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn centered_norm(&self) -> f64 {
        self.centered_norm
    }

    fn check_fits(&self, img: &GrayImage) -> Result<(), MatchError> {
        if self.width() > img.width() || self.height() > img.height() {
            return Err(MatchError::TemplateTooLarge {
                tw: self.width(),
                th: self.height(),
                iw: img.width(),
                ih: img.height(),
            });
        }
        Ok(())
    }

    fn check_window(&self, img: &GrayImage, at: (u32, u32)) -> Result<(), MatchError> {
        let (x, y) = at;
        if x.checked_add(self.width()).is_none_or(|e| e > img.width())
            || y.checked_add(self.height()).is_none_or(|e| e > img.height())
        {
            return Err(MatchError::WindowOutOfBounds {
                x,
                y,
                tw: self.width(),
                th: self.height(),
                iw: img.width(),
                ih: img.height(),
            });
        }
        Ok(())
    }
}

/// Outcome of a full correlation scan: the best window's top-left
/// position `(x, y)`, its score, and the complete score map (one sample
/// per valid window offset).
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub position: (u32, u32),
    pub score: f64,
    pub score_map: FloatImage,
}

/// The normalized cross-correlation of the template against the window at
/// `at`, in `[-1, 1]`. Zero-variance windows score 0.
pub fn ncc_score_at(img: &GrayImage, tmpl: &Template, at: (u32, u32)) -> Result<f64, MatchError> {
    if tmpl.centered_norm == 0.0 {
        return Err(MatchError::ConstantTemplate);
    }
    tmpl.check_window(img, at)?;
    Ok(ncc_score_unchecked(img, tmpl, at.0, at.1))
}

fn ncc_score_unchecked(img: &GrayImage, tmpl: &Template, x: u32, y: u32) -> f64 {
    let n = (tmpl.width() as u64 * tmpl.height() as u64) as f64;
    let mut window_sum = 0.0;
    let mut window_sq_sum = 0.0;
    let mut cross = 0.0;
    for v in 0..tmpl.height() {
        for u in 0..tmpl.width() {
            let s = img.at(y + v, x + u) as f64;
            let t = tmpl.patch.at(v, u) as f64;
            window_sum += s;
            window_sq_sum += s * s;
            // sum((S - S̄)(T - T̄)) == sum(S (T - T̄)) because the centered
            // template sums to zero.
            cross += s * (t - tmpl.mean);
        }
    }
    let window_var = window_sq_sum - window_sum * window_sum / n;
    if window_var <= 0.0 {
        return 0.0;
    }
    (cross / (window_var.sqrt() * tmpl.centered_norm)).clamp(-1.0, 1.0)
}

/// Scans every valid window offset, returning the full correlation map and
/// the best position. Ties go to the first occurrence in row-major order.
pub fn ncc_match(img: &GrayImage, tmpl: &Template) -> Result<MatchResult, MatchError> {
    if tmpl.centered_norm == 0.0 {
        return Err(MatchError::ConstantTemplate);
    }
    tmpl.check_fits(img)?;
    let map_w = img.width() - tmpl.width() + 1;
    let map_h = img.height() - tmpl.height() + 1;
    let rows: Vec<Vec<f64>> = (0..map_h)
        .into_par_iter()
        .map(|y| {
            (0..map_w)
                .map(|x| ncc_score_unchecked(img, tmpl, x, y))
                .collect()
        })
        .collect();
    let score_map = FloatImage::from_fn(map_w, map_h, |r, c| rows[r as usize][c as usize]);
    let mut best = (0u32, 0u32);
    let mut best_score = f64::NEG_INFINITY;
    for y in 0..map_h {
        for x in 0..map_w {
            let s = score_map.at(y, x);
            if s > best_score {
                best_score = s;
                best = (x, y);
            }
        }
    }
    Ok(MatchResult {
        position: best,
        score: best_score,
        score_map,
    })
}

/// Mean absolute difference between the template and the window at `at`.
pub fn sad(img: &GrayImage, tmpl: &Template, at: (u32, u32)) -> Result<f64, MatchError> {
    tmpl.check_window(img, at)?;
    let (x, y) = at;
    let mut acc = 0.0;
    for v in 0..tmpl.height() {
        for u in 0..tmpl.width() {
            acc += (tmpl.patch.at(v, u) as f64 - img.at(y + v, x + u) as f64).abs();
        }
    }
    Ok(acc / (tmpl.width() as u64 * tmpl.height() as u64) as f64)
}

/// Mean squared difference between the template and the window at `at`.
pub fn ssd(img: &GrayImage, tmpl: &Template, at: (u32, u32)) -> Result<f64, MatchError> {
    tmpl.check_window(img, at)?;
    let (x, y) = at;
    let mut acc = 0.0;
    for v in 0..tmpl.height() {
        for u in 0..tmpl.width() {
            let d = tmpl.patch.at(v, u) as f64 - img.at(y + v, x + u) as f64;
            acc += d * d;
        }
    }
    Ok(acc / (tmpl.width() as u64 * tmpl.height() as u64) as f64)
}
