//! The end-to-end inspection pipeline: window normalization, per-zone
//! color statistics, and the edge-count, template-correlation, and
//! barcode-presence checks that together produce a verdict.
//!
//! Stages run in a fixed order. The color check acts as a gate: a board
//! whose zones miss their color targets is tagged and the surface checks
//! are skipped, mirroring a line where obviously mispopulated boards are
//! pulled before detailed surface review. Surface checks compare against
//! a [`Golden`] reference derived from a known-good board.

use std::collections::BTreeMap;
use std::time::Instant;

use thiserror::Error;

use crate::barcode::{bw_area_ratio, BarcodeError};
use crate::colorspace::pixel_to_hsv;
use crate::edges::{canny, HysteresisThresholds};
use crate::filters::GaussianSpec;
use crate::imgcore::{
    between_class_variance, histogram_of_pixels, otsu_threshold, GrayImage, PixelSet, Region,
    RgbImage,
};
use crate::matching::{ncc_match, Template};
use crate::tone::rgb_to_gray;

use super::config::{BrightnessSource, PipelineConfig};
use super::report::{
    DefectTag, FeatureStats, InspectionReport, RoiFeatures, Verdict, REPORT_SCHEMA,
};

/// Errors raised while running the pipeline.
#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    /// The configuration failed validation.
    #[error("invalid pipeline configuration: {0}")]
    Config(String),
    /// A stage could not produce a result (as opposed to producing a
    /// defect finding).
    #[error("{stage} stage failed: {reason}")]
    Stage {
        stage: &'static str,
        reason: String,
    },
}

fn stage_err(stage: &'static str, reason: impl ToString) -> PipelineError {
    PipelineError::Stage {
        stage,
        reason: reason.to_string(),
    }
}

/// Reference data cut from a known-good board: the template the matching
/// check correlates against, where it sits in the window, and the edge
/// count the edge check compares to.
#[derive(Debug, Clone, PartialEq)]
pub struct Golden {
    template: Template,
    /// Top-left (row, col) of the template inside the window.
    template_origin: (u32, u32),
    edge_count: usize,
}

impl Golden {
    /// Derives reference data from a defect-free board under `cfg`.
    ///
    /// Fails when the configured match region is constant (no texture to
    /// correlate) or, with the edge check enabled, when the reference
    /// board has no edge pixels to compare counts against.
    pub fn from_board(board: &RgbImage, cfg: &PipelineConfig) -> Result<Self, PipelineError> {
        cfg.validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        let frame = letterbox(board, cfg.window);
        let gray = rgb_to_gray(&frame);
        let pixels = cfg
            .match_region
            .rasterize(frame.width(), frame.height())
            .map_err(|e| stage_err("matching", e))?;
        let (r0, r1, c0, c1) = bounds(&pixels);
        let patch = crop(&gray, r0, r1, c0, c1);
        let template = Template::new(patch);
        if template.centered_norm() == 0.0 {
            return Err(stage_err(
                "matching",
                "reference template is constant; correlation is undefined",
            ));
        }
        let edge_count = count_region_edges(&gray, cfg)?;
        if cfg.checks.edges && edge_count == 0 {
            return Err(stage_err(
                "edges",
                "reference board has no edge pixels in the edge region",
            ));
        }
        Ok(Self {
            template,
            template_origin: (r0, c0),
            edge_count,
        })
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn template_origin(&self) -> (u32, u32) {
        self.template_origin
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }
}

/// Normalizes a frame onto the `(width, height)` window: smaller axes are
/// centered on black padding, larger axes are center-cropped (the extra
/// pixel of an odd difference falls on the right/bottom).
pub fn letterbox(img: &RgbImage, window: (u32, u32)) -> RgbImage {
    let (w, h) = window;
    if img.width() == w && img.height() == h {
        return img.clone();
    }
    let copy_w = img.width().min(w);
    let copy_h = img.height().min(h);
    let src_r = (img.height() - copy_h) / 2;
    let src_c = (img.width() - copy_w) / 2;
    let dst_r = (h - copy_h) / 2;
    let dst_c = (w - copy_w) / 2;
    let mut out = RgbImage::filled(w, h, [0, 0, 0]);
    for r in 0..copy_h {
        for c in 0..copy_w {
            out.set(dst_r + r, dst_c + c, img.at(src_r + r, src_c + c));
        }
    }
    out
}

/// Measures one zone's color statistics and applies the brightness rule.
///
/// Returns the zone's features and whether its mean brightness clears the
/// configured threshold (strictly above passes). Brightness is the HSV
/// value rescaled to 0-255 or the unquantized luminance weighting,
/// depending on the configured source; hue and saturation are always
/// measured, threshold or not.
pub fn classify_roi(
    img: &RgbImage,
    region: &Region,
    cfg: &PipelineConfig,
) -> Result<(RoiFeatures, bool), PipelineError> {
    let pixels = region
        .rasterize(img.width(), img.height())
        .map_err(|e| stage_err("features", e))?;
    let n = pixels.len() as f64;
    let mut sums = [0.0f64; 3];
    let mut squares = [0.0f64; 3];
    for &(r, c) in &pixels {
        let px = img.at(r, c);
        let (hue, saturation, value) = pixel_to_hsv(px);
        let brightness = match cfg.brightness_source {
            BrightnessSource::HsvValue => value * 255.0,
            BrightnessSource::Gray => {
                0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64
            }
        };
        for (slot, feature) in [hue, saturation, brightness].into_iter().enumerate() {
            sums[slot] += feature;
            squares[slot] += feature * feature;
        }
    }
    let stat = |slot: usize| {
        let mean = sums[slot] / n;
        let variance = (squares[slot] / n - mean * mean).max(0.0);
        FeatureStats {
            mean,
            deviation: variance.sqrt(),
        }
    };
    let features = RoiFeatures {
        hue: stat(0),
        saturation: stat(1),
        brightness: stat(2),
        area: pixels.len() as u64,
    };
    let qualified = features.brightness.mean > cfg.brightness_threshold as f64;
    Ok((features, qualified))
}

/// Inclusive (row_lo, row_hi, col_lo, col_hi) bounds of a pixel set.
fn bounds(pixels: &PixelSet) -> (u32, u32, u32, u32) {
    let mut rows = (u32::MAX, 0);
    let mut cols = (u32::MAX, 0);
    for &(r, c) in pixels {
        rows = (rows.0.min(r), rows.1.max(r));
        cols = (cols.0.min(c), cols.1.max(c));
    }
    (rows.0, rows.1, cols.0, cols.1)
}

fn crop(img: &GrayImage, r0: u32, r1: u32, c0: u32, c1: u32) -> GrayImage {
    GrayImage::from_fn(c1 - c0 + 1, r1 - r0 + 1, |r, c| img.at(r0 + r, c0 + c))
}

/// Counts detector edge pixels inside the configured edge region.
///
/// The detector runs on the region's bounding box padded by the smoothing
/// radius plus two pixels, so border effects land outside the counted
/// area; both the reference and the board under test go through exactly
/// this procedure, keeping their counts comparable.
fn count_region_edges(gray: &GrayImage, cfg: &PipelineConfig) -> Result<usize, PipelineError> {
    let pixels = cfg
        .edge_region
        .rasterize(gray.width(), gray.height())
        .map_err(|e| stage_err("edges", e))?;
    let (r0, r1, c0, c1) = bounds(&pixels);
    let margin = cfg.edge_radius + 2;
    let cr0 = r0.saturating_sub(margin);
    let cc0 = c0.saturating_sub(margin);
    let cr1 = (r1 + margin).min(gray.height() - 1);
    let cc1 = (c1 + margin).min(gray.width() - 1);
    let patch = crop(gray, cr0, cr1, cc0, cc1);
    let spec = GaussianSpec::new(cfg.edge_sigma, cfg.edge_radius)
        .map_err(|e| stage_err("edges", e))?;
    let th = HysteresisThresholds::new(cfg.edge_low, cfg.edge_high)
        .map_err(|e| stage_err("edges", e))?;
    let edges = canny(&patch, spec, th).map_err(|e| stage_err("edges", e))?;
    Ok(pixels
        .iter()
        .filter(|&&(r, c)| edges.at(r - cr0, c - cc0) == 255)
        .count())
}

/// Correlates the reference template against the board, searching within
/// the configured radius of its reference position, and returns the best
/// score.
fn best_match_score(
    gray: &GrayImage,
    golden: &Golden,
    cfg: &PipelineConfig,
) -> Result<f64, PipelineError> {
    let (tr, tc) = golden.template_origin;
    let rad = cfg.match_search_radius;
    let r0 = tr.saturating_sub(rad);
    let c0 = tc.saturating_sub(rad);
    let r1 = (tr + golden.template.height() - 1 + rad).min(gray.height() - 1);
    let c1 = (tc + golden.template.width() - 1 + rad).min(gray.width() - 1);
    let window = crop(gray, r0, r1, c0, c1);
    let result = ncc_match(&window, &golden.template).map_err(|e| stage_err("matching", e))?;
    Ok(result.score)
}

/// Decides whether the barcode is effectively absent: the label zone's
/// histogram either splits too weakly (variance floor) or splits with a
/// white-to-black area ratio outside the accepted interval.
fn barcode_absent(gray: &GrayImage, cfg: &PipelineConfig) -> Result<bool, PipelineError> {
    let pixels = cfg
        .barcode_region
        .rasterize(gray.width(), gray.height())
        .map_err(|e| stage_err("barcode", e))?;
    let hist = histogram_of_pixels(gray, &pixels);
    let threshold = otsu_threshold(&hist);
    if between_class_variance(&hist, &[threshold]) < cfg.barcode_min_variance {
        return Ok(true);
    }
    match bw_area_ratio(gray, &cfg.barcode_region, threshold) {
        Ok(ratio) => Ok(!(cfg.barcode_ratio_lo..=cfg.barcode_ratio_hi).contains(&ratio)),
        Err(BarcodeError::AllOneClass { .. }) => Ok(true),
        Err(e) => Err(stage_err("barcode", e)),
    }
}

fn in_gate(range: Option<(f64, f64)>, value: f64) -> bool {
    range.is_none_or(|(lo, hi)| (lo..=hi).contains(&value))
}

fn record(timings: &mut Option<BTreeMap<String, f64>>, stage: &str, start: Instant) {
    if let Some(map) = timings {
        map.insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
    }
}

/// Runs every enabled stage over one board and assembles its report.
///
/// `golden` supplies the reference data the edge and matching checks
/// compare against; it may be omitted only when both of those checks are
/// disabled. The report echoes `cfg` so results stay traceable.
pub fn run_pipeline(
    board_id: &str,
    img: &RgbImage,
    cfg: &PipelineConfig,
    golden: Option<&Golden>,
) -> Result<InspectionReport, PipelineError> {
    cfg.validate()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let mut timings: Option<BTreeMap<String, f64>> =
        if cfg.collect_timings { Some(BTreeMap::new()) } else { None };
    let need_golden = |stage: &'static str| {
        golden.ok_or_else(|| stage_err(stage, "a golden reference is required for this check"))
    };

    let start = Instant::now();
    let frame = letterbox(img, cfg.window);
    record(&mut timings, "letterbox", start);

    let start = Instant::now();
    let gray = rgb_to_gray(&frame);
    record(&mut timings, "gray", start);

    let start = Instant::now();
    let (features_0, qualified_0) = classify_roi(&frame, &cfg.roi_0, cfg)?;
    let (features_1, qualified_1) = classify_roi(&frame, &cfg.roi_1, cfg)?;
    record(&mut timings, "features", start);

    let mut tags = Vec::new();
    let mut color_ok = true;
    if cfg.checks.color {
        let gates_ok = [&features_0, &features_1].iter().all(|f| {
            in_gate(cfg.hue_range, f.hue.mean) && in_gate(cfg.saturation_range, f.saturation.mean)
        });
        if !(qualified_0 && qualified_1 && gates_ok) {
            tags.push(DefectTag::ColorDifference);
            color_ok = false;
        }
    }

    if color_ok {
        if cfg.checks.edges {
            let golden = need_golden("edges")?;
            let start = Instant::now();
            let count = count_region_edges(&gray, cfg)?;
            record(&mut timings, "edges", start);
            let reference = golden.edge_count as f64;
            if (count as f64 - reference).abs() > cfg.edge_tolerance * reference {
                tags.push(DefectTag::EdgeDefect);
            }
        }
        if cfg.checks.matching {
            let golden = need_golden("matching")?;
            let start = Instant::now();
            let score = best_match_score(&gray, golden, cfg)?;
            record(&mut timings, "matching", start);
            if score < cfg.match_min_score {
                tags.push(DefectTag::MatchFail);
            }
        }
        if cfg.checks.barcode {
            let start = Instant::now();
            if barcode_absent(&gray, cfg)? {
                tags.push(DefectTag::BarcodeMissing);
            }
            record(&mut timings, "barcode", start);
        }
    }

    let verdict = if tags.is_empty() {
        Verdict::Qualified
    } else {
        Verdict::Defective
    };
    Ok(InspectionReport {
        schema: REPORT_SCHEMA.to_string(),
        board_id: board_id.to_string(),
        rois: vec![features_0, features_1],
        verdict,
        defect_tags: tags,
        timings_ms: timings,
        removal_event: verdict == Verdict::Defective,
        config: cfg.clone(),
    })
}
