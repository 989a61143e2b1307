//! Barcode-region enhancement and localization on board images.
//!
//! A barcode area is found by its geometry — a dense cluster of parallel
//! straight edges — and confirmed by its tonal statistics: after
//! binarization, the white area divided by the black area of a genuine
//! barcode sits in a narrow band around 1. Decoding bar widths into
//! characters is out of scope; callers get regions, ratios, and an
//! accept/reject flag.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edges::{gradient, hysteresis, nms, GradientOperator, HysteresisThresholds};
use crate::filters::{gaussian_filter, GaussianSpec};
use crate::imgcore::RegionError;
use crate::linefit::{fit_line_irls, TukeySpec};
use crate::tone::{emphasize, stretch, ToneError};
use crate::{GrayImage, Region};

/// Errors from barcode scoring and enhancement.
#[derive(Debug, Error, PartialEq)]
pub enum BarcodeError {
    /// Every pixel of the scored region fell on one side of the
    /// threshold, so the white/black ratio is undefined; such a region is
    /// not a barcode.
    #[error("all {count} region pixels are {class}; white/black ratio undefined")]
    AllOneClass { class: &'static str, count: usize },
    /// A configuration parameter violates its domain.
    #[error("invalid barcode config: {0}")]
    BadConfig(&'static str),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Tone(#[from] ToneError),
}

/// Tuning constants for [`locate_barcode`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarcodeConfig {
    /// Lower edge of the accepted white/black ratio interval (closed).
    pub accept_lo: f64,
    /// Upper edge of the accepted white/black ratio interval (closed).
    pub accept_hi: f64,
    /// Two edge chains belong to the same candidate when their fitted
    /// lines differ in orientation by less than this many degrees.
    pub max_angle_spread_deg: f64,
    /// Minimum number of near-parallel chains that must back a candidate.
    pub min_chains: usize,
    /// Edge chains shorter than this many pixels are discarded before
    /// line fitting.
    pub min_chain_len: usize,
    /// An edge pixel joins a chain only when its gradient direction is
    /// within this many degrees of horizontal — i.e. the edge itself runs
    /// near-vertically, as printed bars do.
    pub vertical_tol_deg: f64,
    /// Smoothing applied before the gradient stage.
    pub gaussian: GaussianSpec,
    /// Dual thresholds for edge hysteresis.
    pub thresholds: HysteresisThresholds,
    /// Robust-fit settings for per-chain line fitting.
    pub tukey: TukeySpec,
}

impl Default for BarcodeConfig {
    fn default() -> Self {
        Self {
            accept_lo: 0.7,
            accept_hi: 1.5,
            max_angle_spread_deg: 5.0,
            min_chains: 8,
            min_chain_len: 10,
            vertical_tol_deg: 45.0,
            gaussian: GaussianSpec::new(1.0, 2).expect("valid default"),
            thresholds: HysteresisThresholds::new(40.0, 120.0).expect("valid default"),
            tukey: TukeySpec::default(),
        }
    }
}

impl BarcodeConfig {
    /// Checks every field's domain.
    pub fn validate(&self) -> Result<(), BarcodeError> {
        if !(self.accept_lo.is_finite() && self.accept_lo >= 0.0) {
            return Err(BarcodeError::BadConfig("accept_lo must be finite and >= 0"));
        }
        if !(self.accept_hi.is_finite() && self.accept_hi >= self.accept_lo) {
            return Err(BarcodeError::BadConfig(
                "accept_hi must be finite and >= accept_lo",
            ));
        }
        if !(self.max_angle_spread_deg > 0.0 && self.max_angle_spread_deg <= 90.0) {
            return Err(BarcodeError::BadConfig(
                "max_angle_spread_deg must be in (0, 90]",
            ));
        }
        if !(self.vertical_tol_deg > 0.0 && self.vertical_tol_deg <= 90.0) {
            return Err(BarcodeError::BadConfig(
                "vertical_tol_deg must be in (0, 90]",
            ));
        }
        if self.min_chains < 2 {
            return Err(BarcodeError::BadConfig("min_chains must be >= 2"));
        }
        if self.min_chain_len < 2 {
            return Err(BarcodeError::BadConfig("min_chain_len must be >= 2"));
        }
        Ok(())
    }

    /// The closed-interval acceptance rule for a white/black ratio.
    pub fn accepts(&self, ratio: f64) -> bool {
        (self.accept_lo..=self.accept_hi).contains(&ratio)
    }
}

/// One possible barcode location: where it is, how its white/black area
/// ratio came out, and whether that ratio passed the acceptance interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarcodeCandidate {
    pub region: Region,
    pub bw_ratio: f64,
    pub accepted: bool,
}

/// Contrast preparation for barcode areas: a full-range stretch followed
/// by local emphasis, pushing bars and spaces toward the gray extremes.
///
/// Fails with a wrapped [`ToneError::ConstantImage`] when the image has a
/// single gray level (the stretch gain is undefined).
pub fn enhance_barcode(img: &GrayImage) -> Result<GrayImage, BarcodeError> {
    const EMPHASIZE_MASK: u32 = 3;
    const EMPHASIZE_FACTOR: f64 = 1.0;
    let (stretched, _) = stretch(img)?;
    Ok(emphasize(&stretched, EMPHASIZE_MASK, EMPHASIZE_FACTOR)?)
}

/// White area divided by black area inside `region`: pixels strictly
/// above `threshold` count as white, the rest as black.
///
/// Errors with [`BarcodeError::AllOneClass`] when either class is empty —
/// a one-class region has no bar structure and its ratio (0 or infinite)
/// would be meaningless.
pub fn bw_area_ratio(
    img: &GrayImage,
    region: &Region,
    threshold: u8,
) -> Result<f64, BarcodeError> {
    let pixels = region.rasterize(img.width(), img.height())?;
    let total = pixels.len();
    let white = pixels
        .iter()
        .filter(|&&(r, c)| img.at(r, c) > threshold)
        .count();
    let black = total - white;
    if white == 0 {
        return Err(BarcodeError::AllOneClass {
            class: "black",
            count: total,
        });
    }
    if black == 0 {
        return Err(BarcodeError::AllOneClass {
            class: "white",
            count: total,
        });
    }
    Ok(white as f64 / black as f64)
}

/// Orientation of a fitted line in degrees, folded to `[0, 180)` (a line
/// has no preferred direction along itself).
fn line_angle_deg(line: &crate::linefit::Line2D) -> f64 {
    // The direction vector is perpendicular to the unit normal.
    let angle = f64::atan2(line.nx(), -line.ny()).to_degrees();
    angle.rem_euclid(180.0)
}

/// Distance between two line orientations under the 180-degree fold.
fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

/// Collects 8-connected components of `mask`-flagged pixels, scanning in
/// row-major order so the component list is deterministic.
fn connected_chains(mask: &[Vec<bool>], min_len: usize) -> Vec<Vec<(u32, u32)>> {
    let height = mask.len();
    let width = if height == 0 { 0 } else { mask[0].len() };
    let mut seen = vec![vec![false; width]; height];
    let mut chains = Vec::new();
    for r0 in 0..height {
        for c0 in 0..width {
            if !mask[r0][c0] || seen[r0][c0] {
                continue;
            }
            let mut chain = Vec::new();
            let mut queue = VecDeque::from([(r0, c0)]);
            seen[r0][c0] = true;
            while let Some((r, c)) = queue.pop_front() {
                chain.push((r as u32, c as u32));
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= height as i64 || nc >= width as i64 {
                            continue;
                        }
                        let (nr, nc) = (nr as usize, nc as usize);
                        if mask[nr][nc] && !seen[nr][nc] {
                            seen[nr][nc] = true;
                            queue.push_back((nr, nc));
                        }
                    }
                }
            }
            if chain.len() >= min_len {
                chain.sort_unstable();
                chains.push(chain);
            }
        }
    }
    chains
}

/// Finds barcode-shaped areas in a board image.
///
/// The stages: contrast enhancement, edge detection, grouping of
/// near-vertical edge pixels into chains, a robust line fit per chain,
/// clustering of chains with near-parallel fitted lines, and finally the
/// white/black area-ratio test of each cluster's bounding rectangle
/// (thresholded at the rectangle's own maximal-between-class-variance
/// gray level, measured on the enhanced image).
///
/// Candidates come back sorted by covered area, largest first. Boards
/// where nothing qualifies — including constant images, where enhancement
/// itself is undefined — yield an empty list. A cluster whose rectangle
/// binarizes to a single class cannot be a barcode and is likewise
/// dropped. The result depends only on `img` and `cfg`.
pub fn locate_barcode(img: &GrayImage, cfg: &BarcodeConfig) -> Vec<BarcodeCandidate> {
    if cfg.validate().is_err() {
        return Vec::new();
    }
    let Ok(enhanced) = enhance_barcode(img) else {
        return Vec::new();
    };
    let smoothed = gaussian_filter(&enhanced, cfg.gaussian);
    let Ok(field) = gradient(&smoothed, GradientOperator::Sobel) else {
        return Vec::new();
    };
    let edge_img = hysteresis(&nms(&field), cfg.thresholds);

    // Keep edge pixels whose gradient points near-horizontally: those lie
    // on near-vertical edges, the orientation printed bars have.
    let width = edge_img.width() as usize;
    let height = edge_img.height() as usize;
    let mut vertical = vec![vec![false; width]; height];
    for (r, row) in vertical.iter_mut().enumerate() {
        for (c, flag) in row.iter_mut().enumerate() {
            if edge_img.at(r as u32, c as u32) == 0 {
                continue;
            }
            let theta = field.direction.at(r as u32, c as u32).to_degrees().abs();
            *flag = theta.min(180.0 - theta) <= cfg.vertical_tol_deg;
        }
    }

    // One robust line per chain; chains that cannot support a fit are
    // dropped rather than failing the whole search.
    let mut fitted: Vec<(f64, &Vec<(u32, u32)>)> = Vec::new();
    let chains = connected_chains(&vertical, cfg.min_chain_len);
    for chain in &chains {
        let points: Vec<(f64, f64)> = chain.iter().map(|&(r, c)| (c as f64, r as f64)).collect();
        if let Ok(fit) = fit_line_irls(&points, &cfg.tukey) {
            fitted.push((line_angle_deg(&fit.line), chain));
        }
    }
    fitted.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Greedy sweep over sorted orientations; the first and last clusters
    // may straddle the 0/180 fold, so merge them when they are close.
    type Cluster<'a> = (f64, Vec<&'a Vec<(u32, u32)>>);
    let mut clusters: Vec<Cluster> = Vec::new();
    for (angle, chain) in &fitted {
        match clusters.last_mut() {
            Some((seed, members)) if angle_distance(*angle, *seed) < cfg.max_angle_spread_deg => {
                members.push(chain);
            }
            _ => clusters.push((*angle, vec![chain])),
        }
    }
    if clusters.len() >= 2 {
        let first_seed = clusters[0].0;
        let last_seed = clusters.last().expect("nonempty").0;
        if angle_distance(first_seed, last_seed) < cfg.max_angle_spread_deg {
            let (_, tail) = clusters.pop().expect("nonempty");
            clusters[0].1.extend(tail);
        }
    }

    let mut candidates = Vec::new();
    for (_, members) in &clusters {
        if members.len() < cfg.min_chains {
            continue;
        }
        let mut row_lo = u32::MAX;
        let mut row_hi = 0;
        let mut col_lo = u32::MAX;
        let mut col_hi = 0;
        for chain in members {
            for &(r, c) in chain.iter() {
                row_lo = row_lo.min(r);
                row_hi = row_hi.max(r);
                col_lo = col_lo.min(c);
                col_hi = col_hi.max(c);
            }
        }
        let center = [
            (row_lo + row_hi) as f64 / 2.0,
            (col_lo + col_hi) as f64 / 2.0,
        ];
        let half = [
            (row_hi - row_lo) as f64 / 2.0,
            (col_hi - col_lo) as f64 / 2.0,
        ];
        let Ok(region) = Region::axis_rect(center, half) else {
            continue;
        };
        let Ok(pixels) = region.rasterize(enhanced.width(), enhanced.height()) else {
            continue;
        };
        let hist = crate::imgcore::histogram_of_pixels(&enhanced, &pixels);
        let threshold = crate::imgcore::otsu_threshold(&hist);
        let Ok(bw_ratio) = bw_area_ratio(&enhanced, &region, threshold) else {
            continue;
        };
        let area = pixels.len();
        candidates.push((area, region, bw_ratio));
    }

    candidates.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.to_string().cmp(&b.1.to_string())));
    candidates
        .into_iter()
        .map(|(_, region, bw_ratio)| BarcodeCandidate {
            accepted: cfg.accepts(bw_ratio),
            region,
            bw_ratio,
        })
        .collect()
}

/// Serializes candidates as one JSON object per line (trailing newline
/// after each object; empty input gives an empty string).
pub fn candidates_jsonl(candidates: &[BarcodeCandidate]) -> String {
    let mut out = String::new();
    for c in candidates {
        out.push_str(&serde_json::to_string(c).expect("candidate serializes"));
        out.push('\n');
    }
    out
}

/// Parses the line-per-object form produced by [`candidates_jsonl`].
pub fn parse_candidates_jsonl(text: &str) -> Result<Vec<BarcodeCandidate>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Vertical bar pattern: `bars` dark bars of width `bar_w`, separated
    /// by spaces of width `space_w`, drawn into `img` with its top-left
    /// corner at `(row0, col0)`. Returns the pattern's pixel bounds as
    /// `(row_lo, row_hi, col_lo, col_hi)` inclusive.
    #[allow(clippy::too_many_arguments)]
    fn paste_bars(
        img: &mut GrayImage,
        row0: u32,
        col0: u32,
        bars: u32,
        bar_w: u32,
        space_w: u32,
        height: u32,
        dark: u8,
        light: u8,
    ) -> (u32, u32, u32, u32) {
        let width = bars * bar_w + (bars - 1) * space_w;
        for r in row0..row0 + height {
            for c in col0..col0 + width {
                let phase = (c - col0) % (bar_w + space_w);
                img.set(r, c, if phase < bar_w { dark } else { light });
            }
        }
        (row0, row0 + height - 1, col0, col0 + width - 1)
    }

    fn iou(a: &Region, b: &Region, width: u32, height: u32) -> f64 {
        let pa = a.rasterize(width, height).unwrap();
        let pb = b.rasterize(width, height).unwrap();
        let inter = pa.intersection(&pb).count();
        let union = pa.union(&pb).count();
        inter as f64 / union as f64
    }

    #[test]
    fn enhancement_fixes_a_full_range_ramp() {
        // A slope-1 column ramp already spans [0,255], so the stretch is
        // the identity; its 3x3 local mean equals each interior pixel and
        // rounds back to it at the replicated borders, so the emphasis
        // stage is the identity too.
        let ramp = GrayImage::from_fn(256, 32, |_, c| c as u8);
        let out = enhance_barcode(&ramp).unwrap();
        assert_eq!(out.samples(), ramp.samples());
    }

    #[test]
    fn enhancement_separates_low_contrast_bars() {
        let mut img = GrayImage::filled(96, 48, 140);
        let bounds = paste_bars(&mut img, 4, 8, 10, 4, 4, 40, 100, 140);
        let out = enhance_barcode(&img).unwrap();
        let mut bar_sum = 0.0;
        let mut bar_n = 0.0;
        let mut space_sum = 0.0;
        let mut space_n = 0.0;
        for r in bounds.0..=bounds.1 {
            for c in bounds.2..=bounds.3 {
                if img.at(r, c) == 100 {
                    bar_sum += out.at(r, c) as f64;
                    bar_n += 1.0;
                } else {
                    space_sum += out.at(r, c) as f64;
                    space_n += 1.0;
                }
            }
        }
        let separation = space_sum / space_n - bar_sum / bar_n;
        assert!(separation >= 200.0, "bar/space separation {separation}");
    }

    #[test]
    fn enhancement_is_deterministic() {
        let mut rng = StdRng::seed_from_u64(401);
        let img = GrayImage::from_fn(64, 64, |_, _| rng.random());
        assert_eq!(
            enhance_barcode(&img).unwrap().samples(),
            enhance_barcode(&img).unwrap().samples()
        );
    }

    #[test]
    fn constant_images_cannot_be_enhanced() {
        let flat = GrayImage::filled(32, 32, 77);
        assert_eq!(
            enhance_barcode(&flat).unwrap_err(),
            BarcodeError::Tone(ToneError::ConstantImage { value: 77 })
        );
    }

    #[test]
    fn checkerboard_ratio_is_exactly_one() {
        let img = GrayImage::from_fn(16, 16, |r, c| if (r + c) % 2 == 0 { 0 } else { 255 });
        let region = Region::axis_rect([7.5, 7.5], [7.5, 7.5]).unwrap();
        assert_eq!(bw_area_ratio(&img, &region, 128).unwrap(), 1.0);
    }

    #[test]
    fn sixty_forty_split_sits_on_the_accept_boundary() {
        // 10x10 region: top 6 rows white, bottom 4 black -> 60/40 = 1.5,
        // accepted because the interval is closed at both ends.
        let img = GrayImage::from_fn(10, 10, |r, _| if r < 6 { 200 } else { 20 });
        let region = Region::axis_rect([4.5, 4.5], [4.5, 4.5]).unwrap();
        let ratio = bw_area_ratio(&img, &region, 128).unwrap();
        assert_eq!(ratio, 1.5);
        assert!(BarcodeConfig::default().accepts(ratio));
        assert!(!BarcodeConfig::default().accepts(ratio + 1e-9));
    }

    #[test]
    fn thirty_seventy_split_is_rejected() {
        let img = GrayImage::from_fn(10, 10, |r, _| if r < 3 { 200 } else { 20 });
        let region = Region::axis_rect([4.5, 4.5], [4.5, 4.5]).unwrap();
        let ratio = bw_area_ratio(&img, &region, 128).unwrap();
        assert!((ratio - 3.0 / 7.0).abs() < 1e-12);
        assert!(!BarcodeConfig::default().accepts(ratio));
    }

    #[test]
    fn one_class_regions_are_errors() {
        let dark = GrayImage::filled(8, 8, 10);
        let region = Region::axis_rect([3.5, 3.5], [3.5, 3.5]).unwrap();
        assert_eq!(
            bw_area_ratio(&dark, &region, 128).unwrap_err(),
            BarcodeError::AllOneClass {
                class: "black",
                count: 64
            }
        );
        let bright = GrayImage::filled(8, 8, 250);
        assert_eq!(
            bw_area_ratio(&bright, &region, 128).unwrap_err(),
            BarcodeError::AllOneClass {
                class: "white",
                count: 64
            }
        );
    }

    #[test]
    fn empty_regions_are_region_errors() {
        let img = GrayImage::filled(8, 8, 10);
        let region = Region::axis_rect([100.0, 100.0], [1.0, 1.0]).unwrap();
        assert!(matches!(
            bw_area_ratio(&img, &region, 128).unwrap_err(),
            BarcodeError::Region(RegionError::EmptyRegion { .. })
        ));
    }

    #[test]
    fn inverting_the_image_inverts_the_ratio() {
        // Complementing gray levels swaps the white and black counts when
        // the threshold maps t -> 254 - t, so the ratio inverts exactly.
        let img = GrayImage::from_fn(12, 12, |r, c| ((r * 37 + c * 11) % 251) as u8);
        let inverted = GrayImage::from_fn(12, 12, |r, c| 255 - img.at(r, c));
        let region = Region::axis_rect([5.5, 5.5], [5.5, 5.5]).unwrap();
        for t in [40u8, 128, 200] {
            let ratio = bw_area_ratio(&img, &region, t).unwrap();
            let inv = bw_area_ratio(&inverted, &region, 254 - t).unwrap();
            assert!((inv - 1.0 / ratio).abs() < 1e-12, "t={t}: {inv} vs 1/{ratio}");
        }
    }

    proptest! {
        #[test]
        fn inversion_property_holds_for_random_images(
            seed in 0u64..500,
            threshold in 0u8..=254,
        ) {
            let mut rng = StdRng::seed_from_u64(seed);
            let img = GrayImage::from_fn(9, 9, |_, _| rng.random());
            let inverted = GrayImage::from_fn(9, 9, |r, c| 255 - img.at(r, c));
            let region = Region::axis_rect([4.0, 4.0], [4.0, 4.0]).unwrap();
            let direct = bw_area_ratio(&img, &region, threshold);
            let mirror = bw_area_ratio(&inverted, &region, 254 - threshold);
            match (direct, mirror) {
                (Ok(a), Ok(b)) => prop_assert!((b - 1.0 / a).abs() < 1e-12),
                // One-class regions must degenerate on both sides, with
                // the class label flipped.
                (Err(BarcodeError::AllOneClass { class: ca, .. }),
                 Err(BarcodeError::AllOneClass { class: cb, .. })) => {
                    prop_assert_ne!(ca, cb);
                }
                (a, b) => prop_assert!(false, "mismatched outcomes {a:?} vs {b:?}"),
            }
        }

        #[test]
        fn widening_the_interval_never_unaccepts(
            ratio in 0.0f64..4.0,
            lo in 0.0f64..2.0,
            span in 0.0f64..2.0,
            widen_lo in 0.0f64..1.0,
            widen_hi in 0.0f64..1.0,
        ) {
            let narrow = BarcodeConfig {
                accept_lo: lo,
                accept_hi: lo + span,
                ..BarcodeConfig::default()
            };
            let wide = BarcodeConfig {
                accept_lo: (lo - widen_lo).max(0.0),
                accept_hi: lo + span + widen_hi,
                ..BarcodeConfig::default()
            };
            if narrow.accepts(ratio) {
                prop_assert!(wide.accepts(ratio));
            }
        }
    }

    #[test]
    fn locate_finds_a_pasted_bar_pattern() {
        let mut img = GrayImage::filled(200, 200, 120);
        let (r0, r1, c0, c1) = paste_bars(&mut img, 60, 22, 20, 4, 4, 60, 30, 240);
        let truth = Region::axis_rect(
            [(r0 + r1) as f64 / 2.0, (c0 + c1) as f64 / 2.0],
            [(r1 - r0) as f64 / 2.0, (c1 - c0) as f64 / 2.0],
        )
        .unwrap();

        let cfg = BarcodeConfig::default();
        let candidates = locate_barcode(&img, &cfg);
        let accepted: Vec<&BarcodeCandidate> =
            candidates.iter().filter(|c| c.accepted).collect();
        assert_eq!(accepted.len(), 1, "candidates: {candidates:?}");
        let hit = accepted[0];
        let overlap = iou(&hit.region, &truth, 200, 200);
        assert!(overlap >= 0.8, "IoU {overlap}");
        assert!(hit.bw_ratio >= 0.7 && hit.bw_ratio <= 1.5);

        // Purity: a second run reproduces the list exactly.
        assert_eq!(locate_barcode(&img, &cfg), candidates);
    }

    #[test]
    fn blank_boards_yield_no_candidates() {
        let img = GrayImage::filled(128, 128, 120);
        assert!(locate_barcode(&img, &BarcodeConfig::default()).is_empty());
    }

    #[test]
    fn solid_blocks_are_not_accepted() {
        let mut img = GrayImage::filled(160, 160, 120);
        for r in 40..100 {
            for c in 30..130 {
                img.set(r, c, 10);
            }
        }
        let candidates = locate_barcode(&img, &BarcodeConfig::default());
        assert!(
            candidates.iter().all(|c| !c.accepted),
            "solid block accepted: {candidates:?}"
        );
        // The ratio rule itself rejects the block: measured with a margin
        // of board around it, nearly everything is black.
        let with_margin = Region::axis_rect([69.5, 79.5], [34.5, 54.5]).unwrap();
        let ratio = bw_area_ratio(&img, &with_margin, 64).unwrap();
        assert!(ratio < 0.7, "ratio {ratio}");
        assert!(!BarcodeConfig::default().accepts(ratio));
    }

    #[test]
    fn candidates_round_trip_through_jsonl() {
        let candidates = vec![
            BarcodeCandidate {
                region: Region::axis_rect([89.5, 100.0], [30.0, 77.5]).unwrap(),
                bw_ratio: 1.0625,
                accepted: true,
            },
            BarcodeCandidate {
                region: Region::axis_rect([10.0, 12.0], [4.0, 6.0]).unwrap(),
                bw_ratio: 0.25,
                accepted: false,
            },
        ];
        let text = candidates_jsonl(&candidates);
        assert_eq!(text.lines().count(), 2);
        for line in text.lines() {
            let value: serde_json::Value = serde_json::from_str(line).unwrap();
            let obj = value.as_object().unwrap();
            assert!(obj.contains_key("region"));
            assert!(obj.contains_key("bw_ratio"));
            assert!(obj.contains_key("accepted"));
        }
        assert_eq!(parse_candidates_jsonl(&text).unwrap(), candidates);
        assert_eq!(candidates_jsonl(&[]), "");
        assert_eq!(parse_candidates_jsonl("").unwrap(), Vec::new());
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let ok = BarcodeConfig::default();
        assert!(ok.validate().is_ok());
        for (cfg, what) in [
            (
                BarcodeConfig {
                    accept_lo: -0.1,
                    ..ok
                },
                "negative lo",
            ),
            (
                BarcodeConfig {
                    accept_hi: 0.5,
                    ..ok
                },
                "hi below lo",
            ),
            (
                BarcodeConfig {
                    max_angle_spread_deg: 0.0,
                    ..ok
                },
                "zero spread",
            ),
            (
                BarcodeConfig {
                    vertical_tol_deg: 91.0,
                    ..ok
                },
                "tolerance beyond 90",
            ),
            (BarcodeConfig { min_chains: 1, ..ok }, "one chain"),
            (
                BarcodeConfig {
                    min_chain_len: 1,
                    ..ok
                },
                "one pixel chain",
            ),
        ] {
            assert!(
                matches!(cfg.validate(), Err(BarcodeError::BadConfig(_))),
                "{what} should fail validation"
            );
        }
    }

    #[test]
    fn angle_folding_helpers_behave() {
        use crate::linefit::Line2D;
        // A vertical line x = 3: normal (1, 0), orientation 90 degrees.
        let vertical = Line2D::new(1.0, 0.0, -3.0).unwrap();
        assert!((line_angle_deg(&vertical) - 90.0).abs() < 1e-12);
        // A horizontal line y = 2: orientation 0 (folded from 180).
        let horizontal = Line2D::new(0.0, 1.0, -2.0).unwrap();
        assert!(line_angle_deg(&horizontal).abs() < 1e-12);
        assert!((angle_distance(179.0, 1.0) - 2.0).abs() < 1e-12);
        assert!((angle_distance(45.0, 50.0) - 5.0).abs() < 1e-12);
    }
}
