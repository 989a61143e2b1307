//! Deterministic synthetic board generator: defect-free boards, seeded
//! defect boards (scratch, solder bridge, missing label), boards with an
//! off-color component zone, and Gaussian pixel noise for robustness
//! experiments.
//!
//! Every board is drawn from a counter-based random stream keyed by the
//! seed and kind, so the same `(kind, seed)` pair is byte-identical
//! forever. Per-board variation (a small global tint and a component-zone
//! brightness jitter) is chosen so that the central traced area differs
//! between defect-free boards only by a uniform brightness offset — which
//! leaves edge maps and correlation scores against a reference board
//! untouched, the way separately imaged copies of one board behave.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::imgcore::{quantize, Region, RgbImage};

/// Side length of every generated board frame.
pub const BOARD_SIDE: u32 = 512;

const SUBSTRATE: [u8; 3] = [30, 110, 55];
const ROI_FILL: [u8; 3] = [205, 210, 200];
const ROI_FILL_DARK: [u8; 3] = [95, 100, 92];
const TRACE: [u8; 3] = [190, 160, 70];
const PAD: [u8; 3] = [225, 225, 215];
const LABEL: [u8; 3] = [240, 240, 240];
const BAR: [u8; 3] = [20, 20, 20];
const SCRATCH: [u8; 3] = [12, 12, 12];
const BRIDGE: [u8; 3] = [230, 230, 230];

/// Which population a generated board is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoardKind {
    /// Fully assembled, defect-free.
    Standard,
    /// Carries one seeded surface defect.
    Defect,
    /// One component zone is rendered much darker than specified.
    ColorDiff,
}

impl fmt::Display for BoardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoardKind::Standard => "standard",
            BoardKind::Defect => "defect",
            BoardKind::ColorDiff => "color_diff",
        })
    }
}

impl FromStr for BoardKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(BoardKind::Standard),
            "defect" => Ok(BoardKind::Defect),
            "color_diff" => Ok(BoardKind::ColorDiff),
            other => Err(format!(
                "unknown board kind {other:?} (expected standard, defect, or color_diff)"
            )),
        }
    }
}

/// The specific flaw a defect board carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    /// A dark near-vertical gouge across the traced area.
    Scratch,
    /// A bright solder blob bridging two adjacent traces.
    Bridge,
    /// The barcode label was never printed.
    MissingBarcode,
}

impl fmt::Display for DefectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DefectKind::Scratch => "scratch",
            DefectKind::Bridge => "bridge",
            DefectKind::MissingBarcode => "missing_barcode",
        })
    }
}

/// What a generated board actually is, for scoring verdicts against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub kind: BoardKind,
    pub defect: Option<DefectKind>,
}

impl GroundTruth {
    /// Whether a correct inspection should pass this board.
    pub fn expect_qualified(&self) -> bool {
        matches!(self.kind, BoardKind::Standard)
    }
}

/// Where the generator places each inspectable structure; the default
/// pipeline configuration points its zones here.
#[derive(Debug, Clone, PartialEq)]
pub struct BoardLayout {
    pub roi_0: Region,
    pub roi_1: Region,
    pub match_region: Region,
    pub edge_region: Region,
    pub barcode_region: Region,
}

/// The fixed board layout. Rectangles are given as center and half
/// extents in (row, col) order.
pub fn layout() -> BoardLayout {
    let rect = |center: [f64; 2], half: [f64; 2]| {
        Region::axis_rect(center, half).expect("layout constants are finite")
    };
    let traced = rect([300.0, 256.0], [60.0, 120.0]);
    BoardLayout {
        roi_0: rect([100.0, 128.0], [40.0, 80.0]),
        roi_1: rect([100.0, 384.0], [40.0, 80.0]),
        match_region: traced.clone(),
        edge_region: traced,
        barcode_region: rect([449.5, 139.5], [29.5, 77.5]),
    }
}

/// Shifts every channel by `delta`, clamping to the byte range.
fn shade(color: [u8; 3], delta: i32) -> [u8; 3] {
    color.map(|v| (v as i32 + delta).clamp(0, 255) as u8)
}

/// Fills an inclusive row/column rectangle, clamped to the image.
fn fill_rect(
    img: &mut RgbImage,
    rows: (u32, u32),
    cols: (u32, u32),
    color: [u8; 3],
) {
    let r1 = rows.1.min(img.height().saturating_sub(1));
    let c1 = cols.1.min(img.width().saturating_sub(1));
    for r in rows.0..=r1 {
        for c in cols.0..=c1 {
            img.set(r, c, color);
        }
    }
}

/// Fills a rectangle like [`fill_rect`] but first paints a one-pixel
/// frame around it in the mean of `color` and whatever lies beneath, the
/// way optics soften a physical edge. The softened profile peaks *on* a
/// pixel, so edge detection responds with a single-pixel ridge whether
/// or not the image is later degraded by noise.
fn fill_rect_soft(
    img: &mut RgbImage,
    rows: (u32, u32),
    cols: (u32, u32),
    color: [u8; 3],
) {
    let (r0, r1) = (rows.0.saturating_sub(1), rows.1 + 1);
    let (c0, c1) = (cols.0.saturating_sub(1), cols.1 + 1);
    let rim_r1 = r1.min(img.height().saturating_sub(1));
    let rim_c1 = c1.min(img.width().saturating_sub(1));
    for r in r0..=rim_r1 {
        for c in c0..=rim_c1 {
            let inside = (rows.0..=rows.1).contains(&r) && (cols.0..=cols.1).contains(&c);
            if !inside {
                let under = img.at(r, c);
                let blend = [0, 1, 2].map(|i| ((under[i] as u16 + color[i] as u16) / 2) as u8);
                img.set(r, c, blend);
            }
        }
    }
    fill_rect(img, rows, cols, color);
}

/// Renders one board and reports what it is.
///
/// The same `(kind, seed)` pair always produces the same bytes. Distinct
/// seeds vary a global tint (every drawn color shifted by the same small
/// amount) and the component-zone brightness, so defect-free boards stay
/// interchangeable for edge counting and template correlation.
pub fn generate_board(kind: BoardKind, seed: u64) -> (RgbImage, GroundTruth) {
    let salt = match kind {
        BoardKind::Standard => 0x9e37_79b9_7f4a_7c15,
        BoardKind::Defect => 0xd1b5_4a32_d192_ed03,
        BoardKind::ColorDiff => 0x2545_f491_4f6c_dd1d,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    let tint = rng.random_range(-2..=2);
    let zone_jitter: i32 = rng.random_range(-3..=3);
    let defect = match kind {
        BoardKind::Defect => Some(match rng.random_range(0..3u8) {
            0 => DefectKind::Scratch,
            1 => DefectKind::Bridge,
            _ => DefectKind::MissingBarcode,
        }),
        _ => None,
    };

    let mut img = RgbImage::filled(BOARD_SIDE, BOARD_SIDE, shade(SUBSTRATE, tint));

    // Component zones (the color-check targets).
    let zone_0 = shade(ROI_FILL, tint + zone_jitter);
    let zone_1 = match kind {
        BoardKind::ColorDiff => shade(ROI_FILL_DARK, tint + zone_jitter),
        _ => zone_0,
    };
    fill_rect(&mut img, (60, 140), (48, 208), zone_0);
    fill_rect(&mut img, (60, 140), (304, 464), zone_1);

    // Six horizontal traces with pads at both ends, all inside the traced
    // area the edge and template checks watch.
    for i in 0..6u32 {
        let top = 262 + 16 * i;
        fill_rect_soft(&mut img, (top, top + 3), (150, 361), shade(TRACE, tint));
        fill_rect_soft(&mut img, (top - 2, top + 5), (142, 149), shade(PAD, tint));
        fill_rect_soft(&mut img, (top - 2, top + 5), (362, 369), shade(PAD, tint));
    }

    // Barcode label: white backing with twenty 4-px bars on a 4-px pitch.
    if defect != Some(DefectKind::MissingBarcode) {
        fill_rect(&mut img, (416, 483), (58, 221), shade(LABEL, tint));
        for k in 0..20u32 {
            let left = 62 + 8 * k;
            fill_rect(&mut img, (420, 479), (left, left + 3), shade(BAR, tint));
        }
    }

    match defect {
        Some(DefectKind::Scratch) => {
            let top: u32 = 245 + rng.random_range(0..=10);
            let col: i64 = 160 + rng.random_range(0..=170);
            let drift: i64 = rng.random_range(-20..=20);
            for k in 0..=105u32 {
                let center = col + drift * k as i64 / 105;
                let left = (center - 3).clamp(140, 371) as u32;
                let right = (center + 4).clamp(140, 371) as u32;
                fill_rect(&mut img, (top + k, top + k), (left, right), shade(SCRATCH, tint));
            }
        }
        Some(DefectKind::Bridge) => {
            let top = 262 + 16 * rng.random_range(0..=4u32);
            let left = 160 + rng.random_range(0..=180u32);
            fill_rect(&mut img, (top, top + 19), (left, left + 19), shade(BRIDGE, tint));
        }
        Some(DefectKind::MissingBarcode) | None => {}
    }

    (img, GroundTruth { kind, defect })
}

/// The defect-free reference board (standard generator, seed 0) used to
/// derive matching templates and edge-count baselines.
pub fn golden_board() -> RgbImage {
    generate_board(BoardKind::Standard, 0).0
}

/// Adds independent Gaussian noise (standard deviation `sigma`) to every
/// channel of every pixel, rounding back to bytes. Deterministic in
/// `seed`; `sigma` must be finite and nonnegative (zero copies the
/// input).
pub fn add_gaussian_noise(img: &RgbImage, sigma: f64, seed: u64) -> RgbImage {
    assert!(
        sigma.is_finite() && sigma >= 0.0,
        "noise sigma must be finite and nonnegative, got {sigma}"
    );
    if sigma == 0.0 {
        return img.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RgbImage::from_fn(img.width(), img.height(), |r, c| {
        img.at(r, c).map(|v| {
            let n: f64 = rng.sample(rand_distr::StandardNormal);
            quantize(v as f64 + sigma * n)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorspace::pixel_to_hsv;

    fn value_255(px: [u8; 3]) -> f64 {
        pixel_to_hsv(px).2 * 255.0
    }

    #[test]
    fn same_kind_and_seed_is_byte_identical() {
        for kind in [BoardKind::Standard, BoardKind::Defect, BoardKind::ColorDiff] {
            let (a, ta) = generate_board(kind, 7);
            let (b, tb) = generate_board(kind, 7);
            assert_eq!(a.samples(), b.samples());
            assert_eq!(ta, tb);
        }
    }

    #[test]
    fn different_seeds_produce_different_boards() {
        let (base, _) = generate_board(BoardKind::Standard, 0);
        let changed = (1..=8u64)
            .any(|s| generate_board(BoardKind::Standard, s).0.samples() != base.samples());
        assert!(changed, "eight consecutive seeds all rendered identically");
    }

    #[test]
    fn standard_boards_match_the_reference_up_to_a_uniform_offset() {
        let golden = golden_board();
        for seed in [3u64, 11, 92] {
            let (board, _) = generate_board(BoardKind::Standard, seed);
            // Collect the per-pixel gray difference over the traced area;
            // interchangeability demands it be the same everywhere.
            let pixels = layout()
                .match_region
                .rasterize(BOARD_SIDE, BOARD_SIDE)
                .unwrap();
            let mut diffs: Vec<i32> = pixels
                .iter()
                .map(|&(r, c)| {
                    let a = board.at(r, c);
                    let b = golden.at(r, c);
                    a[0] as i32 - b[0] as i32
                })
                .collect();
            diffs.dedup();
            assert_eq!(diffs.len(), 1, "seed {seed} varies inside the traced area");
        }
    }

    #[test]
    fn standard_board_probes_hit_expected_structures() {
        let (img, truth) = generate_board(BoardKind::Standard, 5);
        assert_eq!(truth, GroundTruth { kind: BoardKind::Standard, defect: None });

        // Substrate corner, zone interiors, a trace, a pad, label, bar.
        let sub = img.at(10, 10);
        assert!(sub[1] > sub[0] && sub[1] > sub[2], "substrate should be green");
        let z0 = value_255(img.at(100, 128));
        let z1 = value_255(img.at(100, 384));
        assert!((205.0..=215.0).contains(&z0), "zone 0 value {z0}");
        assert_eq!(z0, z1);
        let trace = img.at(263, 250);
        assert!(trace[0] > 180 && trace[2] < 80, "trace color {trace:?}");
        let pad = img.at(263, 145);
        assert!(pad.iter().all(|&v| v > 200), "pad color {pad:?}");
        let label = img.at(417, 100);
        assert!(label.iter().all(|&v| v > 230), "label color {label:?}");
        let bar = img.at(450, 63);
        assert!(bar.iter().all(|&v| v < 30), "bar color {bar:?}");
        let space = img.at(450, 67);
        assert!(space.iter().all(|&v| v > 230), "space color {space:?}");
    }

    #[test]
    fn color_diff_darkens_only_the_second_zone() {
        let (img, truth) = generate_board(BoardKind::ColorDiff, 4);
        assert_eq!(truth.kind, BoardKind::ColorDiff);
        assert_eq!(truth.defect, None);
        assert!(!truth.expect_qualified());
        let z0 = value_255(img.at(100, 128));
        let z1 = value_255(img.at(100, 384));
        assert!((205.0..=215.0).contains(&z0), "zone 0 value {z0}");
        assert!((95.0..=105.0).contains(&z1), "zone 1 value {z1}");
    }

    #[test]
    fn barcode_area_splits_95_to_100_white_over_black() {
        let (img, _) = generate_board(BoardKind::Standard, 9);
        let pixels = layout()
            .barcode_region
            .rasterize(BOARD_SIDE, BOARD_SIDE)
            .unwrap();
        assert_eq!(pixels.len(), 60 * 156);
        let white = pixels
            .iter()
            .filter(|&&(r, c)| img.at(r, c)[0] > 128)
            .count();
        assert_eq!(white, 4560);
        assert_eq!(pixels.len() - white, 4800);
    }

    #[test]
    fn every_defect_kind_appears_and_marks_the_board() {
        let mut seen_scratch = false;
        let mut seen_bridge = false;
        let mut seen_missing = false;
        for seed in 0..40u64 {
            let (img, truth) = generate_board(BoardKind::Defect, seed);
            assert_eq!(truth.kind, BoardKind::Defect);
            assert!(!truth.expect_qualified());
            let pixels = layout()
                .match_region
                .rasterize(BOARD_SIDE, BOARD_SIDE)
                .unwrap();
            match truth.defect.expect("defect boards carry a defect") {
                DefectKind::Scratch => {
                    seen_scratch = true;
                    let dark = pixels
                        .iter()
                        .filter(|&&(r, c)| img.at(r, c).iter().all(|&v| v < 30))
                        .count();
                    assert!(dark >= 700, "scratch covers {dark} px");
                }
                DefectKind::Bridge => {
                    seen_bridge = true;
                    let bright = pixels
                        .iter()
                        .filter(|&&(r, c)| img.at(r, c).iter().all(|&v| v > 220))
                        .count();
                    assert!(bright >= 380, "bridge covers {bright} px");
                }
                DefectKind::MissingBarcode => {
                    seen_missing = true;
                    let label_px = img.at(450, 100);
                    assert_eq!(label_px, img.at(10, 10), "label area should be bare substrate");
                }
            }
        }
        assert!(seen_scratch && seen_bridge && seen_missing);
    }

    #[test]
    fn defect_overlays_stay_inside_the_traced_area() {
        let traced = layout()
            .match_region
            .rasterize(BOARD_SIDE, BOARD_SIDE)
            .unwrap();
        for seed in 0..30u64 {
            let (defective, truth) = generate_board(BoardKind::Defect, seed);
            if truth.defect == Some(DefectKind::MissingBarcode) {
                continue;
            }
            // Rebuild the matching defect-free board (same tint/jitter) by
            // probing which pixels differ; they must all be traced-area
            // pixels.
            let (clean, _) = generate_board(BoardKind::Standard, seed);
            let tint_delta =
                defective.at(0, 0)[0] as i32 - clean.at(0, 0)[0] as i32;
            for r in 0..BOARD_SIDE {
                for c in 0..BOARD_SIDE {
                    let d = defective.at(r, c);
                    let k = clean.at(r, c);
                    let shifted = [0, 1, 2]
                        .iter()
                        .all(|&ch| d[ch] as i32 - k[ch] as i32 == tint_delta);
                    if !shifted && !traced.contains(&(r, c)) {
                        // Zones may differ via jitter; ignore them.
                        let in_zone = (60..=140).contains(&r)
                            && ((48..=208).contains(&c) || (304..=464).contains(&c));
                        assert!(
                            in_zone,
                            "seed {seed}: unexpected extra difference at ({r}, {c})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn kind_and_defect_names_round_trip() {
        for kind in [BoardKind::Standard, BoardKind::Defect, BoardKind::ColorDiff] {
            assert_eq!(kind.to_string().parse::<BoardKind>(), Ok(kind));
        }
        assert!("pristine".parse::<BoardKind>().is_err());
        assert_eq!(DefectKind::MissingBarcode.to_string(), "missing_barcode");
        assert_eq!(
            serde_json::to_string(&GroundTruth {
                kind: BoardKind::Defect,
                defect: Some(DefectKind::Bridge)
            })
            .unwrap(),
            "{\"kind\":\"defect\",\"defect\":\"bridge\"}"
        );
    }

    #[test]
    fn noise_is_seeded_and_sized_like_its_sigma() {
        let (img, _) = generate_board(BoardKind::Standard, 2);
        assert_eq!(
            add_gaussian_noise(&img, 0.0, 1).samples(),
            img.samples()
        );
        let a = add_gaussian_noise(&img, 8.0, 33);
        let b = add_gaussian_noise(&img, 8.0, 33);
        assert_eq!(a.samples(), b.samples());
        let c = add_gaussian_noise(&img, 8.0, 34);
        assert_ne!(a.samples(), c.samples());

        // Mean absolute perturbation of N(0, 8) is 8*sqrt(2/pi) ~ 6.38;
        // clipping at the byte range only trims the tails.
        let total: f64 = a
            .samples()
            .iter()
            .zip(img.samples())
            .map(|(&x, &y)| (x as f64 - y as f64).abs())
            .sum();
        let mean = total / img.samples().len() as f64;
        assert!((5.5..=7.2).contains(&mean), "mean |noise| = {mean}");
    }

    #[test]
    #[should_panic(expected = "noise sigma")]
    fn noise_rejects_negative_sigma() {
        let (img, _) = generate_board(BoardKind::Standard, 0);
        let _ = add_gaussian_noise(&img, -1.0, 0);
    }
}
