//! Edge extraction: Roberts cross differences, Sobel/Prewitt gradient
//! fields, non-maximum suppression, dual-threshold hysteresis, and the
//! composed Canny-style detector.
//!
//! Gradient results are computed for interior pixels only; the 1-pixel
//! border frame is zero-filled, since responses there would be padding
//! artifacts.

use std::collections::VecDeque;
use std::f64::consts::PI;

use thiserror::Error;

use crate::filters::{gaussian_filter, GaussianSpec};
use crate::imgcore::{FloatImage, GrayImage};

/// Errors raised by edge-extraction operations.
#[derive(Debug, Error, PartialEq)]
pub enum EdgeError {
    /// The operator needs a minimum image extent.
    #[error("image must be at least {need}x{need}, got {width}x{height}")]
    ImageTooSmall { need: u32, width: u32, height: u32 },
    /// Hysteresis thresholds must satisfy `0 <= t_low < t_high`.
    #[error("thresholds must satisfy 0 <= low < high, got low={t_low}, high={t_high}")]
    BadThresholds { t_low: f64, t_high: f64 },
    /// Gradient component planes disagree in shape.
    #[error("gx is {0}x{1} but gy is {2}x{3}")]
    ShapeMismatch(u32, u32, u32, u32),
}

/// The two supported 3x3 first-derivative operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientOperator {
    /// Center row/column weighted 2.
    Sobel,
    /// Uniform weights.
    Prewitt,
}

/// A computed gradient field: horizontal and vertical derivatives,
/// magnitude `sqrt(gx^2 + gy^2)`, and direction `atan2(gy, gx)` in
/// `(-pi, pi]`.
///
/// `gy` is positive for intensity increasing *upward* (toward smaller row
/// indices), matching the classic top-positive vertical kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub gx: FloatImage,
    pub gy: FloatImage,
    pub magnitude: FloatImage,
    pub direction: FloatImage,
}

impl GradientField {
    /// Assembles a field from derivative planes, deriving magnitude and
    /// direction. Fails when the planes disagree in shape.
    pub fn from_parts(gx: FloatImage, gy: FloatImage) -> Result<Self, EdgeError> {
        if gx.width() != gy.width() || gx.height() != gy.height() {
            return Err(EdgeError::ShapeMismatch(
                gx.width(),
                gx.height(),
                gy.width(),
                gy.height(),
            ));
        }
        let magnitude = FloatImage::from_fn(gx.width(), gx.height(), |r, c| {
            gx.at(r, c).hypot(gy.at(r, c))
        });
        let direction = FloatImage::from_fn(gx.width(), gx.height(), |r, c| {
            let theta = gy.at(r, c).atan2(gx.at(r, c));
            // atan2 ranges over [-pi, pi]; fold the closed lower end onto
            // +pi so the stored range is (-pi, pi].
            if theta <= -PI {
                PI
            } else {
                theta
            }
        });
        Ok(Self {
            gx,
            gy,
            magnitude,
            direction,
        })
    }
}

/// Roberts cross-difference edge strength:
/// `sqrt((f(m,n) - f(m+1,n+1))^2 + (f(m+1,n) - f(m,n+1))^2)`.
/// The last row and column, where the 2x2 window would leave the image,
/// are zero.
pub fn roberts(img: &GrayImage) -> Result<FloatImage, EdgeError> {
    if img.width() < 2 || img.height() < 2 {
        return Err(EdgeError::ImageTooSmall {
            need: 2,
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(FloatImage::from_fn(img.width(), img.height(), |r, c| {
        if r + 1 >= img.height() || c + 1 >= img.width() {
            return 0.0;
        }
        let d1 = img.at(r, c) as f64 - img.at(r + 1, c + 1) as f64;
        let d2 = img.at(r + 1, c) as f64 - img.at(r, c + 1) as f64;
        d1.hypot(d2)
    }))
}

/// Horizontal kernel: responds to intensity increasing to the right.
const KX_SOBEL: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
/// Vertical kernel: responds to intensity increasing upward.
const KY_SOBEL: [[f64; 3]; 3] = [[1.0, 2.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -2.0, -1.0]];
const KX_PREWITT: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0]];
const KY_PREWITT: [[f64; 3]; 3] = [[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -1.0, -1.0]];

/// Computes the gradient field with the selected 3x3 operator. Interior
/// pixels get true correlations; the 1-pixel frame is zero.
pub fn gradient(img: &GrayImage, operator: GradientOperator) -> Result<GradientField, EdgeError> {
    if img.width() < 3 || img.height() < 3 {
        return Err(EdgeError::ImageTooSmall {
            need: 3,
            width: img.width(),
            height: img.height(),
        });
    }
    let (kx, ky) = match operator {
        GradientOperator::Sobel => (&KX_SOBEL, &KY_SOBEL),
        GradientOperator::Prewitt => (&KX_PREWITT, &KY_PREWITT),
    };
    let correlate = |kernel: &[[f64; 3]; 3]| {
        FloatImage::from_fn(img.width(), img.height(), |r, c| {
            if r == 0 || c == 0 || r + 1 >= img.height() || c + 1 >= img.width() {
                return 0.0;
            }
            let mut acc = 0.0;
            for (dr, row) in kernel.iter().enumerate() {
                for (dc, &w) in row.iter().enumerate() {
                    if w != 0.0 {
                        acc += w * img.at(r + dr as u32 - 1, c + dc as u32 - 1) as f64;
                    }
                }
            }
            acc
        })
    };
    GradientField::from_parts(correlate(kx), correlate(ky))
}

/// Direction bins used by non-maximum suppression, named by the gradient
/// angle modulo 180°.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DirectionBin {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

fn quantize_direction(theta: f64) -> DirectionBin {
    // Fold the angle to [0, 180) degrees; opposite directions share a bin.
    let mut deg = theta.to_degrees();
    if deg < 0.0 {
        deg += 180.0;
    }
    if deg >= 180.0 {
        deg -= 180.0;
    }
    match deg {
        d if d < 22.5 => DirectionBin::Deg0,
        d if d < 67.5 => DirectionBin::Deg45,
        d if d < 112.5 => DirectionBin::Deg90,
        d if d < 157.5 => DirectionBin::Deg135,
        _ => DirectionBin::Deg0,
    }
}

/// The two `(row, col)` neighbor offsets along the quantized gradient
/// direction. `gy` is top-positive, so in `(row, col)` coordinates the
/// gradient vector is `(-gy, gx)`: a 45° gradient steps up-right and
/// down-left, a 135° gradient up-left and down-right.
fn bin_offsets(bin: DirectionBin) -> [(i64, i64); 2] {
    match bin {
        DirectionBin::Deg0 => [(0, -1), (0, 1)],
        DirectionBin::Deg45 => [(-1, 1), (1, -1)],
        DirectionBin::Deg90 => [(-1, 0), (1, 0)],
        DirectionBin::Deg135 => [(-1, -1), (1, 1)],
    }
}

/// Non-maximum suppression: a pixel survives (keeping its magnitude) iff
/// its magnitude is `>=` both neighbors along the quantized gradient
/// direction; otherwise it becomes 0. Ties keep the pixel, so flat ridges
/// are not doubly deleted. Neighbors outside the image count as 0.
pub fn nms(field: &GradientField) -> FloatImage {
    FloatImage::from_fn(field.magnitude.width(), field.magnitude.height(), |r, c| {
        let m = field.magnitude.at(r, c);
        if m == 0.0 {
            return 0.0;
        }
        let bin = quantize_direction(field.direction.at(r, c));
        for (dr, dc) in bin_offsets(bin) {
            if field.magnitude.at_or_zero(r as i64 + dr, c as i64 + dc) > m {
                return 0.0;
            }
        }
        m
    })
}

/// Validated dual thresholds for hysteresis: `0 <= t_low < t_high`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HysteresisThresholds {
    t_low: f64,
    t_high: f64,
}

impl HysteresisThresholds {
    pub fn new(t_low: f64, t_high: f64) -> Result<Self, EdgeError> {
        if !(t_low.is_finite() && t_high.is_finite()) || t_low < 0.0 || t_low >= t_high {
            return Err(EdgeError::BadThresholds { t_low, t_high });
        }
        Ok(Self { t_low, t_high })
    }

    pub fn low(&self) -> f64 {
        self.t_low
    }

    pub fn high(&self) -> f64 {
        self.t_high
    }
}

/// Dual-threshold edge tracking: pixels above `t_high` are strong seeds;
/// pixels in `(t_low, t_high]` survive iff they connect (transitively,
/// 8-connected) to a seed; everything at or below `t_low` is discarded.
/// Output samples are exactly 0 or 255.
pub fn hysteresis(nms_img: &FloatImage, th: HysteresisThresholds) -> GrayImage {
    let width = nms_img.width();
    let height = nms_img.height();
    let mut out = GrayImage::filled(width, height, 0);
    let mut queue = VecDeque::new();
    for r in 0..height {
        for c in 0..width {
            if nms_img.at(r, c) > th.t_high {
                out.set(r, c, 255);
                queue.push_back((r, c));
            }
        }
    }
    // Grow each seed into the weak band.
    while let Some((r, c)) = queue.pop_front() {
        for dr in -1..=1i64 {
            for dc in -1..=1i64 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if nr < 0 || nc < 0 || nr >= height as i64 || nc >= width as i64 {
                    continue;
                }
                let (nr, nc) = (nr as u32, nc as u32);
                if out.at(nr, nc) == 0 && nms_img.at(nr, nc) > th.t_low {
                    out.set(nr, nc, 255);
                    queue.push_back((nr, nc));
                }
            }
        }
    }
    out
}

/// The composed detector: Gaussian smoothing, Sobel gradient, non-maximum
/// suppression, dual-threshold hysteresis.
pub fn canny(
    img: &GrayImage,
    spec: GaussianSpec,
    th: HysteresisThresholds,
) -> Result<GrayImage, EdgeError> {
    let smoothed = gaussian_filter(img, spec);
    let field = gradient(&smoothed, GradientOperator::Sobel)?;
    let suppressed = nms(&field);
    Ok(hysteresis(&suppressed, th))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn thresholds(low: f64, high: f64) -> HysteresisThresholds {
        HysteresisThresholds::new(low, high).unwrap()
    }

    #[test]
    fn roberts_of_constant_image_is_zero() {
        let img = GrayImage::filled(6, 6, 180);
        let out = roberts(&img).unwrap();
        assert!(out.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn roberts_at_vertical_step_is_sqrt_two_times_height() {
        let img = GrayImage::from_fn(8, 8, |_, c| if c < 4 { 0 } else { 255 });
        let out = roberts(&img).unwrap();
        let expected = (2.0f64).sqrt() * 255.0; // ≈ 360.62
        for r in 0..7u32 {
            assert!((out.at(r, 3) - expected).abs() < 1e-9, "row {r}");
            assert_eq!(out.at(r, 2), 0.0);
            assert_eq!(out.at(r, 4), 0.0);
        }
        // Zero-filled last row and column.
        for c in 0..8u32 {
            assert_eq!(out.at(7, c), 0.0);
        }
        for r in 0..8u32 {
            assert_eq!(out.at(r, 7), 0.0);
        }
    }

    #[test]
    fn roberts_matches_window_oracle() {
        let mut rng = StdRng::seed_from_u64(131);
        let img = GrayImage::from_fn(8, 8, |_, _| rng.random());
        let out = roberts(&img).unwrap();
        for r in 0..7u32 {
            for c in 0..7u32 {
                let d1 = img.at(r, c) as f64 - img.at(r + 1, c + 1) as f64;
                let d2 = img.at(r + 1, c) as f64 - img.at(r, c + 1) as f64;
                let expected = (d1 * d1 + d2 * d2).sqrt();
                assert!((out.at(r, c) - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn roberts_rejects_tiny_images() {
        let img = GrayImage::filled(1, 5, 0);
        assert!(matches!(
            roberts(&img),
            Err(EdgeError::ImageTooSmall { need: 2, .. })
        ));
    }

    #[test]
    fn gradient_of_constant_image_is_zero_field() {
        let img = GrayImage::filled(5, 5, 99);
        for op in [GradientOperator::Sobel, GradientOperator::Prewitt] {
            let field = gradient(&img, op).unwrap();
            assert!(field.gx.samples().iter().all(|&v| v == 0.0));
            assert!(field.gy.samples().iter().all(|&v| v == 0.0));
            assert!(field.magnitude.samples().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn gradient_of_column_ramp_matches_analytic_correlation() {
        // f(r, c) = 10 c. Correlating the horizontal kernel sums its +1
        // column against f(c+1) and its -1 column against f(c-1), so
        // gx = (1 + 2 + 1) * (f(c+1) - f(c-1)) = 4 * 20 = 80 for Sobel and
        // 3 * 20 = 60 for Prewitt; gy = 0 and the direction is 0.
        let img = GrayImage::from_fn(10, 6, |_, c| (c * 10) as u8);
        for (op, expected_gx) in [
            (GradientOperator::Sobel, 80.0),
            (GradientOperator::Prewitt, 60.0),
        ] {
            let field = gradient(&img, op).unwrap();
            for r in 1..5u32 {
                for c in 1..9u32 {
                    assert_eq!(field.gx.at(r, c), expected_gx, "{op:?} at ({r},{c})");
                    assert_eq!(field.gy.at(r, c), 0.0);
                    assert_eq!(field.direction.at(r, c), 0.0);
                }
            }
        }
    }

    #[test]
    fn gradient_gy_is_top_positive() {
        // Intensity increasing upward (smaller rows brighter) → gy > 0.
        let img = GrayImage::from_fn(6, 10, |r, _| (200 - r * 10) as u8);
        let field = gradient(&img, GradientOperator::Sobel).unwrap();
        for r in 1..9u32 {
            for c in 1..5u32 {
                assert_eq!(field.gy.at(r, c), 80.0);
                assert_eq!(field.gx.at(r, c), 0.0);
            }
        }
    }

    #[test]
    fn rotating_image_by_90_degrees_swaps_gradient_components() {
        let mut rng = StdRng::seed_from_u64(137);
        let img = GrayImage::from_fn(9, 7, |_, _| rng.random());
        // Clockwise rotation: out(r, c) = in(H-1-c, r), out is W x H.
        let rot = GrayImage::from_fn(7, 9, |r, c| img.at(img.height() - 1 - c, r));
        let f = gradient(&img, GradientOperator::Sobel).unwrap();
        let g = gradient(&rot, GradientOperator::Sobel).unwrap();
        for r in 1..img.height() - 1 {
            for c in 1..img.width() - 1 {
                // The pixel (r, c) lands at (c, H-1-r) in the rotated frame;
                // the old row axis becomes the new column axis.
                let (rr, rc) = (c, img.height() - 1 - r);
                assert!(
                    (f.gy.at(r, c).abs() - g.gx.at(rr, rc).abs()).abs() < 1e-9,
                    "|gy| -> |gx| at ({r},{c})"
                );
                assert!(
                    (f.gx.at(r, c).abs() - g.gy.at(rr, rc).abs()).abs() < 1e-9,
                    "|gx| -> |gy| at ({r},{c})"
                );
                assert!(
                    (f.magnitude.at(r, c) - g.magnitude.at(rr, rc)).abs() < 1e-9,
                    "magnitude preserved at ({r},{c})"
                );
            }
        }
    }

    #[test]
    fn gradient_is_invariant_under_intensity_offset() {
        let mut rng = StdRng::seed_from_u64(139);
        let img = GrayImage::from_fn(8, 8, |_, _| rng.random_range(0..200));
        let shifted = GrayImage::from_fn(8, 8, |r, c| img.at(r, c) + 30);
        let a = gradient(&img, GradientOperator::Sobel).unwrap();
        let b = gradient(&shifted, GradientOperator::Sobel).unwrap();
        assert_eq!(a.gx, b.gx);
        assert_eq!(a.gy, b.gy);
    }

    #[test]
    fn magnitude_and_direction_satisfy_their_definitions() {
        let mut rng = StdRng::seed_from_u64(149);
        let img = GrayImage::from_fn(10, 10, |_, _| rng.random());
        let field = gradient(&img, GradientOperator::Prewitt).unwrap();
        for r in 0..10u32 {
            for c in 0..10u32 {
                let gx = field.gx.at(r, c);
                let gy = field.gy.at(r, c);
                let m = field.magnitude.at(r, c);
                assert!((m - (gx * gx + gy * gy).sqrt()).abs() < 1e-9);
                let theta = field.direction.at(r, c);
                assert!(theta > -std::f64::consts::PI && theta <= std::f64::consts::PI);
            }
        }
    }

    #[test]
    fn gradient_rejects_tiny_images() {
        let img = GrayImage::filled(2, 8, 0);
        assert!(matches!(
            gradient(&img, GradientOperator::Sobel),
            Err(EdgeError::ImageTooSmall { need: 3, .. })
        ));
    }

    /// Builds a field with a given magnitude layout and uniform direction.
    fn synthetic_field(mags: &[&[f64]], theta: f64) -> GradientField {
        let h = mags.len() as u32;
        let w = mags[0].len() as u32;
        let gx = FloatImage::from_fn(w, h, |r, c| mags[r as usize][c as usize] * theta.cos());
        let gy = FloatImage::from_fn(w, h, |r, c| mags[r as usize][c as usize] * theta.sin());
        GradientField::from_parts(gx, gy).unwrap()
    }

    #[test]
    fn nms_preserves_a_one_pixel_ridge() {
        // Vertical edge: horizontal gradient (0°), ridge along a column.
        let field = synthetic_field(
            &[
                &[1.0, 9.0, 1.0],
                &[1.0, 9.0, 1.0],
                &[1.0, 9.0, 1.0],
            ],
            0.0,
        );
        let out = nms(&field);
        for r in 0..3u32 {
            assert_eq!(out.at(r, 1), 9.0);
            assert_eq!(out.at(r, 0), 0.0);
            assert_eq!(out.at(r, 2), 0.0);
        }
    }

    #[test]
    fn nms_keeps_plateaus_under_tie_rule() {
        let field = synthetic_field(&[&[5.0; 4], &[5.0; 4], &[5.0; 4]], 0.0);
        let out = nms(&field);
        assert!(out.samples().iter().all(|&v| v == 5.0));
    }

    #[test]
    fn nms_diagonal_bins_compare_the_correct_neighbors() {
        use std::f64::consts::FRAC_PI_4;
        // 45° gradient: neighbors are up-right and down-left. A larger
        // magnitude up-right suppresses the center...
        let field = synthetic_field(
            &[
                &[0.0, 0.0, 7.0],
                &[0.0, 5.0, 0.0],
                &[0.0, 0.0, 0.0],
            ],
            FRAC_PI_4,
        );
        assert_eq!(nms(&field).at(1, 1), 0.0);
        // ...while the same magnitude down-right (a 135° neighbor) does not.
        let field = synthetic_field(
            &[
                &[0.0, 0.0, 0.0],
                &[0.0, 5.0, 0.0],
                &[0.0, 0.0, 7.0],
            ],
            FRAC_PI_4,
        );
        assert_eq!(nms(&field).at(1, 1), 5.0);
        // 135° gradient: neighbors are up-left and down-right.
        let field = synthetic_field(
            &[
                &[0.0, 0.0, 0.0],
                &[0.0, 5.0, 0.0],
                &[0.0, 0.0, 7.0],
            ],
            3.0 * FRAC_PI_4,
        );
        assert_eq!(nms(&field).at(1, 1), 0.0);
        let field = synthetic_field(
            &[
                &[0.0, 0.0, 7.0],
                &[0.0, 5.0, 0.0],
                &[0.0, 0.0, 0.0],
            ],
            3.0 * FRAC_PI_4,
        );
        assert_eq!(nms(&field).at(1, 1), 5.0);
    }

    #[test]
    fn nms_thins_a_blurred_step_to_one_pixel() {
        // Horizontal blur profile across a vertical step, steepest at c=3.
        // (An exactly symmetric profile would tie two columns, and the tie
        // rule would rightly keep both.)
        let profile = [0u8, 0, 30, 100, 180, 240, 255, 255];
        let img = GrayImage::from_fn(8, 6, |_, c| profile[c as usize]);
        let field = gradient(&img, GradientOperator::Sobel).unwrap();
        let out = nms(&field);
        for r in 1..5u32 {
            let nonzero: Vec<u32> = (1..7u32).filter(|&c| out.at(r, c) > 0.0).collect();
            assert_eq!(nonzero, vec![3], "row {r}");
        }
    }

    #[test]
    fn nms_output_is_pointwise_subset_of_magnitude() {
        let mut rng = StdRng::seed_from_u64(151);
        for _ in 0..20 {
            let img = GrayImage::from_fn(12, 12, |_, _| rng.random());
            let field = gradient(&img, GradientOperator::Sobel).unwrap();
            let out = nms(&field);
            for r in 0..12u32 {
                for c in 0..12u32 {
                    let n = out.at(r, c);
                    let m = field.magnitude.at(r, c);
                    assert!(n == 0.0 || n == m, "N must be 0 or M, got {n} vs {m}");
                }
            }
        }
    }

    #[test]
    fn hysteresis_keeps_everything_above_high() {
        let img = FloatImage::filled(4, 4, 50.0);
        let out = hysteresis(&img, thresholds(10.0, 30.0));
        assert!(out.samples().iter().all(|&v| v == 255));
    }

    #[test]
    fn hysteresis_discards_isolated_weak_pixels() {
        let mut img = FloatImage::filled(5, 5, 0.0);
        img.set(2, 2, 20.0); // between thresholds, no strong support
        let out = hysteresis(&img, thresholds(10.0, 30.0));
        assert!(out.samples().iter().all(|&v| v == 0));
    }

    #[test]
    fn hysteresis_follows_weak_chains_from_strong_seeds() {
        let mut img = FloatImage::filled(7, 7, 0.0);
        img.set(3, 1, 40.0); // strong
        img.set(3, 2, 20.0); // weak, adjacent to strong
        img.set(2, 3, 15.0); // weak, diagonal to previous weak
        img.set(2, 5, 20.0); // weak, separated from the chain
        let out = hysteresis(&img, thresholds(10.0, 30.0));
        assert_eq!(out.at(3, 1), 255);
        assert_eq!(out.at(3, 2), 255);
        assert_eq!(out.at(2, 3), 255, "transitive connectivity");
        assert_eq!(out.at(2, 5), 0, "disconnected weak pixel dropped");
    }

    #[test]
    fn hysteresis_boundary_values_follow_strict_rules() {
        // Exactly t_high is weak, not strong; exactly t_low is discarded.
        let mut img = FloatImage::filled(3, 3, 0.0);
        img.set(1, 1, 30.0);
        assert!(hysteresis(&img, thresholds(10.0, 30.0))
            .samples()
            .iter()
            .all(|&v| v == 0));
        let mut img = FloatImage::filled(3, 3, 0.0);
        img.set(1, 1, 40.0);
        img.set(1, 2, 10.0);
        let out = hysteresis(&img, thresholds(10.0, 30.0));
        assert_eq!(out.at(1, 1), 255);
        assert_eq!(out.at(1, 2), 0, "== t_low is discarded");
    }

    #[test]
    fn hysteresis_components_always_contain_a_seed() {
        let mut rng = StdRng::seed_from_u64(157);
        let th = thresholds(15.0, 45.0);
        for _ in 0..20 {
            let img = FloatImage::from_fn(10, 10, |_, _| rng.random_range(0.0..60.0));
            let out = hysteresis(&img, th);
            // Flood-fill oracle over output pixels; every component must
            // contain at least one pixel above t_high.
            let mut seen = [false; 100];
            for r in 0..10u32 {
                for c in 0..10u32 {
                    let idx = (r * 10 + c) as usize;
                    if out.at(r, c) == 0 || seen[idx] {
                        continue;
                    }
                    let mut component = vec![(r, c)];
                    let mut stack = vec![(r, c)];
                    seen[idx] = true;
                    while let Some((pr, pc)) = stack.pop() {
                        for dr in -1..=1i64 {
                            for dc in -1..=1i64 {
                                let (nr, nc) = (pr as i64 + dr, pc as i64 + dc);
                                if nr < 0 || nc < 0 || nr >= 10 || nc >= 10 {
                                    continue;
                                }
                                let nidx = (nr * 10 + nc) as usize;
                                if !seen[nidx] && out.at(nr as u32, nc as u32) != 0 {
                                    seen[nidx] = true;
                                    component.push((nr as u32, nc as u32));
                                    stack.push((nr as u32, nc as u32));
                                }
                            }
                        }
                    }
                    assert!(
                        component.iter().any(|&(pr, pc)| img.at(pr, pc) > th.high()),
                        "component without a strong seed"
                    );
                    for &(pr, pc) in &component {
                        assert!(img.at(pr, pc) > th.low(), "output leaked below t_low");
                    }
                }
            }
        }
    }

    #[test]
    fn threshold_validation_rejects_bad_pairs() {
        assert!(HysteresisThresholds::new(10.0, 10.0).is_err());
        assert!(HysteresisThresholds::new(-1.0, 10.0).is_err());
        assert!(HysteresisThresholds::new(f64::NAN, 10.0).is_err());
        assert!(HysteresisThresholds::new(5.0, f64::INFINITY).is_err());
    }

    #[test]
    fn canny_of_constant_image_is_empty() {
        let img = GrayImage::filled(32, 32, 77);
        let out = canny(&img, GaussianSpec::default(), thresholds(40.0, 90.0)).unwrap();
        assert!(out.samples().iter().all(|&v| v == 0));
    }

    #[test]
    fn canny_traces_a_square_boundary() {
        let img = GrayImage::from_fn(64, 64, |r, c| {
            if (16..48).contains(&r) && (16..48).contains(&c) {
                255
            } else {
                0
            }
        });
        let out = canny(&img, GaussianSpec::default(), thresholds(40.0, 90.0)).unwrap();

        // Ground truth: the outermost white pixels of the square.
        let boundary: Vec<(u32, u32)> = (0..64u32)
            .flat_map(|r| (0..64u32).map(move |c| (r, c)))
            .filter(|&(r, c)| {
                let inside = (16..48).contains(&r) && (16..48).contains(&c);
                let edge_ring = r == 16 || r == 47 || c == 16 || c == 47;
                inside && edge_ring
            })
            .collect();

        // Recall: each boundary pixel must have an edge pixel within 1.
        let hits = boundary
            .iter()
            .filter(|&&(r, c)| {
                (-1..=1i64).any(|dr| {
                    (-1..=1i64).any(|dc| {
                        let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                        (0..64).contains(&nr)
                            && (0..64).contains(&nc)
                            && out.at(nr as u32, nc as u32) == 255
                    })
                })
            })
            .count();
        let recall = hits as f64 / boundary.len() as f64;
        assert!(recall >= 0.95, "boundary recall {recall} below 0.95");

        // Every edge pixel sits within 1 pixel of the true boundary.
        for r in 0..64u32 {
            for c in 0..64u32 {
                if out.at(r, c) == 255 {
                    let near = boundary.iter().any(|&(br, bc)| {
                        (br as i64 - r as i64).abs() <= 1 && (bc as i64 - c as i64).abs() <= 1
                    });
                    assert!(near, "spurious edge pixel at ({r},{c})");
                }
            }
        }

        // Closedness: 4-connected background flood from a corner must not
        // reach the square center through the 8-connected contour.
        let mut visited = vec![false; 64 * 64];
        let mut stack = vec![(0u32, 0u32)];
        visited[0] = true;
        while let Some((r, c)) = stack.pop() {
            for (dr, dc) in [(0i64, 1i64), (0, -1), (1, 0), (-1, 0)] {
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if !(0..64).contains(&nr) || !(0..64).contains(&nc) {
                    continue;
                }
                let idx = (nr * 64 + nc) as usize;
                if !visited[idx] && out.at(nr as u32, nc as u32) == 0 {
                    visited[idx] = true;
                    stack.push((nr as u32, nc as u32));
                }
            }
        }
        assert!(
            !visited[(32 * 64 + 32) as usize],
            "contour is not closed: flood reached the center"
        );
    }

    #[test]
    fn canny_is_stable_under_mild_noise() {
        // A square with a one-pixel transition ring: the gradient then
        // peaks decisively on the ring pixels, so the edge positions are
        // determined by geometry rather than by which side of a perfectly
        // symmetric step wins a near-tie.
        let clean = GrayImage::from_fn(64, 64, |r, c| {
            let inside = (17..47).contains(&r) && (17..47).contains(&c);
            let ring = !inside && (16..48).contains(&r) && (16..48).contains(&c);
            if inside {
                220
            } else if ring {
                125
            } else {
                30
            }
        });
        let mut rng = StdRng::seed_from_u64(163);
        let noisy = GrayImage::from_fn(64, 64, |r, c| {
            let n: f64 = rng.sample(rand_distr::StandardNormal);
            crate::imgcore::quantize(clean.at(r, c) as f64 + 5.0 * n)
        });
        let th = thresholds(40.0, 90.0);
        let a = canny(&clean, GaussianSpec::default(), th).unwrap();
        let b = canny(&noisy, GaussianSpec::default(), th).unwrap();
        let edge_count = a.samples().iter().filter(|&&v| v == 255).count();
        let changed = a
            .samples()
            .iter()
            .zip(b.samples())
            .filter(|(x, y)| x != y)
            .count();
        assert!(edge_count > 0);
        assert!(
            (changed as f64) < 0.05 * edge_count as f64,
            "{changed} changed pixels vs {edge_count} edge pixels"
        );
    }

    #[test]
    fn canny_propagates_size_errors() {
        let img = GrayImage::filled(2, 2, 0);
        assert!(matches!(
            canny(&img, GaussianSpec::default(), thresholds(10.0, 20.0)),
            Err(EdgeError::ImageTooSmall { .. })
        ));
    }
}

