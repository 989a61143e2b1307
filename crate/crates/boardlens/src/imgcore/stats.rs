//! First-order region statistics and gray-level histogram utilities.

use serde::{Deserialize, Serialize};

use super::raster::{FloatImage, GrayImage};
use super::region::{PixelSet, Region, RegionError};

/// Mean and population standard deviation of the gray levels inside a
/// region of `area` pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    pub mean: f64,
    /// Population deviation: the sum of squared deviations is divided by
    /// the full pixel count, not `count - 1`.
    pub deviation: f64,
    pub area: usize,
}

fn stats_from_samples(sum: f64, sum_sq_dev: f64, count: usize) -> RegionStats {
    let mean = sum / count as f64;
    // Guard tiny negative values produced by rounding before the sqrt.
    let variance = (sum_sq_dev / count as f64).max(0.0);
    RegionStats {
        mean,
        deviation: variance.sqrt(),
        area: count,
    }
}

fn two_pass_stats(values: impl Iterator<Item = f64> + Clone, count: usize) -> RegionStats {
    let sum: f64 = values.clone().sum();
    let mean = sum / count as f64;
    let sum_sq_dev: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    stats_from_samples(sum, sum_sq_dev, count)
}

/// Statistics of a gray image over an explicit pixel set.
///
/// Fails with [`RegionError::EmptyRegion`] when the set is empty. Pixels
/// outside the image bounds are a caller bug and panic.
pub fn pixel_stats(img: &GrayImage, pixels: &PixelSet) -> Result<RegionStats, RegionError> {
    if pixels.is_empty() {
        return Err(RegionError::EmptyRegion {
            width: img.width(),
            height: img.height(),
        });
    }
    let values = pixels.iter().map(|&(r, c)| img.at(r, c) as f64);
    Ok(two_pass_stats(values, pixels.len()))
}

/// Statistics of a float image over an explicit pixel set.
pub fn pixel_stats_f64(img: &FloatImage, pixels: &PixelSet) -> Result<RegionStats, RegionError> {
    if pixels.is_empty() {
        return Err(RegionError::EmptyRegion {
            width: img.width(),
            height: img.height(),
        });
    }
    let values = pixels.iter().map(|&(r, c)| img.at(r, c));
    Ok(two_pass_stats(values, pixels.len()))
}

/// Statistics of a gray image inside a [`Region`]: rasterizes the region
/// against the image bounds, then reduces the covered pixels.
pub fn region_stats(img: &GrayImage, region: &Region) -> Result<RegionStats, RegionError> {
    let pixels = region.rasterize(img.width(), img.height())?;
    pixel_stats(img, &pixels)
}

/// Statistics of a float image inside a [`Region`].
pub fn region_stats_f64(img: &FloatImage, region: &Region) -> Result<RegionStats, RegionError> {
    let pixels = region.rasterize(img.width(), img.height())?;
    pixel_stats_f64(img, &pixels)
}

/// Gray-level histogram of a whole image.
pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in img.samples() {
        hist[v as usize] += 1;
    }
    hist
}

/// Gray-level histogram restricted to an explicit pixel set.
pub fn histogram_of_pixels(img: &GrayImage, pixels: &PixelSet) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &(r, c) in pixels {
        hist[img.at(r, c) as usize] += 1;
    }
    hist
}

/// Between-class variance of the partition induced by `thresholds` on a
/// gray-level histogram.
///
/// Thresholds must be strictly increasing. A threshold `t` closes the
/// class at `t`: with thresholds `t1 < t2 < ...` the classes are
/// `[0, t1]`, `(t1, t2]`, ..., `(tk, 255]`. Empty classes contribute
/// nothing, and an empty histogram scores 0.
pub fn between_class_variance(hist: &[u64; 256], thresholds: &[u8]) -> f64 {
    debug_assert!(
        thresholds.windows(2).all(|w| w[0] < w[1]),
        "thresholds must be strictly increasing"
    );
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total_f = total as f64;
    let global_mean: f64 = hist
        .iter()
        .enumerate()
        .map(|(g, &n)| g as f64 * n as f64)
        .sum::<f64>()
        / total_f;

    let mut variance = 0.0;
    let mut class_lo = 0usize;
    let mut bounds: Vec<usize> = thresholds.iter().map(|&t| t as usize + 1).collect();
    bounds.push(256);
    for hi in bounds {
        let mut count = 0u64;
        let mut sum = 0.0;
        for (g, &n) in hist.iter().enumerate().take(hi).skip(class_lo) {
            count += n;
            sum += g as f64 * n as f64;
        }
        if count > 0 {
            let weight = count as f64 / total_f;
            let mean = sum / count as f64;
            variance += weight * (mean - global_mean) * (mean - global_mean);
        }
        class_lo = hi;
    }
    variance
}

/// Single Otsu threshold: the gray level maximizing the between-class
/// variance of a two-class split. Ties resolve to the lowest level. A
/// histogram with fewer than two occupied levels returns 0.
pub fn otsu_threshold(hist: &[u64; 256]) -> u8 {
    let occupied = hist.iter().filter(|&&n| n > 0).count();
    if occupied < 2 {
        return 0;
    }
    let mut best_t = 0u8;
    let mut best_v = f64::NEG_INFINITY;
    for t in 0..=254u8 {
        let v = between_class_variance(hist, &[t]);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    best_t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn full_region(width: u32, height: u32) -> Region {
        let hr = (height as f64 - 1.0) / 2.0;
        let hc = (width as f64 - 1.0) / 2.0;
        Region::axis_rect([hr, hc], [hr, hc]).unwrap()
    }

    #[test]
    fn constant_region_has_zero_deviation() {
        let img = GrayImage::filled(8, 8, 150);
        let region = Region::axis_rect([3.0, 3.0], [2.0, 2.0]).unwrap();
        let stats = region_stats(&img, &region).unwrap();
        assert_eq!(stats.mean, 150.0);
        assert_eq!(stats.deviation, 0.0);
        assert_eq!(stats.area, 25);
    }

    #[test]
    fn two_pixel_extremes_split_evenly() {
        // A 1x2 region over samples {0, 255}: mean and population
        // deviation are both 127.5.
        let mut img = GrayImage::filled(4, 4, 0);
        img.set(0, 1, 255);
        let region = Region::axis_rect([0.0, 0.5], [0.0, 0.5]).unwrap();
        let stats = region_stats(&img, &region).unwrap();
        assert_eq!(stats.area, 2);
        assert!((stats.mean - 127.5).abs() < 1e-12);
        assert!((stats.deviation - 127.5).abs() < 1e-12);
    }

    #[test]
    fn matches_naive_oracle_on_random_images() {
        let mut rng = StdRng::seed_from_u64(713);
        for _ in 0..100 {
            let img = GrayImage::from_fn(8, 8, |_, _| rng.random());
            let stats = region_stats(&img, &full_region(8, 8)).unwrap();

            // Naive oracle: accumulate in integers, then convert once.
            let n = 64u64;
            let sum: u64 = img.samples().iter().map(|&v| v as u64).sum();
            let mean = sum as f64 / n as f64;
            let var: f64 = img
                .samples()
                .iter()
                .map(|&v| (v as f64 - mean).powi(2))
                .sum::<f64>()
                / n as f64;

            assert_eq!(stats.area, 64);
            assert!((stats.mean - mean).abs() < 1e-9);
            assert!((stats.deviation - var.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn power_sum_identity_holds() {
        // deviation^2 + mean^2 == (1/F) * sum of squared gray levels.
        let mut rng = StdRng::seed_from_u64(42);
        let img = GrayImage::from_fn(16, 16, |_, _| rng.random());
        let stats = region_stats(&img, &full_region(16, 16)).unwrap();
        let mean_sq: f64 = img
            .samples()
            .iter()
            .map(|&v| (v as f64) * (v as f64))
            .sum::<f64>()
            / 256.0;
        let lhs = stats.deviation * stats.deviation + stats.mean * stats.mean;
        assert!((lhs - mean_sq).abs() < 1e-6, "identity violated: {lhs} vs {mean_sq}");
    }

    #[test]
    fn empty_pixel_set_is_rejected() {
        let img = GrayImage::filled(4, 4, 10);
        let empty = PixelSet::new();
        assert!(matches!(
            pixel_stats(&img, &empty),
            Err(RegionError::EmptyRegion { .. })
        ));
    }

    #[test]
    fn float_stats_agree_with_gray_on_integral_samples() {
        let mut rng = StdRng::seed_from_u64(9);
        let img = GrayImage::from_fn(8, 8, |_, _| rng.random());
        let region = Region::axis_rect([3.0, 3.0], [3.0, 3.0]).unwrap();
        let a = region_stats(&img, &region).unwrap();
        let b = region_stats_f64(&img.to_float(), &region).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-12);
        assert!((a.deviation - b.deviation).abs() < 1e-12);
        assert_eq!(a.area, b.area);
    }

    #[test]
    fn histogram_counts_every_sample() {
        let img = GrayImage::from_fn(4, 2, |r, c| if (r + c) % 2 == 0 { 10 } else { 200 });
        let hist = histogram(&img);
        assert_eq!(hist[10], 4);
        assert_eq!(hist[200], 4);
        assert_eq!(hist.iter().sum::<u64>(), 8);
    }

    #[test]
    fn between_class_variance_of_perfect_split_is_maximal_at_gap() {
        // Two spikes at 50 and 200: any threshold in [50, 199] separates
        // them perfectly and must score identically.
        let mut hist = [0u64; 256];
        hist[50] = 120;
        hist[200] = 80;
        let at_gap = between_class_variance(&hist, &[50]);
        for t in 51..200u8 {
            let v = between_class_variance(&hist, &[t]);
            assert!((v - at_gap).abs() < 1e-9);
        }
        // Splits that bury both spikes in one class score strictly lower.
        assert!(between_class_variance(&hist, &[20]) < at_gap - 1.0);
        assert!(between_class_variance(&hist, &[220]) < at_gap - 1.0);
    }

    #[test]
    fn otsu_separates_bimodal_histogram() {
        let mut hist = [0u64; 256];
        hist[50] = 120;
        hist[200] = 80;
        let t = otsu_threshold(&hist);
        assert!((50..200).contains(&t), "threshold {t} outside gap");
        // Degenerate histograms fall back to 0.
        let mut flat = [0u64; 256];
        flat[7] = 55;
        assert_eq!(otsu_threshold(&flat), 0);
        assert_eq!(otsu_threshold(&[0u64; 256]), 0);
    }

    proptest! {
        #[test]
        fn mean_stays_within_sample_range(seed in any::<u64>()) {
            let mut rng = StdRng::seed_from_u64(seed);
            let img = GrayImage::from_fn(6, 6, |_, _| rng.random());
            let stats = region_stats(&img, &full_region(6, 6)).unwrap();
            let lo = *img.samples().iter().min().unwrap() as f64;
            let hi = *img.samples().iter().max().unwrap() as f64;
            prop_assert!(stats.mean >= lo - 1e-12 && stats.mean <= hi + 1e-12);
            prop_assert!(stats.deviation >= 0.0);
            prop_assert!(stats.deviation <= (hi - lo) / 2.0 + 1e-9);
        }
    }
}
