//! Core raster types, region-of-interest algebra, region statistics, and a
//! PNM (PGM/PPM) codec.
//!
//! Everything downstream builds on the three containers defined here:
//! [`GrayImage`] (8-bit single channel), [`RgbImage`] (8-bit three channel,
//! interleaved), and [`FloatImage`] (f64 single channel, used for
//! intermediate results that must not be quantized prematurely).
//!
//! Pixel coordinates are `(row, col)` with the origin at the top-left
//! corner; rows grow downward and columns grow to the right.

mod pnm;
mod raster;
mod region;
mod stats;

pub use pnm::{
    decode_image, encode_gray, encode_image, encode_rgb, DecodedImage, PnmError, PnmFormat,
};
pub use raster::{FloatImage, GrayImage, RasterError, RgbImage};
pub use region::{rasterize_region, PixelSet, Region, RegionError};
pub use stats::{
    between_class_variance, histogram, histogram_of_pixels, otsu_threshold, pixel_stats,
    pixel_stats_f64, region_stats, region_stats_f64, RegionStats,
};

/// Clamps an intermediate float result to the 8-bit range and rounds it
/// half-up to the nearest integer.
///
/// This is the single quantization rule used by every filter and tonal
/// transform in the crate: clamp to `[0, 255]` first, then round, so that
/// e.g. `255.7` maps to `255` and `-0.2` maps to `0`.
#[inline]
pub fn quantize(value: f64) -> u8 {
    // `floor(x + 0.5)` rounds half-up; after the clamp the sum is at most
    // 255.5, whose floor is 255, so the cast never truncates.
    let clamped = value.clamp(0.0, 255.0);
    (clamped + 0.5).floor() as u8
}

#[cfg(test)]
mod quantize_tests {
    use super::quantize;

    #[test]
    fn rounds_half_up() {
        assert_eq!(quantize(0.0), 0);
        assert_eq!(quantize(0.4999), 0);
        assert_eq!(quantize(0.5), 1);
        assert_eq!(quantize(127.5), 128);
        assert_eq!(quantize(254.49), 254);
    }

    #[test]
    fn clamps_out_of_range() {
        assert_eq!(quantize(-12.0), 0);
        assert_eq!(quantize(255.0), 255);
        assert_eq!(quantize(255.49), 255);
        assert_eq!(quantize(300.0), 255);
        assert_eq!(quantize(f64::INFINITY), 255);
        assert_eq!(quantize(f64::NEG_INFINITY), 0);
    }

    #[test]
    fn integers_are_fixed_points() {
        for v in 0..=255u32 {
            assert_eq!(quantize(v as f64), v as u8);
        }
    }
}
