//! Color machinery: RGB channel decomposition, RGB→HSV conversion, and
//! HSV range masks.
//!
//! Hue is measured in degrees on `[0, 360)`; saturation and value are
//! normalized to `[0, 1]`. Achromatic pixels store hue 0 by convention.

use thiserror::Error;

use crate::imgcore::{GrayImage, PixelSet, RgbImage};

/// Errors raised when assembling channel planes of mismatched shape.
#[derive(Debug, Error, PartialEq)]
pub enum ColorError {
    #[error("channel planes disagree in shape: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(u32, u32, u32, u32),
}

/// Planar HSV image: hue in degrees `[0, 360)`, saturation and value in
/// `[0, 1]`, one f64 plane per channel in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    width: u32,
    height: u32,
    h: Vec<f64>,
    s: Vec<f64>,
    v: Vec<f64>,
}

impl HsvImage {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    fn index(&self, row: u32, col: u32) -> usize {
        debug_assert!(row < self.height && col < self.width);
        row as usize * self.width as usize + col as usize
    }

    /// `(h, s, v)` at `(row, col)`.
    ///
    /// # Panics
    /// Panics if the coordinate is out of bounds.
    pub fn at(&self, row: u32, col: u32) -> (f64, f64, f64) {
        let i = self.index(row, col);
        (self.h[i], self.s[i], self.v[i])
    }

    /// Hue plane in degrees.
    pub fn hue(&self) -> &[f64] {
        &self.h
    }

    /// Saturation plane.
    pub fn saturation(&self) -> &[f64] {
        &self.s
    }

    /// Value (brightness) plane.
    pub fn value(&self) -> &[f64] {
        &self.v
    }
}

/// Splits an RGB image into its three channel planes, each returned as a
/// grayscale image whose samples are the channel intensities.
pub fn decompose3(img: &RgbImage) -> (GrayImage, GrayImage, GrayImage) {
    let plane = |ch: usize| {
        GrayImage::from_fn(img.width(), img.height(), |r, c| img.at(r, c)[ch])
    };
    (plane(0), plane(1), plane(2))
}

/// Reassembles channel planes produced by [`decompose3`]. Fails when the
/// planes disagree in shape.
pub fn recompose3(
    red: &GrayImage,
    green: &GrayImage,
    blue: &GrayImage,
) -> Result<RgbImage, ColorError> {
    for plane in [green, blue] {
        if plane.width() != red.width() || plane.height() != red.height() {
            return Err(ColorError::ShapeMismatch(
                red.width(),
                red.height(),
                plane.width(),
                plane.height(),
            ));
        }
    }
    Ok(RgbImage::from_fn(red.width(), red.height(), |r, c| {
        [red.at(r, c), green.at(r, c), blue.at(r, c)]
    }))
}

/// Converts one 8-bit RGB triple to `(h, s, v)` with the hexcone model:
/// channels are normalized by 255, `v = max`, `s = (max - min) / max`
/// (0 for black), and hue walks the six sectors in degrees.
pub fn pixel_to_hsv(rgb: [u8; 3]) -> (f64, f64, f64) {
    let r = rgb[0] as f64 / 255.0;
    let g = rgb[1] as f64 / 255.0;
    let b = rgb[2] as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else {
        // Offset per dominant channel: red sits at 0°, green at 120°,
        // blue at 240°; the fraction walks within the 60° sector.
        let raw = if max == r {
            60.0 * ((g - b) / delta)
        } else if max == g {
            60.0 * ((b - r) / delta) + 120.0
        } else {
            60.0 * ((r - g) / delta) + 240.0
        };
        // Only the red sector can go negative (g < b); wrap into [0, 360).
        if raw < 0.0 {
            raw + 360.0
        } else {
            raw
        }
    };
    (h, s, v)
}

/// Converts an RGB image to planar HSV.
pub fn rgb_to_hsv(img: &RgbImage) -> HsvImage {
    let n = img.width() as usize * img.height() as usize;
    let mut h = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for row in 0..img.height() {
        for col in 0..img.width() {
            let (hh, ss, vv) = pixel_to_hsv(img.at(row, col));
            h.push(hh);
            s.push(ss);
            v.push(vv);
        }
    }
    HsvImage {
        width: img.width(),
        height: img.height(),
        h,
        s,
        v,
    }
}

/// Inclusive hue interval in degrees. `lo > hi` denotes a wrap-around
/// interval crossing 360→0 (e.g. `[350, 10]` covers red hues).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HueRange {
    pub lo: f64,
    pub hi: f64,
}

impl HueRange {
    /// The full hue circle.
    pub fn full() -> Self {
        Self { lo: 0.0, hi: 360.0 }
    }

    /// Membership with wrap-around: when `lo > hi` the interval is the
    /// union `[lo, 360) ∪ [0, hi]`.
    pub fn contains(&self, h: f64) -> bool {
        if self.lo <= self.hi {
            (self.lo..=self.hi).contains(&h)
        } else {
            h >= self.lo || h <= self.hi
        }
    }
}

/// Inclusive interval on a `[0, 1]` channel. `lo > hi` is the empty
/// interval (no wrap on saturation/value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitRange {
    pub lo: f64,
    pub hi: f64,
}

impl UnitRange {
    /// The full unit interval.
    pub fn full() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Selects pixels whose `(h, s, v)` fall inside all three ranges.
/// Returns a `{0, 255}` bitmask image of the same shape.
pub fn hsv_mask(img: &HsvImage, h: HueRange, s: UnitRange, v: UnitRange) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |row, col| {
        let (hh, ss, vv) = img.at(row, col);
        if h.contains(hh) && s.contains(ss) && v.contains(vv) {
            255
        } else {
            0
        }
    })
}

/// Converts a `{0, 255}` bitmask into the pixel set of its nonzero
/// entries, the form consumed by region statistics.
pub fn mask_pixels(mask: &GrayImage) -> PixelSet {
    let mut out = PixelSet::new();
    for r in 0..mask.height() {
        for c in 0..mask.width() {
            if mask.at(r, c) != 0 {
                out.insert((r, c));
            }
        }
    }
    out
}
