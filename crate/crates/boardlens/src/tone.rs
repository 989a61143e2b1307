//! Grayscale conversion and tonal transforms: weighted RGB→gray, linear
//! range mapping, logarithmic and exponential curves, full-range contrast
//! stretching, and local-mean emphasis.
//!
//! Every transform clamps to `[0, 255]` and rounds half-up (the crate-wide
//! quantization rule); domain violations in the log/exp curves are hard
//! errors rather than silent clamps so that bad parameter sets surface
//! immediately.

use thiserror::Error;

use crate::filters::mean_filter;
use crate::imgcore::{quantize, GrayImage, RgbImage};

/// Errors raised by tonal transform construction and application.
#[derive(Debug, Error, PartialEq)]
pub enum ToneError {
    /// Linear map input range must satisfy `b > a`.
    #[error("linear map needs b > a, got a={a}, b={b}")]
    BadRange { a: f64, b: f64 },
    /// A map parameter was NaN or infinite.
    #[error("parameter {name} must be finite")]
    NonFiniteParam { name: &'static str },
    /// Log base must be positive and different from 1.
    #[error("log base must be positive and not 1, got {base}")]
    BadLogBase { base: f64 },
    /// A pixel fell outside the transform's domain.
    #[error("{transform} transform undefined for gray level {gray}: {reason}")]
    DomainError {
        transform: &'static str,
        gray: u8,
        reason: String,
    },
    /// Contrast stretch needs at least two distinct gray levels.
    #[error("cannot stretch a constant image (every sample is {value})")]
    ConstantImage { value: u8 },
    /// Emphasis mask must be odd and at least 3.
    #[error("emphasis mask must be odd and at least 3, got {mask}")]
    BadMask { mask: u32 },
    /// Emphasis factor must be nonnegative.
    #[error("emphasis factor must be nonnegative and finite, got {factor}")]
    BadFactor { factor: f64 },
}

fn check_finite(name: &'static str, value: f64) -> Result<(), ToneError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ToneError::NonFiniteParam { name })
    }
}

/// Converts RGB to luminance-weighted grayscale
/// (`0.299 R + 0.587 G + 0.114 B`, rounded half-up).
pub fn rgb_to_gray(img: &RgbImage) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |r, c| {
        let [red, green, blue] = img.at(r, c);
        quantize(0.299 * red as f64 + 0.587 * green as f64 + 0.114 * blue as f64)
    })
}

/// Linear gray-range mapping `[a, b] → [c, d]`.
///
/// The slope is `k = (d - c) / (b - a)`; values outside `[a, b]` follow the
/// same line and are clamped on output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl LinearMap {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, ToneError> {
        check_finite("a", a)?;
        check_finite("b", b)?;
        check_finite("c", c)?;
        check_finite("d", d)?;
        if b <= a {
            return Err(ToneError::BadRange { a, b });
        }
        let map = Self { a, b, c, d };
        if !map.k().is_finite() {
            return Err(ToneError::NonFiniteParam { name: "k" });
        }
        Ok(map)
    }

    /// Slope `(d - c) / (b - a)`.
    pub fn k(&self) -> f64 {
        (self.d - self.c) / (self.b - self.a)
    }

    pub fn identity() -> Self {
        Self {
            a: 0.0,
            b: 255.0,
            c: 0.0,
            d: 255.0,
        }
    }
}

/// Applies a [`LinearMap`]: `g = k (f - a) + c`, clamped and rounded.
///
/// Evaluated as `(f - a)(d - c) / (b - a) + c` — multiply before divide —
/// so integer endpoints produce exact ties (e.g. mapping `[100, 200]` to
/// `[0, 255]` sends 150 to exactly 127.5, which rounds half-up to 128).
pub fn linear_transform(img: &GrayImage, map: LinearMap) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |r, c| {
        let f = img.at(r, c) as f64;
        quantize((f - map.a) * (map.d - map.c) / (map.b - map.a) + map.c)
    })
}

/// Parameters of the logarithmic curve `g = a + log_b(f + c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogParams {
    /// Vertical offset.
    pub a: f64,
    /// Logarithm base; must be positive and not 1.
    pub b: f64,
    /// Horizontal offset; `f + c` must stay positive over the image.
    pub c: f64,
}

impl LogParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, ToneError> {
        check_finite("a", a)?;
        check_finite("b", b)?;
        check_finite("c", c)?;
        if b <= 0.0 || b == 1.0 {
            return Err(ToneError::BadLogBase { base: b });
        }
        Ok(Self { a, b, c })
    }
}

/// Applies the log curve. Fails with [`ToneError::DomainError`] if any
/// pixel has `f + c <= 0`.
pub fn log_transform(img: &GrayImage, p: LogParams) -> Result<GrayImage, ToneError> {
    if let Some(&bad) = img.samples().iter().find(|&&v| v as f64 + p.c <= 0.0) {
        return Err(ToneError::DomainError {
            transform: "log",
            gray: bad,
            reason: format!("{bad} + {} is not positive", p.c),
        });
    }
    let ln_b = p.b.ln();
    Ok(GrayImage::from_fn(img.width(), img.height(), |r, c| {
        let f = img.at(r, c) as f64;
        quantize(p.a + (f + p.c).ln() / ln_b)
    }))
}

/// Parameters of the exponential curve `g = a (f + b)^c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpParams {
    /// Output scale.
    pub a: f64,
    /// Input offset.
    pub b: f64,
    /// Exponent.
    pub c: f64,
}

impl ExpParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, ToneError> {
        check_finite("a", a)?;
        check_finite("b", b)?;
        check_finite("c", c)?;
        Ok(Self { a, b, c })
    }
}

/// Applies the exponential curve. Fails with [`ToneError::DomainError`]
/// when a fractional exponent meets a negative base.
pub fn exp_transform(img: &GrayImage, p: ExpParams) -> Result<GrayImage, ToneError> {
    let fractional = p.c.fract() != 0.0;
    if fractional {
        if let Some(&bad) = img.samples().iter().find(|&&v| (v as f64) + p.b < 0.0) {
            return Err(ToneError::DomainError {
                transform: "exp",
                gray: bad,
                reason: format!(
                    "negative base {bad} + {} with fractional exponent {}",
                    p.b, p.c
                ),
            });
        }
    }
    Ok(GrayImage::from_fn(img.width(), img.height(), |r, c| {
        let f = img.at(r, c) as f64;
        let base = f + p.b;
        let powered = if fractional || base >= 0.0 {
            base.powf(p.c)
        } else {
            // Integer exponent on a negative base: use powi semantics.
            base.powi(p.c as i32)
        };
        quantize(p.a * powered)
    }))
}

/// Gain/offset pair chosen by [`stretch`] together with the observed
/// intensity extremes it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StretchParams {
    /// Gain `255 / (gmax - gmin)`.
    pub mult: f64,
    /// Offset `-mult * gmin`.
    pub add: f64,
    pub gmin: u8,
    pub gmax: u8,
}

/// Full-range contrast stretch: maps the observed `[gmin, gmax]` onto
/// `[0, 255]` so the output attains both extremes.
///
/// Fails with [`ToneError::ConstantImage`] when the image has a single
/// gray level.
pub fn stretch(img: &GrayImage) -> Result<(GrayImage, StretchParams), ToneError> {
    let gmin = *img.samples().iter().min().expect("nonempty image");
    let gmax = *img.samples().iter().max().expect("nonempty image");
    if gmin == gmax {
        return Err(ToneError::ConstantImage { value: gmin });
    }
    let span = gmax as f64 - gmin as f64;
    let mult = 255.0 / span;
    let add = -(gmin as f64 * 255.0) / span;
    // Multiply before divide: for 8-bit extremes the scaled value is an
    // exact integer ratio, so half-way cases round predictably.
    let out = GrayImage::from_fn(img.width(), img.height(), |r, c| {
        quantize((img.at(r, c) as f64 - gmin as f64) * 255.0 / span)
    });
    Ok((
        out,
        StretchParams {
            mult,
            add,
            gmin,
            gmax,
        },
    ))
}

/// Local-contrast emphasis: adds back the difference between each pixel
/// and its windowed mean, scaled by `factor`.
///
/// `mask` is the window side length (odd, ≥ 3). `factor` 0 is the
/// identity; larger factors overshoot at edges. The windowed mean is the
/// quantized [`mean_filter`] output, so the operator composes exactly with
/// the smoothing stage it inverts.
pub fn emphasize(img: &GrayImage, mask: u32, factor: f64) -> Result<GrayImage, ToneError> {
    if mask < 3 || mask.is_multiple_of(2) {
        return Err(ToneError::BadMask { mask });
    }
    if !factor.is_finite() || factor < 0.0 {
        return Err(ToneError::BadFactor { factor });
    }
    let radius = (mask - 1) / 2;
    let local_mean = mean_filter(img, radius);
    Ok(GrayImage::from_fn(img.width(), img.height(), |r, c| {
        let f = img.at(r, c) as f64;
        let m = local_mean.at(r, c) as f64;
        quantize((f - m) * factor + f)
    }))
}
