//! Raster containers for 8-bit grayscale, 8-bit RGB, and f64 images.

use thiserror::Error;

/// Errors raised when constructing raster containers from raw parts.
#[derive(Debug, Error, PartialEq)]
pub enum RasterError {
    /// Width or height was zero.
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
    /// The sample buffer length does not match `width * height * channels`.
    #[error("sample buffer holds {found} values but {width}x{height} with {channels} channel(s) needs {expected}")]
    SampleCountMismatch {
        width: u32,
        height: u32,
        channels: u32,
        expected: usize,
        found: usize,
    },
    /// A floating-point sample was NaN or infinite.
    #[error("non-finite sample {value} at index {index}")]
    NonFiniteSample { index: usize, value: f64 },
}

fn check_dims(width: u32, height: u32, channels: u32, found: usize) -> Result<(), RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::EmptyDimensions { width, height });
    }
    let expected = width as usize * height as usize * channels as usize;
    if expected != found {
        return Err(RasterError::SampleCountMismatch {
            width,
            height,
            channels,
            expected,
            found,
        });
    }
    Ok(())
}

/// Single-channel 8-bit image stored in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    samples: Vec<u8>,
}

impl GrayImage {
    /// Wraps a row-major sample buffer. Fails when the dimensions are empty
    /// or do not match the buffer length.
    pub fn new(width: u32, height: u32, samples: Vec<u8>) -> Result<Self, RasterError> {
        check_dims(width, height, 1, samples.len())?;
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    /// Creates an image filled with a constant value.
    ///
    /// # Panics
    /// Panics if `width` or `height` is zero.
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        Self {
            width,
            height,
            samples: vec![value; width as usize * height as usize],
        }
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    ///
    /// # Panics
    /// Panics if `width` or `height` is zero.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        let mut samples = Vec::with_capacity(width as usize * height as usize);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Self {
            width,
            height,
            samples,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Row-major sample buffer.
    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    /// Consumes the image and returns its sample buffer.
    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    fn index(&self, row: u32, col: u32) -> usize {
        debug_assert!(row < self.height && col < self.width);
        row as usize * self.width as usize + col as usize
    }

    /// Sample at `(row, col)`.
    ///
    /// # Panics
    /// Panics if the coordinate is out of bounds.
    #[inline]
    pub fn at(&self, row: u32, col: u32) -> u8 {
        self.samples[self.index(row, col)]
    }

    /// Overwrites the sample at `(row, col)`.
    ///
    /// # Panics
    /// Panics if the coordinate is out of bounds.
    #[inline]
    pub fn set(&mut self, row: u32, col: u32, value: u8) {
        let i = self.index(row, col);
        self.samples[i] = value;
    }

    /// Sample at `(row, col)` with replicate (clamp-to-edge) padding:
    /// coordinates outside the image read the nearest border pixel.
    #[inline]
    pub fn at_clamped(&self, row: i64, col: i64) -> u8 {
        let r = row.clamp(0, self.height as i64 - 1) as u32;
        let c = col.clamp(0, self.width as i64 - 1) as u32;
        self.at(r, c)
    }

    /// Lossless widening to an [`FloatImage`].
    pub fn to_float(&self) -> FloatImage {
        FloatImage {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|&v| v as f64).collect(),
        }
    }
}

/// Three-channel 8-bit image with interleaved `[r, g, b]` samples in
/// row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    samples: Vec<u8>,
}

impl RgbImage {
    /// Wraps an interleaved row-major sample buffer (`r g b r g b ...`).
    /// Fails when the dimensions are empty or do not match the buffer.
    pub fn new(width: u32, height: u32, samples: Vec<u8>) -> Result<Self, RasterError> {
        check_dims(width, height, 3, samples.len())?;
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    /// Creates an image filled with a constant color.
    ///
    /// # Panics
    /// Panics if `width` or `height` is zero.
    pub fn filled(width: u32, height: u32, color: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        let mut samples = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..width as usize * height as usize {
            samples.extend_from_slice(&color);
        }
        Self {
            width,
            height,
            samples,
        }
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    ///
    /// # Panics
    /// Panics if `width` or `height` is zero.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        let mut samples = Vec::with_capacity(width as usize * height as usize * 3);
        for r in 0..height {
            for c in 0..width {
                samples.extend_from_slice(&f(r, c));
            }
        }
        Self {
            width,
            height,
            samples,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Interleaved row-major sample buffer (`r g b r g b ...`).
    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    /// Consumes the image and returns its sample buffer.
    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    fn index(&self, row: u32, col: u32) -> usize {
        debug_assert!(row < self.height && col < self.width);
        (row as usize * self.width as usize + col as usize) * 3
    }

    /// Pixel at `(row, col)` as `[r, g, b]`.
    ///
    /// # Panics
    /// Panics if the coordinate is out of bounds.
    #[inline]
    pub fn at(&self, row: u32, col: u32) -> [u8; 3] {
        let i = self.index(row, col);
        [self.samples[i], self.samples[i + 1], self.samples[i + 2]]
    }

    /// Overwrites the pixel at `(row, col)`.
    ///
    /// # Panics
    /// Panics if the coordinate is out of bounds.
    #[inline]
    pub fn set(&mut self, row: u32, col: u32, color: [u8; 3]) {
        let i = self.index(row, col);
        self.samples[i..i + 3].copy_from_slice(&color);
    }
}

/// Single-channel f64 image stored in row-major order. All samples are
/// finite; constructors reject NaN and infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    width: u32,
    height: u32,
    samples: Vec<f64>,
}

impl FloatImage {
    /// Wraps a row-major sample buffer. Fails when the dimensions are
    /// empty, the buffer length does not match, or any sample is non-finite.
    pub fn new(width: u32, height: u32, samples: Vec<f64>) -> Result<Self, RasterError> {
        check_dims(width, height, 1, samples.len())?;
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(RasterError::NonFiniteSample { index, value });
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    /// Creates an image filled with a constant value.
    ///
    /// # Panics
    /// Panics if `width` or `height` is zero or `value` is not finite.
    pub fn filled(width: u32, height: u32, value: f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        assert!(value.is_finite(), "samples must be finite");
        Self {
            width,
            height,
            samples: vec![value; width as usize * height as usize],
        }
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    ///
    /// # Panics
    /// Panics if `width` or `height` is zero or `f` returns a non-finite
    /// value.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        let mut samples = Vec::with_capacity(width as usize * height as usize);
        for r in 0..height {
            for c in 0..width {
                let v = f(r, c);
                assert!(v.is_finite(), "samples must be finite");
                samples.push(v);
            }
        }
        Self {
            width,
            height,
            samples,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Row-major sample buffer.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    fn index(&self, row: u32, col: u32) -> usize {
        debug_assert!(row < self.height && col < self.width);
        row as usize * self.width as usize + col as usize
    }

    /// Sample at `(row, col)`.
    ///
    /// # Panics
    /// Panics if the coordinate is out of bounds.
    #[inline]
    pub fn at(&self, row: u32, col: u32) -> f64 {
        self.samples[self.index(row, col)]
    }

    /// Overwrites the sample at `(row, col)`.
    ///
    /// # Panics
    /// Panics if the coordinate is out of bounds or `value` is not finite.
    #[inline]
    pub fn set(&mut self, row: u32, col: u32, value: f64) {
        assert!(value.is_finite(), "samples must be finite");
        let i = self.index(row, col);
        self.samples[i] = value;
    }

    /// Sample at `(row, col)`, reading coordinates outside the image as 0.
    #[inline]
    pub fn at_or_zero(&self, row: i64, col: i64) -> f64 {
        if row < 0 || col < 0 || row >= self.height as i64 || col >= self.width as i64 {
            0.0
        } else {
            self.at(row as u32, col as u32)
        }
    }

    /// Quantizes every sample to 8 bits with the crate-wide rule
    /// (clamp to `[0, 255]`, round half-up).
    pub fn quantize(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|&v| super::quantize(v)).collect(),
        }
    }
}
