//! PNM (PGM/PPM) codec: ASCII `P2`/`P3` and binary `P5`/`P6` at maxval 255.
//!
//! Decoding accepts the full netpbm comment and whitespace grammar (`#`
//! comments are allowed wherever token whitespace is, including between
//! ASCII raster samples). Encoding is canonical: a three-line header
//! (`magic`, `width height`, `255`) followed by the raster, so that
//! decode→encode is byte-stable for files produced by this module.

use thiserror::Error;

use super::raster::{GrayImage, RgbImage};

/// The four supported netpbm formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnmFormat {
    /// ASCII grayscale.
    P2,
    /// ASCII RGB.
    P3,
    /// Binary grayscale.
    P5,
    /// Binary RGB.
    P6,
}

impl PnmFormat {
    fn magic(self) -> &'static [u8; 2] {
        match self {
            PnmFormat::P2 => b"P2",
            PnmFormat::P3 => b"P3",
            PnmFormat::P5 => b"P5",
            PnmFormat::P6 => b"P6",
        }
    }

    fn is_color(self) -> bool {
        matches!(self, PnmFormat::P3 | PnmFormat::P6)
    }

    fn is_binary(self) -> bool {
        matches!(self, PnmFormat::P5 | PnmFormat::P6)
    }
}

impl std::fmt::Display for PnmFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(std::str::from_utf8(self.magic()).expect("ascii magic"))
    }
}

/// Decoding and encoding failures. Every parse variant carries the byte
/// offset at which the problem was detected.
#[derive(Debug, Error, PartialEq)]
pub enum PnmError {
    /// The header (magic, dimensions, or maxval) is malformed.
    #[error("malformed header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },
    /// A maxval other than 255 was declared.
    #[error("unsupported maxval {maxval} at byte {offset}: only 255 is supported")]
    UnsupportedMaxval { offset: usize, maxval: u64 },
    /// The raster ended before `width * height * channels` samples.
    #[error("truncated payload at byte {offset}: expected {expected} samples, found {found}")]
    TruncatedPayload {
        offset: usize,
        expected: usize,
        found: usize,
    },
    /// An ASCII sample exceeded the declared maxval.
    #[error("sample value {value} at byte {offset} exceeds maxval 255")]
    SampleOutOfRange { offset: usize, value: u64 },
    /// Attempted to encode an image kind into an incompatible format.
    #[error("cannot encode a {kind} image as {format}")]
    FormatMismatch {
        kind: &'static str,
        format: PnmFormat,
    },
}

/// Result of decoding: the format tells callers which flavor the bytes
/// declared, the payload is the image itself.
#[derive(Debug, Clone, PartialEq)]
pub enum DecodedImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl DecodedImage {
    /// The grayscale payload, if this is one.
    pub fn as_gray(&self) -> Option<&GrayImage> {
        match self {
            DecodedImage::Gray(g) => Some(g),
            DecodedImage::Rgb(_) => None,
        }
    }

    /// The RGB payload, if this is one.
    pub fn as_rgb(&self) -> Option<&RgbImage> {
        match self {
            DecodedImage::Gray(_) => None,
            DecodedImage::Rgb(r) => Some(r),
        }
    }

    pub fn width(&self) -> u32 {
        match self {
            DecodedImage::Gray(g) => g.width(),
            DecodedImage::Rgb(r) => r.width(),
        }
    }

    pub fn height(&self) -> u32 {
        match self {
            DecodedImage::Gray(g) => g.height(),
            DecodedImage::Rgb(r) => r.height(),
        }
    }
}

/// Byte scanner with netpbm whitespace/comment handling.
struct Scanner<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn peek(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(b) = self.peek() {
                        self.pos += 1;
                        if b == b'\n' || b == b'\r' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    /// Reads one unsigned decimal token, skipping leading separators.
    fn read_number(&mut self, what: &str) -> Result<(u64, usize), PnmError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        let mut digits = 0usize;
        while let Some(b) = self.peek() {
            if b.is_ascii_digit() {
                // Cap instead of overflowing; the caller range-checks.
                value = value.saturating_mul(10).saturating_add((b - b'0') as u64);
                digits += 1;
                self.pos += 1;
            } else {
                break;
            }
        }
        if digits == 0 {
            return Err(PnmError::MalformedHeader {
                offset: start,
                reason: format!("expected {what}, found {}", describe_byte(self.peek())),
            });
        }
        Ok((value, start))
    }
}

fn describe_byte(b: Option<u8>) -> String {
    match b {
        None => "end of input".to_string(),
        Some(b) if b.is_ascii_graphic() => format!("`{}`", b as char),
        Some(b) => format!("byte 0x{b:02x}"),
    }
}

/// Decodes a PNM byte stream. The format is inferred from the magic
/// number; `P2`/`P5` produce [`DecodedImage::Gray`], `P3`/`P6` produce
/// [`DecodedImage::Rgb`].
pub fn decode_image(data: &[u8]) -> Result<(DecodedImage, PnmFormat), PnmError> {
    let format = match data.get(0..2) {
        Some(b"P2") => PnmFormat::P2,
        Some(b"P3") => PnmFormat::P3,
        Some(b"P5") => PnmFormat::P5,
        Some(b"P6") => PnmFormat::P6,
        Some(other) => {
            return Err(PnmError::MalformedHeader {
                offset: 0,
                reason: format!(
                    "unrecognized magic `{}`",
                    String::from_utf8_lossy(other).escape_default()
                ),
            })
        }
        None => {
            return Err(PnmError::MalformedHeader {
                offset: 0,
                reason: "input shorter than a magic number".to_string(),
            })
        }
    };
    let mut sc = Scanner::new(data);
    sc.pos = 2;
    if let Some(b) = sc.peek() {
        if !b.is_ascii_whitespace() && b != b'#' {
            return Err(PnmError::MalformedHeader {
                offset: sc.pos,
                reason: format!("expected whitespace after magic, found {}", describe_byte(Some(b))),
            });
        }
    }

    let (width, w_off) = sc.read_number("width")?;
    let (height, h_off) = sc.read_number("height")?;
    let (maxval, m_off) = sc.read_number("maxval")?;
    if width == 0 {
        return Err(PnmError::MalformedHeader {
            offset: w_off,
            reason: "width must be at least 1".to_string(),
        });
    }
    if height == 0 {
        return Err(PnmError::MalformedHeader {
            offset: h_off,
            reason: "height must be at least 1".to_string(),
        });
    }
    if width > u32::MAX as u64 || height > u32::MAX as u64 {
        return Err(PnmError::MalformedHeader {
            offset: w_off,
            reason: format!("dimensions {width}x{height} out of range"),
        });
    }
    if maxval != 255 {
        return Err(PnmError::UnsupportedMaxval {
            offset: m_off,
            maxval,
        });
    }

    let channels: usize = if format.is_color() { 3 } else { 1 };
    let expected = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(channels))
        .ok_or(PnmError::MalformedHeader {
            offset: w_off,
            reason: format!("dimensions {width}x{height} out of range"),
        })?;

    let samples = if format.is_binary() {
        // Exactly one whitespace byte separates the maxval from the raster.
        match sc.peek() {
            Some(b) if b.is_ascii_whitespace() => sc.pos += 1,
            other => {
                return Err(PnmError::MalformedHeader {
                    offset: sc.pos,
                    reason: format!(
                        "expected single whitespace before binary raster, found {}",
                        describe_byte(other)
                    ),
                })
            }
        }
        let available = data.len() - sc.pos;
        if available < expected {
            return Err(PnmError::TruncatedPayload {
                offset: data.len(),
                expected,
                found: available,
            });
        }
        data[sc.pos..sc.pos + expected].to_vec()
    } else {
        let mut samples = Vec::new();
        for _ in 0..expected {
            sc.skip_separators();
            if sc.peek().is_none() {
                return Err(PnmError::TruncatedPayload {
                    offset: sc.pos,
                    expected,
                    found: samples.len(),
                });
            }
            let (value, off) = sc.read_number("sample")?;
            if value > 255 {
                return Err(PnmError::SampleOutOfRange { offset: off, value });
            }
            samples.push(value as u8);
        }
        samples
    };

    let decoded = if format.is_color() {
        DecodedImage::Rgb(
            RgbImage::new(width as u32, height as u32, samples)
                .expect("sample count checked above"),
        )
    } else {
        DecodedImage::Gray(
            GrayImage::new(width as u32, height as u32, samples)
                .expect("sample count checked above"),
        )
    };
    Ok((decoded, format))
}

fn header(format: PnmFormat, width: u32, height: u32) -> Vec<u8> {
    format!("{format}\n{width} {height}\n255\n").into_bytes()
}

/// Encodes a grayscale image as `P2` (ASCII) or `P5` (binary).
pub fn encode_gray(img: &GrayImage, format: PnmFormat) -> Result<Vec<u8>, PnmError> {
    if format.is_color() {
        return Err(PnmError::FormatMismatch {
            kind: "grayscale",
            format,
        });
    }
    let mut out = header(format, img.width(), img.height());
    match format {
        PnmFormat::P5 => out.extend_from_slice(img.samples()),
        PnmFormat::P2 => {
            for row in img.samples().chunks(img.width() as usize) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Encodes an RGB image as `P3` (ASCII) or `P6` (binary).
pub fn encode_rgb(img: &RgbImage, format: PnmFormat) -> Result<Vec<u8>, PnmError> {
    if !format.is_color() {
        return Err(PnmError::FormatMismatch {
            kind: "rgb",
            format,
        });
    }
    let mut out = header(format, img.width(), img.height());
    match format {
        PnmFormat::P6 => out.extend_from_slice(img.samples()),
        PnmFormat::P3 => {
            for row in img.samples().chunks(img.width() as usize * 3) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Encodes either image kind, rejecting gray/color format mismatches.
pub fn encode_image(img: &DecodedImage, format: PnmFormat) -> Result<Vec<u8>, PnmError> {
    match img {
        DecodedImage::Gray(g) => encode_gray(g, format),
        DecodedImage::Rgb(r) => encode_rgb(r, format),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn decode_gray(data: &[u8]) -> GrayImage {
        match decode_image(data).expect("decode") {
            (DecodedImage::Gray(g), _) => g,
            other => panic!("expected gray image, got {other:?}"),
        }
    }

    #[test]
    fn binary_gray_layout_is_header_then_rows() {
        let img = GrayImage::new(2, 2, vec![0, 64, 128, 255]).unwrap();
        let bytes = encode_gray(&img, PnmFormat::P5).unwrap();
        assert_eq!(&bytes[..12], b"P5\n2 2\n255\n\x00");
        assert_eq!(&bytes[11..], &[0, 64, 128, 255]);
    }

    #[test]
    fn ascii_and_binary_gray_decode_identically() {
        let ascii = b"P2\n3 2\n255\n0 10 20\n30 40 250\n";
        let binary = b"P5\n3 2\n255\n\x00\x0a\x14\x1e\x28\xfa";
        assert_eq!(decode_gray(ascii), decode_gray(binary));
    }

    #[test]
    fn comments_and_odd_whitespace_are_tolerated() {
        let data = b"P2 # format\n# a comment line\n 3\t1 # width and height\n255\n# raster\n7 8 9\n";
        let img = decode_gray(data);
        assert_eq!((img.width(), img.height()), (3, 1));
        assert_eq!(img.samples(), &[7, 8, 9]);
    }

    #[test]
    fn color_round_trips_both_formats() {
        let mut rng = StdRng::seed_from_u64(11);
        let img = RgbImage::from_fn(5, 4, |_, _| [rng.random(), rng.random(), rng.random()]);
        for format in [PnmFormat::P3, PnmFormat::P6] {
            let bytes = encode_rgb(&img, format).unwrap();
            let (decoded, seen) = decode_image(&bytes).unwrap();
            assert_eq!(seen, format);
            assert_eq!(decoded.as_rgb().unwrap(), &img);
        }
    }

    #[test]
    fn gray_round_trips_random_images() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..50 {
            let w = rng.random_range(1..24u32);
            let h = rng.random_range(1..24u32);
            let img = GrayImage::from_fn(w, h, |_, _| rng.random());
            for format in [PnmFormat::P2, PnmFormat::P5] {
                let bytes = encode_gray(&img, format).unwrap();
                let (decoded, _) = decode_image(&bytes).unwrap();
                assert_eq!(decoded.as_gray().unwrap(), &img);
            }
        }
    }

    #[test]
    fn encoding_is_canonical_after_decode() {
        // decode(encode(x)) == x implies encode(decode(bytes)) == bytes for
        // bytes this module produced; check directly on one example.
        let img = GrayImage::new(3, 1, vec![1, 2, 3]).unwrap();
        let bytes = encode_gray(&img, PnmFormat::P2).unwrap();
        let (decoded, format) = decode_image(&bytes).unwrap();
        assert_eq!(encode_image(&decoded, format).unwrap(), bytes);
    }

    #[test]
    fn reports_malformed_magic_with_offset() {
        let err = decode_image(b"Q5\n1 1\n255\n\x00").unwrap_err();
        assert!(matches!(err, PnmError::MalformedHeader { offset: 0, .. }));
    }

    #[test]
    fn reports_unsupported_maxval_with_offset() {
        let err = decode_image(b"P5\n2 2\n65535\n").unwrap_err();
        assert_eq!(
            err,
            PnmError::UnsupportedMaxval {
                offset: 7,
                maxval: 65535
            }
        );
    }

    #[test]
    fn reports_truncated_binary_payload() {
        let err = decode_image(b"P5\n2 2\n255\n\x01\x02\x03").unwrap_err();
        assert_eq!(
            err,
            PnmError::TruncatedPayload {
                offset: 14,
                expected: 4,
                found: 3
            }
        );
    }

    #[test]
    fn reports_truncated_ascii_payload() {
        let err = decode_image(b"P2\n2 2\n255\n1 2 3").unwrap_err();
        assert!(matches!(
            err,
            PnmError::TruncatedPayload {
                expected: 4,
                found: 3,
                ..
            }
        ));
    }

    #[test]
    fn reports_oversized_ascii_sample() {
        let err = decode_image(b"P2\n2 1\n255\n12 300\n").unwrap_err();
        assert_eq!(
            err,
            PnmError::SampleOutOfRange {
                offset: 14,
                value: 300
            }
        );
    }

    #[test]
    fn rejects_zero_dimensions() {
        assert!(matches!(
            decode_image(b"P5\n0 2\n255\n"),
            Err(PnmError::MalformedHeader { .. })
        ));
        assert!(matches!(
            decode_image(b"P5\n2 0\n255\n"),
            Err(PnmError::MalformedHeader { .. })
        ));
    }

    #[test]
    fn huge_dimensions_fail_before_allocation() {
        // A header promising ~1.6e19 samples must fail from the size check
        // alone, not by attempting to allocate the raster.
        let err = decode_image(b"P5\n4000000000 4000000000\n255\n\x00").unwrap_err();
        assert!(matches!(err, PnmError::TruncatedPayload { .. }));
        // With three channels the sample count overflows outright.
        let err = decode_image(b"P6\n4000000000 4000000000\n255\n\x00").unwrap_err();
        assert!(matches!(err, PnmError::MalformedHeader { .. }));
    }

    #[test]
    fn format_mismatch_is_rejected_symmetrically() {
        let gray = GrayImage::filled(1, 1, 0);
        let rgb = RgbImage::filled(1, 1, [0, 0, 0]);
        assert!(matches!(
            encode_gray(&gray, PnmFormat::P6),
            Err(PnmError::FormatMismatch { .. })
        ));
        assert!(matches!(
            encode_rgb(&rgb, PnmFormat::P2),
            Err(PnmError::FormatMismatch { .. })
        ));
    }
}
