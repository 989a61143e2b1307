//! Shared plumbing for the command implementations: error-to-exit-code
//! classification, PNM file handling, and the small line-oriented point
//! formats some commands read.

use std::fmt::Display;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use boardlens::imgcore::{decode_image, encode_gray, encode_rgb, PnmFormat};
use boardlens::{GrayImage, RgbImage};

/// A domain error: the invocation was well-formed but the operation
/// failed on its inputs — bad file contents, a parameter outside its
/// module's domain, an impossible geometry. Domain errors exit with
/// status 1 and print the underlying message verbatim; malformed
/// invocations never reach the commands, because the argument parser
/// rejects them with a synopsis and status 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl CliError {
    pub fn domain(msg: impl Display) -> Self {
        CliError(msg.to_string())
    }

    /// A domain error attributed to a file, `path: message`.
    pub fn in_file(path: &Path, msg: impl Display) -> Self {
        CliError(format!("{}: {}", path.display(), msg))
    }
}

/// Shorthand: any library error becomes a domain error, message verbatim.
impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub type CmdResult<T> = Result<T, CliError>;

/// Decoded pixel data of either color flavor, plus the format it arrived
/// in so outputs can stay in the same family.
pub enum LoadedImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

pub fn read_image(path: &Path) -> CmdResult<(LoadedImage, PnmFormat)> {
    let bytes = fs::read(path).map_err(|e| CliError::in_file(path, e))?;
    let (decoded, format) = decode_image(&bytes).map_err(|e| CliError::in_file(path, e))?;
    let loaded = match (decoded.as_gray(), decoded.as_rgb()) {
        (Some(g), _) => LoadedImage::Gray(g.clone()),
        (_, Some(c)) => LoadedImage::Rgb(c.clone()),
        _ => unreachable!("a decoded image is gray or RGB"),
    };
    Ok((loaded, format))
}

/// Reads a grayscale image; color input is rejected rather than silently
/// converted, since conversion is its own command (`tone gray`).
pub fn read_gray(path: &Path) -> CmdResult<(GrayImage, PnmFormat)> {
    match read_image(path)? {
        (LoadedImage::Gray(img), format) => Ok((img, format)),
        (LoadedImage::Rgb(_), _) => Err(CliError::in_file(
            path,
            "expected a grayscale image (PGM); convert color input with `tone gray` first",
        )),
    }
}

pub fn read_rgb(path: &Path) -> CmdResult<(RgbImage, PnmFormat)> {
    match read_image(path)? {
        (LoadedImage::Rgb(img), format) => Ok((img, format)),
        (LoadedImage::Gray(_), _) => Err(CliError::in_file(
            path,
            "expected a color image (PPM), found grayscale",
        )),
    }
}

/// The grayscale format in the same family (ASCII or binary) as an input.
pub fn gray_format_like(input: PnmFormat) -> PnmFormat {
    match input {
        PnmFormat::P2 | PnmFormat::P3 => PnmFormat::P2,
        PnmFormat::P5 | PnmFormat::P6 => PnmFormat::P5,
    }
}

pub fn write_gray(path: &Path, img: &GrayImage, format: PnmFormat) -> CmdResult<()> {
    let bytes = encode_gray(img, format).map_err(CliError::domain)?;
    fs::write(path, bytes).map_err(|e| CliError::in_file(path, e))
}

pub fn write_rgb(path: &Path, img: &RgbImage, format: PnmFormat) -> CmdResult<()> {
    let bytes = encode_rgb(img, format).map_err(CliError::domain)?;
    fs::write(path, bytes).map_err(|e| CliError::in_file(path, e))
}

/// Writes command output to a file when `-o` was given, to stdout
/// otherwise.
pub fn emit_text(out: Option<&Path>, text: &str) -> CmdResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::in_file(path, e)),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(CliError::domain)
        }
    }
}

/// Parses a line-oriented numeric table: `count` whitespace-separated
/// numbers per line, `#` comments and blank lines skipped. Errors carry
/// the file name and 1-based line number.
fn read_rows(path: &Path, count: usize) -> CmdResult<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::in_file(path, e))?;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != count {
            return Err(CliError(format!(
                "{}:{}: expected {} numbers per line, found {}",
                path.display(),
                idx + 1,
                count,
                fields.len()
            )));
        }
        let mut row = Vec::with_capacity(count);
        for field in fields {
            let value: f64 = field.parse().map_err(|_| {
                CliError(format!(
                    "{}:{}: `{}` is not a number",
                    path.display(),
                    idx + 1,
                    field
                ))
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// `x y` per line.
pub fn read_points2(path: &Path) -> CmdResult<Vec<(f64, f64)>> {
    Ok(read_rows(path, 2)?.iter().map(|r| (r[0], r[1])).collect())
}

/// `x y z` per line.
pub fn read_points3(path: &Path) -> CmdResult<Vec<[f64; 3]>> {
    Ok(read_rows(path, 3)?.iter().map(|r| [r[0], r[1], r[2]]).collect())
}

/// A world point paired with the pixel it was observed at.
pub type Correspondence = ([f64; 3], (f64, f64));

/// `x y z u v` per line: a world point and the pixel it was observed at.
pub fn read_correspondences(path: &Path) -> CmdResult<Vec<Correspondence>> {
    Ok(read_rows(path, 5)?
        .iter()
        .map(|r| ([r[0], r[1], r[2]], (r[3], r[4])))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("boardlens-cli-io-tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn rows_parse_with_comments_and_blanks() {
        let path = temp_file("rows.txt", "# header\n1 2\n\n3.5 -4\n");
        assert_eq!(read_points2(&path).unwrap(), vec![(1.0, 2.0), (3.5, -4.0)]);
    }

    #[test]
    fn wrong_arity_is_reported_with_line_number() {
        let path = temp_file("bad_arity.txt", "1 2\n3\n");
        let CliError(msg) = read_points2(&path).unwrap_err();
        assert!(msg.contains(":2:"), "{msg}");
        assert!(msg.contains("expected 2 numbers"), "{msg}");
    }

    #[test]
    fn non_numeric_field_is_reported() {
        let path = temp_file("bad_num.txt", "1 x\n");
        let CliError(msg) = read_points2(&path).unwrap_err();
        assert!(msg.contains("`x` is not a number"), "{msg}");
    }

    #[test]
    fn format_family_is_preserved() {
        assert_eq!(gray_format_like(PnmFormat::P2), PnmFormat::P2);
        assert_eq!(gray_format_like(PnmFormat::P3), PnmFormat::P2);
        assert_eq!(gray_format_like(PnmFormat::P5), PnmFormat::P5);
        assert_eq!(gray_format_like(PnmFormat::P6), PnmFormat::P5);
    }
}
