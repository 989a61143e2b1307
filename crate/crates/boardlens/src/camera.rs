//! Pinhole/stereo camera model: parameter ingestion from calibration
//! files, world-to-pixel projection, and reprojection-error accounting.
//!
//! Calibration *estimation* is out of scope — this module consumes
//! already-estimated parameter files and applies them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

/// Errors from camera math and parameter validation.
#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    /// The point's camera-frame depth is zero or negative.
    #[error("point is behind the camera (camera-frame z = {z})")]
    BehindCamera { z: f64 },
    /// An intrinsic parameter violates its domain.
    #[error("invalid intrinsics: {0}")]
    BadIntrinsics(&'static str),
    /// The rotation matrix is not a proper rotation.
    #[error("invalid rotation: {0}")]
    BadRotation(&'static str),
    /// Reprojection error needs at least one correspondence.
    #[error("no correspondences supplied")]
    EmptyCorrespondences,
}

/// Parse/validation failures for calibration files, carrying the line or
/// field that offended.
#[derive(Debug, Error, PartialEq)]
pub enum CalibParseError {
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key '{key}' in section [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: duplicate key '{key}' in section [{section}]")]
    DuplicateKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: value for '{key}' is not a number")]
    BadNumber { line: usize, key: String },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: &'static str },
    #[error("missing section [{name}]")]
    MissingSection { name: &'static str },
    #[error("section [{section}] is missing field '{field}'")]
    MissingField {
        section: &'static str,
        field: &'static str,
    },
    #[error("section [{section}] is invalid: {reason}")]
    Invalid { section: String, reason: String },
}

/// Errors from loading a calibration file from disk.
#[derive(Debug, Error)]
pub enum CalibLoadError {
    #[error(transparent)]
    Parse(#[from] CalibParseError),
    #[error("cannot read calibration file: {0}")]
    Io(#[from] std::io::Error),
}

/// Sensor and lens parameters: pixel pitch in micrometers, focal length
/// in millimeters, principal point in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    pub sx_um: f64,
    pub sy_um: f64,
    pub f_mm: f64,
    pub u0: f64,
    pub v0: f64,
}

impl Intrinsics {
    /// Checks `sx, sy > 0` and `f >= 0` (a zero focal length is accepted
    /// but degenerates projection to the principal point; loading warns).
    pub fn validate(&self) -> Result<(), CameraError> {
        if !(self.sx_um.is_finite() && self.sx_um > 0.0)
            || !(self.sy_um.is_finite() && self.sy_um > 0.0)
        {
            return Err(CameraError::BadIntrinsics("pixel pitch must be positive"));
        }
        if !(self.f_mm.is_finite() && self.f_mm >= 0.0) {
            return Err(CameraError::BadIntrinsics(
                "focal length must be finite and >= 0",
            ));
        }
        if !(self.u0.is_finite() && self.v0.is_finite()) {
            return Err(CameraError::BadIntrinsics("principal point must be finite"));
        }
        Ok(())
    }
}

/// Camera pose: a proper rotation and a translation, mapping world
/// coordinates into the camera frame as `R * p + t` (millimeters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrinsics {
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
}

impl Extrinsics {
    /// Validates orthonormality (`R^T R == I` within 1e-9) and
    /// `det(R) == 1` within 1e-9.
    pub fn new(rotation: [[f64; 3]; 3], translation: [f64; 3]) -> Result<Self, CameraError> {
        for row in &rotation {
            for &v in row {
                if !v.is_finite() {
                    return Err(CameraError::BadRotation("entries must be finite"));
                }
            }
        }
        for &v in &translation {
            if !v.is_finite() {
                return Err(CameraError::BadRotation("translation must be finite"));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| rotation[k][i] * rotation[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).abs() > 1e-9 {
                    return Err(CameraError::BadRotation("columns are not orthonormal"));
                }
            }
        }
        let det = rotation[0][0]
            * (rotation[1][1] * rotation[2][2] - rotation[1][2] * rotation[2][1])
            - rotation[0][1] * (rotation[1][0] * rotation[2][2] - rotation[1][2] * rotation[2][0])
            + rotation[0][2] * (rotation[1][0] * rotation[2][1] - rotation[1][1] * rotation[2][0]);
        if (det - 1.0).abs() > 1e-9 {
            return Err(CameraError::BadRotation("determinant is not +1"));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    /// The identity pose: camera frame equals world frame.
    pub fn identity() -> Self {
        Self {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [0.0; 3],
        }
    }

    pub fn rotation(&self) -> &[[f64; 3]; 3] {
        &self.rotation
    }

    pub fn translation(&self) -> &[f64; 3] {
        &self.translation
    }

    /// Maps a world point into the camera frame: `R * p + t`.
    pub fn transform(&self, p: [f64; 3]) -> [f64; 3] {
        let mut out = self.translation;
        for (i, row) in self.rotation.iter().enumerate() {
            out[i] += row[0] * p[0] + row[1] * p[1] + row[2] * p[2];
        }
        out
    }
}

/// One calibrated camera: intrinsics, pose, and its mean calibration
/// error in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraCalib {
    pub intrinsics: Intrinsics,
    pub extrinsics: Extrinsics,
    pub err: f64,
}

impl CameraCalib {
    pub fn project(&self, point: [f64; 3]) -> Result<(f64, f64), CameraError> {
        project(point, &self.intrinsics, &self.extrinsics)
    }
}

/// A calibrated two-camera rig.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereoRig {
    pub left: CameraCalib,
    pub right: CameraCalib,
}

impl StereoRig {
    /// Mean of the two cameras' calibration errors.
    pub fn mean_err(&self) -> f64 {
        (self.left.err + self.right.err) / 2.0
    }
}

/// A parsed calibration file: the rig plus any validation warnings
/// (currently: a zero focal length, which degenerates projection).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedCalibration {
    pub rig: StereoRig,
    pub warnings: Vec<String>,
}

/// Projects a world point to pixels: camera frame `p_c = R * p + t`,
/// image plane `x = f * p_cx / p_cz` (mm), pixels
/// `u = x / (sx_um * 1e-3) + u0` — the micrometer-to-millimeter
/// conversion is explicit in the denominator.
pub fn project(
    point: [f64; 3],
    intrinsics: &Intrinsics,
    extrinsics: &Extrinsics,
) -> Result<(f64, f64), CameraError> {
    intrinsics.validate()?;
    let pc = extrinsics.transform(point);
    if pc[2] <= 0.0 {
        return Err(CameraError::BehindCamera { z: pc[2] });
    }
    let x_mm = intrinsics.f_mm * pc[0] / pc[2];
    let y_mm = intrinsics.f_mm * pc[1] / pc[2];
    let u = x_mm / (intrinsics.sx_um * 1e-3) + intrinsics.u0;
    let v = y_mm / (intrinsics.sy_um * 1e-3) + intrinsics.v0;
    Ok((u, v))
}

/// Mean Euclidean pixel distance between projected world points and their
/// observed pixels.
pub fn reprojection_error(
    correspondences: &[([f64; 3], (f64, f64))],
    intrinsics: &Intrinsics,
    extrinsics: &Extrinsics,
) -> Result<f64, CameraError> {
    if correspondences.is_empty() {
        return Err(CameraError::EmptyCorrespondences);
    }
    let mut total = 0.0;
    for &(world, observed) in correspondences {
        let (u, v) = project(world, intrinsics, extrinsics)?;
        total += (u - observed.0).hypot(v - observed.1);
    }
    Ok(total / correspondences.len() as f64)
}

const CAMERA_FIELDS: [&str; 6] = ["sx_um", "sy_um", "f_mm", "u0", "v0", "err"];
const EXTRINSIC_FIELDS: [&str; 12] = [
    "r00", "r01", "r02", "r10", "r11", "r12", "r20", "r21", "r22", "t0", "t1", "t2",
];
const SECTIONS: [&str; 4] = ["left", "extrinsics_left", "right", "extrinsics_right"];

/// Parses the line-oriented `key = value` calibration format with
/// `[left]`, `[extrinsics_left]`, `[right]`, `[extrinsics_right]`
/// sections. Blank lines and `#` comments are allowed; an optional
/// `[distortion_left]`/`[distortion_right]` block is accepted and
/// ignored.
pub fn parse_calibration(text: &str) -> Result<LoadedCalibration, CalibParseError> {
    let mut sections: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(CalibParseError::Syntax {
                    line,
                    reason: "unterminated section header",
                });
            };
            let known = SECTIONS.contains(&name)
                || name == "distortion_left"
                || name == "distortion_right";
            if !known {
                return Err(CalibParseError::UnknownSection {
                    line,
                    name: name.to_string(),
                });
            }
            current = Some(name.to_string());
            sections.entry(name.to_string()).or_default();
            continue;
        }
        let Some(section) = current.clone() else {
            return Err(CalibParseError::Syntax {
                line,
                reason: "key before any section header",
            });
        };
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(CalibParseError::Syntax {
                line,
                reason: "expected 'key = value'",
            });
        };
        let key = key.trim();
        if section.starts_with("distortion_") {
            continue; // reserved block: contents ignored
        }
        let allowed: &[&str] = if section.starts_with("extrinsics_") {
            &EXTRINSIC_FIELDS
        } else {
            &CAMERA_FIELDS
        };
        if !allowed.contains(&key) {
            return Err(CalibParseError::UnknownKey {
                line,
                section,
                key: key.to_string(),
            });
        }
        let value: f64 = value.trim().parse().map_err(|_| CalibParseError::BadNumber {
            line,
            key: key.to_string(),
        })?;
        let entry = sections.get_mut(&section).unwrap();
        if entry.insert(key.to_string(), value).is_some() {
            return Err(CalibParseError::DuplicateKey {
                line,
                section,
                key: key.to_string(),
            });
        }
    }

    let mut warnings = Vec::new();
    let left = build_camera("left", "extrinsics_left", &sections, &mut warnings)?;
    let right = build_camera("right", "extrinsics_right", &sections, &mut warnings)?;
    Ok(LoadedCalibration {
        rig: StereoRig { left, right },
        warnings,
    })
}

fn build_camera(
    cam_section: &'static str,
    ext_section: &'static str,
    sections: &BTreeMap<String, BTreeMap<String, f64>>,
    warnings: &mut Vec<String>,
) -> Result<CameraCalib, CalibParseError> {
    let cam = sections
        .get(cam_section)
        .ok_or(CalibParseError::MissingSection { name: cam_section })?;
    let ext = sections
        .get(ext_section)
        .ok_or(CalibParseError::MissingSection { name: ext_section })?;
    let field = |map: &BTreeMap<String, f64>,
                 section: &'static str,
                 name: &'static str|
     -> Result<f64, CalibParseError> {
        map.get(name)
            .copied()
            .ok_or(CalibParseError::MissingField { section, field: name })
    };
    let intrinsics = Intrinsics {
        sx_um: field(cam, cam_section, "sx_um")?,
        sy_um: field(cam, cam_section, "sy_um")?,
        f_mm: field(cam, cam_section, "f_mm")?,
        u0: field(cam, cam_section, "u0")?,
        v0: field(cam, cam_section, "v0")?,
    };
    intrinsics.validate().map_err(|e| CalibParseError::Invalid {
        section: cam_section.to_string(),
        reason: e.to_string(),
    })?;
    let err = field(cam, cam_section, "err")?;
    if !(err.is_finite() && err >= 0.0) {
        return Err(CalibParseError::Invalid {
            section: cam_section.to_string(),
            reason: "err must be finite and >= 0".to_string(),
        });
    }
    let mut rotation = [[0.0; 3]; 3];
    for (i, row) in rotation.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = field(ext, ext_section, EXTRINSIC_FIELDS[i * 3 + j])?;
        }
    }
    let translation = [
        field(ext, ext_section, "t0")?,
        field(ext, ext_section, "t1")?,
        field(ext, ext_section, "t2")?,
    ];
    let extrinsics =
        Extrinsics::new(rotation, translation).map_err(|e| CalibParseError::Invalid {
            section: ext_section.to_string(),
            reason: e.to_string(),
        })?;
    if intrinsics.f_mm == 0.0 {
        warnings.push(format!(
            "{cam_section}: f_mm = 0 degenerates projection to the principal point"
        ));
    }
    Ok(CameraCalib {
        intrinsics,
        extrinsics,
        err,
    })
}

/// Serializes a rig in the canonical file layout: fixed section and key
/// order, `key = value` with shortest-round-trip numbers, one blank line
/// between sections. `parse_calibration(save_calibration(rig))`
/// reproduces `rig` exactly.
pub fn save_calibration(rig: &StereoRig) -> String {
    let mut out = String::new();
    for (cam_section, ext_section, cam) in [
        ("left", "extrinsics_left", &rig.left),
        ("right", "extrinsics_right", &rig.right),
    ] {
        let i = &cam.intrinsics;
        writeln!(out, "[{cam_section}]").unwrap();
        writeln!(out, "sx_um = {}", i.sx_um).unwrap();
        writeln!(out, "sy_um = {}", i.sy_um).unwrap();
        writeln!(out, "f_mm = {}", i.f_mm).unwrap();
        writeln!(out, "u0 = {}", i.u0).unwrap();
        writeln!(out, "v0 = {}", i.v0).unwrap();
        writeln!(out, "err = {}", cam.err).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "[{ext_section}]").unwrap();
        let r = cam.extrinsics.rotation();
        for (i, row) in r.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                writeln!(out, "r{i}{j} = {v}").unwrap();
            }
        }
        let t = cam.extrinsics.translation();
        writeln!(out, "t0 = {}", t[0]).unwrap();
        writeln!(out, "t1 = {}", t[1]).unwrap();
        writeln!(out, "t2 = {}", t[2]).unwrap();
        if cam_section == "left" {
            writeln!(out).unwrap();
        }
    }
    out
}

/// Reads and parses a calibration file.
pub fn load_calibration(path: &Path) -> Result<LoadedCalibration, CalibLoadError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_calibration(&text)?)
}
