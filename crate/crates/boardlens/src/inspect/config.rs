//! Pipeline configuration: the tunable knobs for every inspection stage,
//! their defaults (matching the synthetic demo board), and a sectioned
//! `key = value` text format with line-precise parse errors.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edges::HysteresisThresholds;
use crate::filters::GaussianSpec;
use crate::imgcore::Region;

/// Errors from parsing configuration text.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    /// A `key = value` line appeared before any section header.
    #[error("line {line}: key before any section header")]
    Orphan { line: usize },
    /// The section name is not one this format defines.
    #[error("line {line}: unknown section {name:?}")]
    UnknownSection { line: usize, name: String },
    /// The key is not defined in its section.
    #[error("line {line}: unknown key {key:?} in section [{section}]")]
    UnknownKey {
        line: usize,
        section: &'static str,
        key: String,
    },
    /// The same key was assigned twice in one section.
    #[error("line {line}: duplicate key {key:?} in section [{section}]")]
    DuplicateKey {
        line: usize,
        section: &'static str,
        key: String,
    },
    /// The value could not be parsed for its key.
    #[error("line {line}: bad value for {key:?}: {reason}")]
    BadValue {
        line: usize,
        key: String,
        reason: String,
    },
    /// The line is neither a section header nor `key = value`.
    #[error("line {line}: expected `[section]` or `key = value`")]
    Syntax { line: usize },
    /// The assembled configuration fails semantic validation.
    #[error("invalid configuration: {reason}")]
    Invalid { reason: String },
}

/// Errors from reading a configuration file.
#[derive(Debug, Error)]
pub enum ConfigLoadError {
    #[error(transparent)]
    Parse(#[from] ConfigError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Which 0-255 brightness scale the color check measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BrightnessSource {
    /// HSV value scaled from `[0, 1]` to `[0, 255]`.
    #[serde(rename = "hsv_v_scaled_0_255")]
    HsvValue,
    /// Luma-weighted grayscale, unquantized.
    #[serde(rename = "gray")]
    Gray,
}

impl fmt::Display for BrightnessSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BrightnessSource::HsvValue => "hsv_v_scaled_0_255",
            BrightnessSource::Gray => "gray",
        })
    }
}

impl FromStr for BrightnessSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hsv_v_scaled_0_255" => Ok(BrightnessSource::HsvValue),
            "gray" => Ok(BrightnessSource::Gray),
            other => Err(format!(
                "unknown brightness source {other:?} (expected hsv_v_scaled_0_255 or gray)"
            )),
        }
    }
}

/// Which inspection stages run. Disabled stages produce no defect tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageToggles {
    pub color: bool,
    pub edges: bool,
    pub matching: bool,
    pub barcode: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self {
            color: true,
            edges: true,
            matching: true,
            barcode: true,
        }
    }
}

impl StageToggles {
    /// The comma-separated list form used in configuration text
    /// (`"none"` when every stage is off).
    pub fn to_list(&self) -> String {
        let names: Vec<&str> = [
            ("color", self.color),
            ("edges", self.edges),
            ("matching", self.matching),
            ("barcode", self.barcode),
        ]
        .iter()
        .filter(|(_, on)| *on)
        .map(|(name, _)| *name)
        .collect();
        if names.is_empty() {
            "none".to_string()
        } else {
            names.join(",")
        }
    }

    /// Parses the list form produced by [`StageToggles::to_list`]: a
    /// comma-separated subset of `color`, `edges`, `matching`, `barcode`,
    /// or the word `none`. Duplicates are rejected.
    pub fn parse_list(value: &str) -> Result<Self, String> {
        let mut toggles = Self {
            color: false,
            edges: false,
            matching: false,
            barcode: false,
        };
        if value.trim() == "none" {
            return Ok(toggles);
        }
        for name in value.split(',') {
            let slot = match name.trim() {
                "color" => &mut toggles.color,
                "edges" => &mut toggles.edges,
                "matching" => &mut toggles.matching,
                "barcode" => &mut toggles.barcode,
                other => {
                    return Err(format!(
                        "unknown check {other:?} (expected color, edges, matching, barcode, or none)"
                    ))
                }
            };
            if *slot {
                return Err(format!("check {:?} listed twice", name.trim()));
            }
            *slot = true;
        }
        Ok(toggles)
    }
}

/// Every knob the inspection pipeline reads, echoed verbatim into each
/// report so results stay traceable to their settings.
///
/// The defaults describe the synthetic demo board produced by the board
/// generator: a 512x512 frame with two bright component zones, a traced
/// central area used for both the edge and template checks, and a barcode
/// label near the bottom-left corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Inspection window as (width, height); input frames are centered
    /// onto (or cropped to) this size first.
    pub window: (u32, u32),
    /// First color-check zone.
    pub roi_0: Region,
    /// Second color-check zone.
    pub roi_1: Region,
    /// A zone passes the color check when its mean brightness is strictly
    /// above this value.
    pub brightness_threshold: u8,
    /// Scale the brightness statistics are measured on.
    pub brightness_source: BrightnessSource,
    /// Which stages run.
    pub checks: StageToggles,
    /// Optional closed interval the mean hue of both zones must lie in.
    pub hue_range: Option<(f64, f64)>,
    /// Optional closed interval the mean saturation of both zones must
    /// lie in.
    pub saturation_range: Option<(f64, f64)>,
    /// Smoothing sigma for the edge check's detector.
    pub edge_sigma: f64,
    /// Smoothing kernel radius for the edge check's detector.
    pub edge_radius: u32,
    /// Weak-edge hysteresis threshold.
    pub edge_low: f64,
    /// Strong-edge hysteresis threshold.
    pub edge_high: f64,
    /// Zone whose edge pixels are counted.
    pub edge_region: Region,
    /// Allowed relative drift of the edge count from the reference
    /// board's count.
    pub edge_tolerance: f64,
    /// Zone the reference template is cut from.
    pub match_region: Region,
    /// How far (in pixels, per axis) the template may shift during the
    /// correlation search.
    pub match_search_radius: u32,
    /// Minimum acceptable correlation score in `[-1, 1]`.
    pub match_min_score: f64,
    /// Zone expected to contain the barcode label.
    pub barcode_region: Region,
    /// Closed acceptance interval for the white-to-black area ratio.
    pub barcode_ratio_lo: f64,
    pub barcode_ratio_hi: f64,
    /// Minimum between-class variance the label zone's optimal split must
    /// reach; anything flatter is treated as "no barcode printed".
    pub barcode_min_variance: f64,
    /// Whether reports carry per-stage wall-clock timings.
    pub collect_timings: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let layout = super::synth::layout();
        Self {
            window: (super::synth::BOARD_SIDE, super::synth::BOARD_SIDE),
            roi_0: layout.roi_0,
            roi_1: layout.roi_1,
            brightness_threshold: 150,
            brightness_source: BrightnessSource::HsvValue,
            checks: StageToggles::default(),
            hue_range: None,
            saturation_range: None,
            edge_sigma: 1.4,
            edge_radius: 2,
            edge_low: 40.0,
            edge_high: 120.0,
            edge_region: layout.edge_region,
            edge_tolerance: 0.25,
            match_region: layout.match_region,
            match_search_radius: 4,
            match_min_score: 0.95,
            barcode_region: layout.barcode_region,
            barcode_ratio_lo: 0.7,
            barcode_ratio_hi: 1.5,
            barcode_min_variance: 1000.0,
            collect_timings: false,
        }
    }
}

impl PipelineConfig {
    /// Checks every knob for internal consistency: positive window,
    /// regions that cover at least one window pixel, well-formed detector
    /// parameters, and ordered finite intervals.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |reason: String| ConfigError::Invalid { reason };
        let (w, h) = self.window;
        if w == 0 || h == 0 {
            return Err(invalid(format!("window {w}x{h} has a zero side")));
        }
        for (name, region) in [
            ("roi_0", &self.roi_0),
            ("roi_1", &self.roi_1),
            ("edge region", &self.edge_region),
            ("match region", &self.match_region),
            ("barcode region", &self.barcode_region),
        ] {
            region
                .rasterize(w, h)
                .map_err(|e| invalid(format!("{name}: {e}")))?;
        }
        GaussianSpec::new(self.edge_sigma, self.edge_radius)
            .map_err(|e| invalid(format!("edge smoothing: {e}")))?;
        HysteresisThresholds::new(self.edge_low, self.edge_high)
            .map_err(|e| invalid(format!("edge thresholds: {e}")))?;
        if !self.edge_tolerance.is_finite() || self.edge_tolerance < 0.0 {
            return Err(invalid(format!(
                "edge tolerance {} must be finite and nonnegative",
                self.edge_tolerance
            )));
        }
        if self.match_search_radius > 256 {
            return Err(invalid(format!(
                "match search radius {} exceeds 256",
                self.match_search_radius
            )));
        }
        if !self.match_min_score.is_finite()
            || !(-1.0..=1.0).contains(&self.match_min_score)
        {
            return Err(invalid(format!(
                "match score floor {} must lie in [-1, 1]",
                self.match_min_score
            )));
        }
        if !self.barcode_ratio_lo.is_finite()
            || !self.barcode_ratio_hi.is_finite()
            || self.barcode_ratio_lo <= 0.0
            || self.barcode_ratio_lo > self.barcode_ratio_hi
        {
            return Err(invalid(format!(
                "barcode ratio interval [{}, {}] must be finite, positive, and ordered",
                self.barcode_ratio_lo, self.barcode_ratio_hi
            )));
        }
        if !self.barcode_min_variance.is_finite() || self.barcode_min_variance < 0.0 {
            return Err(invalid(format!(
                "barcode variance floor {} must be finite and nonnegative",
                self.barcode_min_variance
            )));
        }
        if let Some((lo, hi)) = self.hue_range {
            if !lo.is_finite() || !hi.is_finite() || !(0.0..=360.0).contains(&lo) || lo > hi || hi > 360.0 {
                return Err(invalid(format!(
                    "hue range [{lo}, {hi}] must be an ordered interval within [0, 360]"
                )));
            }
        }
        if let Some((lo, hi)) = self.saturation_range {
            if !lo.is_finite() || !hi.is_finite() || !(0.0..=1.0).contains(&lo) || lo > hi || hi > 1.0 {
                return Err(invalid(format!(
                    "saturation range [{lo}, {hi}] must be an ordered interval within [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Renders the configuration in its text format. The output parses
    /// back to an equal configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let (w, h) = self.window;
        out.push_str("[inspect]\n");
        out.push_str(&format!("window = {w}x{h}\n"));
        out.push_str(&format!("roi_0 = {}\n", self.roi_0));
        out.push_str(&format!("roi_1 = {}\n", self.roi_1));
        out.push_str(&format!(
            "brightness_threshold = {}\n",
            self.brightness_threshold
        ));
        out.push_str(&format!("brightness_source = {}\n", self.brightness_source));
        out.push_str(&format!("checks = {}\n", self.checks.to_list()));
        if let Some((lo, hi)) = self.hue_range {
            out.push_str(&format!("hue_range = {lo},{hi}\n"));
        }
        if let Some((lo, hi)) = self.saturation_range {
            out.push_str(&format!("saturation_range = {lo},{hi}\n"));
        }
        out.push_str(&format!("collect_timings = {}\n", self.collect_timings));
        out.push_str("\n[edges]\n");
        out.push_str(&format!("sigma = {}\n", self.edge_sigma));
        out.push_str(&format!("radius = {}\n", self.edge_radius));
        out.push_str(&format!("low = {}\n", self.edge_low));
        out.push_str(&format!("high = {}\n", self.edge_high));
        out.push_str(&format!("region = {}\n", self.edge_region));
        out.push_str(&format!("tolerance = {}\n", self.edge_tolerance));
        out.push_str("\n[matching]\n");
        out.push_str(&format!("region = {}\n", self.match_region));
        out.push_str(&format!("search_radius = {}\n", self.match_search_radius));
        out.push_str(&format!("min_score = {}\n", self.match_min_score));
        out.push_str("\n[barcode]\n");
        out.push_str(&format!("region = {}\n", self.barcode_region));
        out.push_str(&format!("ratio_lo = {}\n", self.barcode_ratio_lo));
        out.push_str(&format!("ratio_hi = {}\n", self.barcode_ratio_hi));
        out.push_str(&format!("min_variance = {}\n", self.barcode_min_variance));
        out
    }
}

/// One section's known keys; anything else is an [`ConfigError::UnknownKey`].
const SECTIONS: [(&str, &[&str]); 4] = [
    (
        "inspect",
        &[
            "window",
            "roi_0",
            "roi_1",
            "brightness_threshold",
            "brightness_source",
            "checks",
            "hue_range",
            "saturation_range",
            "collect_timings",
        ],
    ),
    (
        "edges",
        &["sigma", "radius", "low", "high", "region", "tolerance"],
    ),
    ("matching", &["region", "search_radius", "min_score"]),
    (
        "barcode",
        &["region", "ratio_lo", "ratio_hi", "min_variance"],
    ),
];

fn parse_scalar<T: FromStr>(line: usize, key: &str, value: &str, what: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| ConfigError::BadValue {
        line,
        key: key.to_string(),
        reason: format!("{value:?} is not {what}: {e}"),
    })
}

fn parse_pair(line: usize, key: &str, value: &str) -> Result<(f64, f64), ConfigError> {
    let bad = |reason: String| ConfigError::BadValue {
        line,
        key: key.to_string(),
        reason,
    };
    let (a, b) = value
        .split_once(',')
        .ok_or_else(|| bad(format!("{value:?} is not a `lo,hi` pair")))?;
    let lo: f64 = a
        .trim()
        .parse()
        .map_err(|_| bad(format!("{:?} is not a number", a.trim())))?;
    let hi: f64 = b
        .trim()
        .parse()
        .map_err(|_| bad(format!("{:?} is not a number", b.trim())))?;
    Ok((lo, hi))
}

fn parse_window(line: usize, value: &str) -> Result<(u32, u32), ConfigError> {
    let bad = |reason: String| ConfigError::BadValue {
        line,
        key: "window".to_string(),
        reason,
    };
    let (w, h) = value
        .split_once('x')
        .ok_or_else(|| bad(format!("{value:?} is not `WIDTHxHEIGHT`")))?;
    let w: u32 = w
        .trim()
        .parse()
        .map_err(|_| bad(format!("width {:?} is not a whole number", w.trim())))?;
    let h: u32 = h
        .trim()
        .parse()
        .map_err(|_| bad(format!("height {:?} is not a whole number", h.trim())))?;
    Ok((w, h))
}

/// Parses configuration text into a [`PipelineConfig`], starting from
/// defaults and overriding whatever the text assigns, then validating the
/// result. Blank lines and `#` comment lines are ignored.
pub fn parse_pipeline_config(text: &str) -> Result<PipelineConfig, ConfigError> {
    let mut cfg = PipelineConfig::default();
    let mut section: Option<&'static str> = None;
    let mut seen: Vec<(&'static str, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(ConfigError::Syntax { line });
            };
            let name = name.trim();
            section = Some(
                SECTIONS
                    .iter()
                    .map(|(s, _)| *s)
                    .find(|s| *s == name)
                    .ok_or_else(|| ConfigError::UnknownSection {
                        line,
                        name: name.to_string(),
                    })?,
            );
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax { line });
        };
        let key = key.trim();
        let value = value.trim();
        let Some(section) = section else {
            return Err(ConfigError::Orphan { line });
        };
        let known = SECTIONS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, keys)| *keys)
            .unwrap_or(&[]);
        if !known.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                section,
                key: key.to_string(),
            });
        }
        if seen.iter().any(|(s, k)| *s == section && k == key) {
            return Err(ConfigError::DuplicateKey {
                line,
                section,
                key: key.to_string(),
            });
        }
        seen.push((section, key.to_string()));

        let bad_value = |reason: String| ConfigError::BadValue {
            line,
            key: key.to_string(),
            reason,
        };
        match (section, key) {
            ("inspect", "window") => cfg.window = parse_window(line, value)?,
            ("inspect", "roi_0") => {
                cfg.roi_0 = value.parse().map_err(|e: crate::imgcore::RegionError| {
                    bad_value(e.to_string())
                })?;
            }
            ("inspect", "roi_1") => {
                cfg.roi_1 = value.parse().map_err(|e: crate::imgcore::RegionError| {
                    bad_value(e.to_string())
                })?;
            }
            ("inspect", "brightness_threshold") => {
                cfg.brightness_threshold = parse_scalar(line, key, value, "a value in 0..=255")?;
            }
            ("inspect", "brightness_source") => {
                cfg.brightness_source = value.parse().map_err(bad_value)?;
            }
            ("inspect", "checks") => {
                cfg.checks = StageToggles::parse_list(value).map_err(bad_value)?;
            }
            ("inspect", "hue_range") => cfg.hue_range = Some(parse_pair(line, key, value)?),
            ("inspect", "saturation_range") => {
                cfg.saturation_range = Some(parse_pair(line, key, value)?);
            }
            ("inspect", "collect_timings") => {
                cfg.collect_timings = parse_scalar(line, key, value, "true or false")?;
            }
            ("edges", "sigma") => cfg.edge_sigma = parse_scalar(line, key, value, "a number")?,
            ("edges", "radius") => {
                cfg.edge_radius = parse_scalar(line, key, value, "a whole number")?;
            }
            ("edges", "low") => cfg.edge_low = parse_scalar(line, key, value, "a number")?,
            ("edges", "high") => cfg.edge_high = parse_scalar(line, key, value, "a number")?,
            ("edges", "region") => {
                cfg.edge_region = value.parse().map_err(|e: crate::imgcore::RegionError| {
                    bad_value(e.to_string())
                })?;
            }
            ("edges", "tolerance") => {
                cfg.edge_tolerance = parse_scalar(line, key, value, "a number")?;
            }
            ("matching", "region") => {
                cfg.match_region = value.parse().map_err(|e: crate::imgcore::RegionError| {
                    bad_value(e.to_string())
                })?;
            }
            ("matching", "search_radius") => {
                cfg.match_search_radius = parse_scalar(line, key, value, "a whole number")?;
            }
            ("matching", "min_score") => {
                cfg.match_min_score = parse_scalar(line, key, value, "a number")?;
            }
            ("barcode", "region") => {
                cfg.barcode_region = value.parse().map_err(|e: crate::imgcore::RegionError| {
                    bad_value(e.to_string())
                })?;
            }
            ("barcode", "ratio_lo") => {
                cfg.barcode_ratio_lo = parse_scalar(line, key, value, "a number")?;
            }
            ("barcode", "ratio_hi") => {
                cfg.barcode_ratio_hi = parse_scalar(line, key, value, "a number")?;
            }
            ("barcode", "min_variance") => {
                cfg.barcode_min_variance = parse_scalar(line, key, value, "a number")?;
            }
            _ => unreachable!("key lists cover every dispatch arm"),
        }
    }

    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a configuration file.
pub fn load_pipeline_config(path: &Path) -> Result<PipelineConfig, ConfigLoadError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_pipeline_config(&text)?)
}
