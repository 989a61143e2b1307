//! Configuration layering for the inspection commands: built-in defaults,
//! then a configuration file (`--config`, or the `BOARDLENS_CONFIG`
//! environment variable when the flag is absent), then individual
//! override flags, strongest last.

use std::path::PathBuf;

use clap::Args;

use boardlens::imgcore::Region;
use boardlens::inspect::{load_pipeline_config, BrightnessSource, PipelineConfig, StageToggles};

use crate::io::{CliError, CmdResult};

/// Name of the environment variable holding a default config path.
pub const CONFIG_ENV: &str = "BOARDLENS_CONFIG";

#[derive(Args)]
pub struct ConfigFlags {
    /// Pipeline configuration file; falls back to the path in
    /// $BOARDLENS_CONFIG, then to built-in defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Inspection window size in pixels, width by height.
    #[arg(long, value_parser = parse_window, value_name = "WxH")]
    pub window: Option<(u32, u32)>,
    /// First color-check zone, e.g. axis:ROW,COL,HALF_ROWS,HALF_COLS.
    #[arg(long = "roi-0", value_parser = parse_region, value_name = "REGION")]
    pub roi_0: Option<Region>,
    /// Second color-check zone.
    #[arg(long = "roi-1", value_parser = parse_region, value_name = "REGION")]
    pub roi_1: Option<Region>,
    /// Brightness a zone's mean must strictly exceed to pass (gray
    /// levels, 0-255).
    #[arg(long, value_name = "LEVEL")]
    pub threshold: Option<u8>,
    /// Scale brightness is measured on: hsv_v_scaled_0_255 or gray.
    #[arg(long, value_parser = parse_source, value_name = "SOURCE")]
    pub brightness_source: Option<BrightnessSource>,
    /// Comma-separated list of stages to run (color, edges, matching,
    /// barcode) or the word none.
    #[arg(long, value_parser = parse_checks, value_name = "LIST")]
    pub checks: Option<StageToggles>,
    /// Closed interval the zones' mean hue must lie in (degrees, 0-360),
    /// or the word none to drop the gate.
    #[arg(long, value_parser = parse_opt_range, value_name = "LO,HI|none")]
    pub hue_range: Option<RangeOverride>,
    /// Closed interval the zones' mean saturation must lie in (0-1), or
    /// the word none to drop the gate.
    #[arg(long, value_parser = parse_opt_range, value_name = "LO,HI|none")]
    pub saturation_range: Option<RangeOverride>,
    /// Edge check: smoothing standard deviation in pixels.
    #[arg(allow_negative_numbers = true, long, value_name = "SIGMA")]
    pub edge_sigma: Option<f64>,
    /// Edge check: smoothing kernel radius in pixels.
    #[arg(long, value_name = "RADIUS")]
    pub edge_radius: Option<u32>,
    /// Edge check: weak-edge hysteresis threshold (gray levels).
    #[arg(allow_negative_numbers = true, long, value_name = "LEVEL")]
    pub edge_low: Option<f64>,
    /// Edge check: strong-edge hysteresis threshold (gray levels).
    #[arg(allow_negative_numbers = true, long, value_name = "LEVEL")]
    pub edge_high: Option<f64>,
    /// Zone whose edge pixels are counted.
    #[arg(long, value_parser = parse_region, value_name = "REGION")]
    pub edge_region: Option<Region>,
    /// Allowed relative drift of the edge count from the reference count
    /// (fraction, e.g. 0.25).
    #[arg(allow_negative_numbers = true, long, value_name = "FRACTION")]
    pub edge_tolerance: Option<f64>,
    /// Zone the reference template is cut from.
    #[arg(long, value_parser = parse_region, value_name = "REGION")]
    pub match_region: Option<Region>,
    /// Template correlation search radius in pixels per axis.
    #[arg(long, value_name = "PIXELS")]
    pub search_radius: Option<u32>,
    /// Minimum acceptable correlation score, -1 to 1.
    #[arg(allow_negative_numbers = true, long, value_name = "SCORE")]
    pub min_score: Option<f64>,
    /// Zone expected to contain the barcode label.
    #[arg(long, value_parser = parse_region, value_name = "REGION")]
    pub barcode_region: Option<Region>,
    /// Lower edge of the accepted white/black area ratio interval.
    #[arg(allow_negative_numbers = true, long, value_name = "RATIO")]
    pub ratio_lo: Option<f64>,
    /// Upper edge of the accepted white/black area ratio interval.
    #[arg(allow_negative_numbers = true, long, value_name = "RATIO")]
    pub ratio_hi: Option<f64>,
    /// Minimum between-class variance the label zone must reach to count
    /// as carrying a printed barcode.
    #[arg(allow_negative_numbers = true, long, value_name = "VARIANCE")]
    pub min_variance: Option<f64>,
    /// Whether reports carry per-stage wall-clock timings (true/false).
    #[arg(long, value_name = "BOOL")]
    pub timings: Option<bool>,
}

/// An override for an optional range: set a new interval or clear it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeOverride {
    Clear,
    Set(f64, f64),
}

impl RangeOverride {
    fn apply(self, slot: &mut Option<(f64, f64)>) {
        *slot = match self {
            RangeOverride::Clear => None,
            RangeOverride::Set(lo, hi) => Some((lo, hi)),
        };
    }
}

fn parse_window(value: &str) -> Result<(u32, u32), String> {
    let (w, h) = value
        .split_once('x')
        .ok_or_else(|| format!("`{value}` is not of the form WIDTHxHEIGHT"))?;
    let parse = |s: &str, what: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| format!("`{s}` is not a valid {what}"))
    };
    Ok((parse(w, "width")?, parse(h, "height")?))
}

fn parse_region(value: &str) -> Result<Region, String> {
    value.parse::<Region>().map_err(|e| e.to_string())
}

fn parse_source(value: &str) -> Result<BrightnessSource, String> {
    value.parse()
}

fn parse_checks(value: &str) -> Result<StageToggles, String> {
    StageToggles::parse_list(value)
}

fn parse_opt_range(value: &str) -> Result<RangeOverride, String> {
    if value.trim() == "none" {
        return Ok(RangeOverride::Clear);
    }
    let (lo, hi) = value
        .split_once(',')
        .ok_or_else(|| format!("`{value}` is not of the form LO,HI (or the word none)"))?;
    let parse = |s: &str, end: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a valid {end} bound"))
    };
    Ok(RangeOverride::Set(parse(lo, "lower")?, parse(hi, "upper")?))
}

impl ConfigFlags {
    /// The effective configuration after all three layers. Validation is
    /// left to the operations that consume the result, so their messages
    /// arrive unwrapped.
    pub fn effective(&self) -> CmdResult<PipelineConfig> {
        let mut cfg = match self.config_path() {
            Some(path) => load_pipeline_config(&path)
                .map_err(|e| CliError::in_file(&path, e))?,
            None => PipelineConfig::default(),
        };
        self.apply(&mut cfg);
        Ok(cfg)
    }

    fn config_path(&self) -> Option<PathBuf> {
        if let Some(path) = &self.config {
            return Some(path.clone());
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
            _ => None,
        }
    }

    fn apply(&self, cfg: &mut PipelineConfig) {
        if let Some(v) = self.window {
            cfg.window = v;
        }
        if let Some(v) = &self.roi_0 {
            cfg.roi_0 = v.clone();
        }
        if let Some(v) = &self.roi_1 {
            cfg.roi_1 = v.clone();
        }
        if let Some(v) = self.threshold {
            cfg.brightness_threshold = v;
        }
        if let Some(v) = self.brightness_source {
            cfg.brightness_source = v;
        }
        if let Some(v) = self.checks {
            cfg.checks = v;
        }
        if let Some(v) = self.hue_range {
            v.apply(&mut cfg.hue_range);
        }
        if let Some(v) = self.saturation_range {
            v.apply(&mut cfg.saturation_range);
        }
        if let Some(v) = self.edge_sigma {
            cfg.edge_sigma = v;
        }
        if let Some(v) = self.edge_radius {
            cfg.edge_radius = v;
        }
        if let Some(v) = self.edge_low {
            cfg.edge_low = v;
        }
        if let Some(v) = self.edge_high {
            cfg.edge_high = v;
        }
        if let Some(v) = &self.edge_region {
            cfg.edge_region = v.clone();
        }
        if let Some(v) = self.edge_tolerance {
            cfg.edge_tolerance = v;
        }
        if let Some(v) = &self.match_region {
            cfg.match_region = v.clone();
        }
        if let Some(v) = self.search_radius {
            cfg.match_search_radius = v;
        }
        if let Some(v) = self.min_score {
            cfg.match_min_score = v;
        }
        if let Some(v) = &self.barcode_region {
            cfg.barcode_region = v.clone();
        }
        if let Some(v) = self.ratio_lo {
            cfg.barcode_ratio_lo = v;
        }
        if let Some(v) = self.ratio_hi {
            cfg.barcode_ratio_hi = v;
        }
        if let Some(v) = self.min_variance {
            cfg.barcode_min_variance = v;
        }
        if let Some(v) = self.timings {
            cfg.collect_timings = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_and_range_values_parse() {
        assert_eq!(parse_window("640x480").unwrap(), (640, 480));
        assert!(parse_window("640").is_err());
        assert_eq!(parse_opt_range("none").unwrap(), RangeOverride::Clear);
        assert_eq!(
            parse_opt_range("10,350").unwrap(),
            RangeOverride::Set(10.0, 350.0)
        );
        assert!(parse_opt_range("10").is_err());
    }

    #[test]
    fn range_override_sets_and_clears() {
        let mut slot = Some((1.0, 2.0));
        RangeOverride::Clear.apply(&mut slot);
        assert_eq!(slot, None);
        RangeOverride::Set(3.0, 4.0).apply(&mut slot);
        assert_eq!(slot, Some((3.0, 4.0)));
    }
}
