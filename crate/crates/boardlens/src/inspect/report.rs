//! Inspection verdicts and their serialized forms: one JSON object per
//! board (JSON Lines), plus the plain-text removal event log emitted for
//! boards judged defective.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::PipelineConfig;

/// Schema identifier stamped into every report line so downstream readers
/// can reject incompatible payloads.
pub const REPORT_SCHEMA: &str = "boardlens-report/1";

/// Errors raised when validating or parsing serialized reports.
#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    /// The report declares a schema this library does not understand.
    #[error("unknown report schema {found:?}")]
    Schema { found: String },
    /// The verdict disagrees with the defect tag list (a qualified board
    /// with tags, or a defective board without any).
    #[error("verdict does not agree with the defect tags")]
    InconsistentVerdict,
    /// The removal event flag disagrees with the verdict.
    #[error("removal event flag does not agree with the verdict")]
    InconsistentRemoval,
    /// Defect tags must be unique and listed in canonical order.
    #[error("defect tags are duplicated or out of canonical order")]
    UnorderedTags,
    /// A stage timing is negative or non-finite.
    #[error("stage {stage:?} reports a negative or non-finite timing")]
    BadTiming { stage: String },
    /// A report line was not valid JSON for this schema.
    #[error("line {line}: malformed report: {message}")]
    Json { line: usize, message: String },
    /// A parsed report line failed semantic validation.
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        source: Box<ReportError>,
    },
}

/// Final judgement for one board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Qualified,
    Defective,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Qualified => "qualified",
            Verdict::Defective => "defective",
        })
    }
}

/// Reason a board was judged defective. Reports list tags in this
/// declaration order, each at most once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectTag {
    /// A zone's color statistics missed the brightness threshold or an
    /// optional hue/saturation gate.
    ColorDifference,
    /// The edge-pixel count drifted too far from the reference board's.
    EdgeDefect,
    /// Correlation against the reference template fell below the floor.
    MatchFail,
    /// The label area shows no plausible barcode.
    BarcodeMissing,
}

impl fmt::Display for DefectTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DefectTag::ColorDifference => "color_difference",
            DefectTag::EdgeDefect => "edge_defect",
            DefectTag::MatchFail => "match_fail",
            DefectTag::BarcodeMissing => "barcode_missing",
        })
    }
}

/// Population mean and standard deviation of one feature over a zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub deviation: f64,
}

/// Color statistics measured over one inspection zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoiFeatures {
    /// Hue in degrees, `[0, 360)`. Plain arithmetic statistics: adequate
    /// for hues away from the red wrap point.
    pub hue: FeatureStats,
    /// Saturation in `[0, 1]`.
    pub saturation: FeatureStats,
    /// Brightness on the 0-255 scale chosen by the configured source.
    pub brightness: FeatureStats,
    /// Number of pixels the zone covers.
    pub area: u64,
}

/// Everything the pipeline concluded about one board, including the
/// effective configuration the conclusions were reached under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InspectionReport {
    pub schema: String,
    pub board_id: String,
    /// One entry per configured zone, in configuration order.
    pub rois: Vec<RoiFeatures>,
    pub verdict: Verdict,
    pub defect_tags: Vec<DefectTag>,
    /// Per-stage wall-clock milliseconds, present only when timing
    /// collection was enabled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
    /// Whether this board triggers a removal event (always equal to the
    /// verdict being defective).
    pub removal_event: bool,
    pub config: PipelineConfig,
}

impl InspectionReport {
    /// Checks the internal consistency rules every well-formed report
    /// obeys: known schema, verdict agreeing with tags and removal flag,
    /// canonically ordered tags, finite nonnegative timings.
    pub fn validate(&self) -> Result<(), ReportError> {
        if self.schema != REPORT_SCHEMA {
            return Err(ReportError::Schema {
                found: self.schema.clone(),
            });
        }
        let defective = self.verdict == Verdict::Defective;
        if defective == self.defect_tags.is_empty() {
            return Err(ReportError::InconsistentVerdict);
        }
        if self.removal_event != defective {
            return Err(ReportError::InconsistentRemoval);
        }
        if self.defect_tags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ReportError::UnorderedTags);
        }
        if let Some(timings) = &self.timings_ms {
            for (stage, &ms) in timings {
                if !ms.is_finite() || ms < 0.0 {
                    return Err(ReportError::BadTiming {
                        stage: stage.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// The removal event log line for this board, or `None` when the board
    /// stays on the line.
    pub fn event_log_line(&self, timestamp: u64) -> Option<String> {
        self.removal_event
            .then(|| format!("REMOVE {} {}", self.board_id, timestamp))
    }
}

/// Serializes reports as JSON Lines: one object per line, trailing
/// newline included.
pub fn reports_jsonl(reports: &[InspectionReport]) -> String {
    let mut out = String::new();
    for report in reports {
        out.push_str(&serde_json::to_string(report).expect("report serialization cannot fail"));
        out.push('\n');
    }
    out
}

/// Parses JSON Lines produced by [`reports_jsonl`], validating every
/// report. Blank lines are ignored.
pub fn parse_reports_jsonl(text: &str) -> Result<Vec<InspectionReport>, ReportError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let report: InspectionReport =
            serde_json::from_str(line).map_err(|e| ReportError::Json {
                line: idx + 1,
                message: e.to_string(),
            })?;
        report.validate().map_err(|e| ReportError::Line {
            line: idx + 1,
            source: Box::new(e),
        })?;
        out.push(report);
    }
    Ok(out)
}

/// Builds the removal event log for a batch: one `REMOVE <board> <time>`
/// line per defective board, stamped with consecutive timestamps starting
/// at `start_timestamp` so a fixed start yields identical logs.
pub fn event_log(reports: &[InspectionReport], start_timestamp: u64) -> String {
    let mut out = String::new();
    let mut ts = start_timestamp;
    for report in reports {
        if let Some(line) = report.event_log_line(ts) {
            out.push_str(&line);
            out.push('\n');
            ts += 1;
        }
    }
    out
}
