//! Ingestion and evaluation for paired-image defect datasets laid out
//! DeepPCB-style: each sample couples a test image, a defect-free
//! template image, and a text file of annotated defect boxes. Evaluation
//! aligns the pair, thresholds their difference, groups the residue into
//! blobs, and scores the predicted boxes against the annotations by
//! intersection-over-union.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::imgcore::{decode_image, GrayImage};
use crate::matching::{ncc_score_at, Template};

/// Errors from dataset ingestion or evaluation. Filesystem problems are
/// captured as path + message so errors stay comparable in tests.
#[derive(Debug, Error, PartialEq)]
pub enum DeepPcbError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Decode { path: String, message: String },
    #[error("{path}: image is not grayscale")]
    NotGray { path: String },
    #[error("{base}: missing companion image {missing}")]
    MissingPair { base: String, missing: String },
    #[error("{file} line {line}: {reason}")]
    Annotation {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("{base}: test image is {test_w}x{test_h} but template is {temp_w}x{temp_h}")]
    DimensionMismatch {
        base: String,
        test_w: u32,
        test_h: u32,
        temp_w: u32,
        temp_h: u32,
    },
    #[error("no samples to evaluate")]
    NoSamples,
    #[error("invalid evaluation configuration: {reason}")]
    Config { reason: String },
}

fn io_err(path: &Path, e: std::io::Error) -> DeepPcbError {
    DeepPcbError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// An axis-aligned box in image coordinates: `x` is the column, `y` the
/// row, with half-open extents `[x1, x2) x [y1, y2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BBox {
    pub x1: u32,
    pub y1: u32,
    pub x2: u32,
    pub y2: u32,
}

impl BBox {
    pub fn width(&self) -> u32 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> u32 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    /// Intersection area over union area, 0 when disjoint.
    pub fn iou(&self, other: &BBox) -> f64 {
        let iw = self.x2.min(other.x2).saturating_sub(self.x1.max(other.x1)) as u64;
        let ih = self.y2.min(other.y2).saturating_sub(self.y1.max(other.y1)) as u64;
        let inter = iw * ih;
        if inter == 0 {
            return 0.0;
        }
        let union = self.area() + other.area() - inter;
        inter as f64 / union as f64
    }
}

/// One annotated defect: its box and the dataset's 1-6 class code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub bbox: BBox,
    pub class_id: u8,
}

/// One dataset sample: the image pair on disk plus its parsed
/// annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct DeepPcbSample {
    /// Annotation file stem, e.g. `"00041000"`.
    pub base: String,
    pub test_path: PathBuf,
    pub template_path: PathBuf,
    pub annotations: Vec<Annotation>,
}

/// Everything ingestion found, plus human-readable warnings for
/// conditions that are odd but not fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct DeepPcbIngest {
    pub samples: Vec<DeepPcbSample>,
    pub warnings: Vec<String>,
}

/// Knobs for pair evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeepPcbConfig {
    /// Maximum per-axis shift tried when aligning test to template.
    pub align_radius: u32,
    /// Minimum absolute gray difference that counts as residue.
    pub diff_threshold: u8,
    /// Minimum blob size (pixels) that becomes a predicted box.
    pub min_blob_px: usize,
    /// Minimum IoU for a prediction to claim an annotation.
    pub iou_threshold: f64,
}

impl Default for DeepPcbConfig {
    fn default() -> Self {
        Self {
            align_radius: 4,
            diff_threshold: 60,
            min_blob_px: 12,
            iou_threshold: 0.3,
        }
    }
}

impl DeepPcbConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.align_radius > 64 {
            return Err(format!("align radius {} exceeds 64", self.align_radius));
        }
        if self.min_blob_px == 0 {
            return Err("minimum blob size must be at least 1".to_string());
        }
        if !self.iou_threshold.is_finite() || !(0.0..=1.0).contains(&self.iou_threshold) {
            return Err(format!(
                "IoU threshold {} must lie in [0, 1]",
                self.iou_threshold
            ));
        }
        Ok(())
    }
}

/// Per-sample evaluation outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleEval {
    pub base: String,
    /// Predicted defect boxes, in reading order.
    pub predictions: Vec<BBox>,
    pub annotation_count: usize,
    /// Predictions that claimed an annotation at or above the IoU
    /// threshold.
    pub matched: usize,
    /// Mean IoU over matched pairs, 0 when nothing matched.
    pub mean_matched_iou: f64,
}

/// Whole-dataset evaluation: per-sample details plus pooled precision
/// and recall (vacuously 1 when there is nothing to divide by).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeepPcbEval {
    pub samples: Vec<SampleEval>,
    pub precision: f64,
    pub recall: f64,
}

/// Parses annotation text: one `x1 y1 x2 y2 class_id` per line, boxes
/// half-open and bounded by `width x height`, class codes 1-6. Blank
/// lines are ignored. `source` names the file in errors.
pub fn parse_annotations(
    text: &str,
    width: u32,
    height: u32,
    source: &str,
) -> Result<Vec<Annotation>, DeepPcbError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let fail = |reason: String| DeepPcbError::Annotation {
            file: source.to_string(),
            line,
            reason,
        };
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let [x1, y1, x2, y2, class_id] = fields[..] else {
            return Err(fail(format!("expected 5 fields, got {}", fields.len())));
        };
        let num = |name: &str, s: &str| -> Result<u32, DeepPcbError> {
            s.parse()
                .map_err(|_| fail(format!("{name} {s:?} is not a whole number")))
        };
        let bbox = BBox {
            x1: num("x1", x1)?,
            y1: num("y1", y1)?,
            x2: num("x2", x2)?,
            y2: num("y2", y2)?,
        };
        if bbox.x1 >= bbox.x2 || bbox.y1 >= bbox.y2 {
            return Err(fail(format!(
                "box ({},{})-({},{}) is empty",
                bbox.x1, bbox.y1, bbox.x2, bbox.y2
            )));
        }
        if bbox.x2 > width || bbox.y2 > height {
            return Err(fail(format!(
                "box ({},{})-({},{}) exceeds the {width}x{height} image",
                bbox.x1, bbox.y1, bbox.x2, bbox.y2
            )));
        }
        let class_id: u8 = class_id
            .parse()
            .map_err(|_| fail(format!("class id {class_id:?} is not a whole number")))?;
        if !(1..=6).contains(&class_id) {
            return Err(fail(format!("class id {class_id} outside 1..=6")));
        }
        out.push(Annotation { bbox, class_id });
    }
    Ok(out)
}

fn decode_gray_file(path: &Path) -> Result<GrayImage, DeepPcbError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let (decoded, _) = decode_image(&bytes).map_err(|e| DeepPcbError::Decode {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    decoded
        .as_gray()
        .cloned()
        .ok_or_else(|| DeepPcbError::NotGray {
            path: path.display().to_string(),
        })
}

fn collect_annotation_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), DeepPcbError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(|e| io_err(dir, e))?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_annotation_files(&path, out)?;
        } else if path.extension().is_some_and(|ext| ext == "txt") {
            out.push(path);
        }
    }
    Ok(())
}

/// Scans `root` recursively for annotation files and assembles samples.
///
/// Every `<base>.txt` must sit beside `<base>_test.pgm` and
/// `<base>_temp.pgm`; the pair must decode as grayscale with equal sizes,
/// and the annotations must fit the test image. Files are visited in
/// path order, so the sample list is stable. An empty tree is not an
/// error, just a warning.
pub fn ingest_deeppcb(root: &Path) -> Result<DeepPcbIngest, DeepPcbError> {
    let mut files = Vec::new();
    collect_annotation_files(root, &mut files)?;
    let mut warnings = Vec::new();
    if files.is_empty() {
        warnings.push(format!(
            "no annotation files found under {}",
            root.display()
        ));
    }
    let mut samples = Vec::new();
    for ann_path in files {
        let base = ann_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let dir = ann_path.parent().unwrap_or(Path::new(""));
        let test_path = dir.join(format!("{base}_test.pgm"));
        let template_path = dir.join(format!("{base}_temp.pgm"));
        for required in [&test_path, &template_path] {
            if !required.is_file() {
                return Err(DeepPcbError::MissingPair {
                    base: base.clone(),
                    missing: required.display().to_string(),
                });
            }
        }
        let test = decode_gray_file(&test_path)?;
        let template = decode_gray_file(&template_path)?;
        if (test.width(), test.height()) != (template.width(), template.height()) {
            return Err(DeepPcbError::DimensionMismatch {
                base,
                test_w: test.width(),
                test_h: test.height(),
                temp_w: template.width(),
                temp_h: template.height(),
            });
        }
        let text = fs::read_to_string(&ann_path).map_err(|e| io_err(&ann_path, e))?;
        let annotations = parse_annotations(
            &text,
            test.width(),
            test.height(),
            &ann_path.display().to_string(),
        )?;
        samples.push(DeepPcbSample {
            base,
            test_path,
            template_path,
            annotations,
        });
    }
    Ok(DeepPcbIngest { samples, warnings })
}

/// Best (row, col) shift of the test image relative to the template,
/// found by correlating the template's interior against the test within
/// the radius. Falls back to no shift when the template is too small or
/// featureless to correlate.
fn best_alignment(test: &GrayImage, template: &GrayImage, radius: u32) -> (i64, i64) {
    let m = radius;
    if m == 0 || template.width() <= 2 * m || template.height() <= 2 * m {
        return (0, 0);
    }
    let patch = GrayImage::from_fn(template.width() - 2 * m, template.height() - 2 * m, |r, c| {
        template.at(r + m, c + m)
    });
    let tmpl = Template::new(patch);
    if tmpl.centered_norm() == 0.0 {
        return (0, 0);
    }
    let mut best = (f64::NEG_INFINITY, (0i64, 0i64));
    for dy in -(m as i64)..=m as i64 {
        for dx in -(m as i64)..=m as i64 {
            let at = ((m as i64 + dx) as u32, (m as i64 + dy) as u32);
            let score = ncc_score_at(test, &tmpl, at)
                .expect("window stays inside equal-size images");
            if score > best.0 {
                best = (score, (dy, dx));
            }
        }
    }
    best.1
}

/// Thresholded absolute difference between the aligned pair, grouped
/// into 8-connected blobs; every blob of at least `min_blob_px` pixels
/// becomes a predicted box in test-image coordinates.
fn predict_boxes(
    test: &GrayImage,
    template: &GrayImage,
    shift: (i64, i64),
    cfg: &DeepPcbConfig,
) -> Vec<BBox> {
    let (dy, dx) = shift;
    let w = test.width() as i64;
    let h = test.height() as i64;
    let mut hot = vec![false; (w * h) as usize];
    for r in 0..h {
        let tr = r - dy;
        if !(0..h).contains(&tr) {
            continue;
        }
        for c in 0..w {
            let tc = c - dx;
            if !(0..w).contains(&tc) {
                continue;
            }
            let a = test.at(r as u32, c as u32) as i16;
            let b = template.at(tr as u32, tc as u32) as i16;
            if (a - b).unsigned_abs() > cfg.diff_threshold as u16 {
                hot[(r * w + c) as usize] = true;
            }
        }
    }

    let mut boxes = Vec::new();
    let mut visited = vec![false; hot.len()];
    let mut queue = Vec::new();
    for start in 0..hot.len() {
        if !hot[start] || visited[start] {
            continue;
        }
        visited[start] = true;
        queue.clear();
        queue.push(start);
        let mut members = Vec::new();
        while let Some(idx) = queue.pop() {
            members.push(idx);
            let (r, c) = (idx as i64 / w, idx as i64 % w);
            for nr in (r - 1)..=(r + 1) {
                for nc in (c - 1)..=(c + 1) {
                    if (0..h).contains(&nr) && (0..w).contains(&nc) {
                        let ni = (nr * w + nc) as usize;
                        if hot[ni] && !visited[ni] {
                            visited[ni] = true;
                            queue.push(ni);
                        }
                    }
                }
            }
        }
        if members.len() < cfg.min_blob_px {
            continue;
        }
        let rows = members.iter().map(|&i| i as i64 / w);
        let cols = members.iter().map(|&i| i as i64 % w);
        boxes.push(BBox {
            x1: cols.clone().min().unwrap() as u32,
            y1: rows.clone().min().unwrap() as u32,
            x2: cols.max().unwrap() as u32 + 1,
            y2: rows.max().unwrap() as u32 + 1,
        });
    }
    boxes.sort_by_key(|b| (b.y1, b.x1, b.y2, b.x2));
    boxes
}

/// Greedy IoU matching: repeatedly pair the highest-IoU remaining
/// (prediction, annotation) couple at or above the threshold. Returns
/// the matched pair count and their IoU sum.
fn greedy_match(predictions: &[BBox], annotations: &[Annotation], threshold: f64) -> (usize, f64) {
    let mut pred_used = vec![false; predictions.len()];
    let mut ann_used = vec![false; annotations.len()];
    let mut matched = 0;
    let mut iou_sum = 0.0;
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, p) in predictions.iter().enumerate() {
            if pred_used[i] {
                continue;
            }
            for (j, a) in annotations.iter().enumerate() {
                if ann_used[j] {
                    continue;
                }
                let iou = p.iou(&a.bbox);
                if iou >= threshold && best.is_none_or(|(b, _, _)| iou > b) {
                    best = Some((iou, i, j));
                }
            }
        }
        let Some((iou, i, j)) = best else {
            return (matched, iou_sum);
        };
        pred_used[i] = true;
        ann_used[j] = true;
        matched += 1;
        iou_sum += iou;
    }
}

/// Evaluates every sample: align, diff, blob, and score against the
/// annotations. Precision and recall are pooled over all samples.
pub fn evaluate_deeppcb(
    samples: &[DeepPcbSample],
    cfg: &DeepPcbConfig,
) -> Result<DeepPcbEval, DeepPcbError> {
    cfg.validate()
        .map_err(|reason| DeepPcbError::Config { reason })?;
    if samples.is_empty() {
        return Err(DeepPcbError::NoSamples);
    }
    let mut evals = Vec::new();
    let mut total_predictions = 0usize;
    let mut total_annotations = 0usize;
    let mut total_matched = 0usize;
    for sample in samples {
        let test = decode_gray_file(&sample.test_path)?;
        let template = decode_gray_file(&sample.template_path)?;
        if (test.width(), test.height()) != (template.width(), template.height()) {
            return Err(DeepPcbError::DimensionMismatch {
                base: sample.base.clone(),
                test_w: test.width(),
                test_h: test.height(),
                temp_w: template.width(),
                temp_h: template.height(),
            });
        }
        let shift = best_alignment(&test, &template, cfg.align_radius);
        let predictions = predict_boxes(&test, &template, shift, cfg);
        let (matched, iou_sum) = greedy_match(&predictions, &sample.annotations, cfg.iou_threshold);
        total_predictions += predictions.len();
        total_annotations += sample.annotations.len();
        total_matched += matched;
        evals.push(SampleEval {
            base: sample.base.clone(),
            mean_matched_iou: if matched == 0 { 0.0 } else { iou_sum / matched as f64 },
            annotation_count: sample.annotations.len(),
            matched,
            predictions,
        });
    }
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    Ok(DeepPcbEval {
        samples: evals,
        precision: ratio(total_matched, total_predictions),
        recall: ratio(total_matched, total_annotations),
    })
}
