//! End-to-end board inspection: a configurable pipeline that normalizes
//! a frame, measures per-zone color statistics, and runs edge-count,
//! template-correlation, and barcode-presence checks against a reference
//! board, emitting a tagged verdict per board.
//!
//! Around the pipeline sit its supporting casts: a text configuration
//! format ([`PipelineConfig`]), JSON Lines reports and a removal event
//! log ([`InspectionReport`]), a deterministic synthetic board generator
//! for demos and robustness experiments ([`generate_board`]), batched
//! experiment runs scored against ground truth ([`run_experiment`]), and
//! ingestion plus evaluation of paired-image defect datasets
//! ([`ingest_deeppcb`], [`evaluate_deeppcb`]).

mod config;
mod deeppcb;
mod experiment;
mod pipeline;
mod report;
mod synth;

pub use config::{
    load_pipeline_config, parse_pipeline_config, BrightnessSource, ConfigError, ConfigLoadError,
    PipelineConfig, StageToggles,
};
pub use deeppcb::{
    evaluate_deeppcb, ingest_deeppcb, parse_annotations, Annotation, BBox, DeepPcbConfig,
    DeepPcbError, DeepPcbEval, DeepPcbIngest, DeepPcbSample, SampleEval,
};
pub use experiment::{
    parse_plan, run_experiment, ExperimentError, ExperimentPlan, ExperimentTable, GroupRow,
    GroupSpec, PlanError,
};
pub use pipeline::{classify_roi, letterbox, run_pipeline, Golden, PipelineError};
pub use report::{
    event_log, parse_reports_jsonl, reports_jsonl, DefectTag, FeatureStats, InspectionReport,
    ReportError, RoiFeatures, Verdict, REPORT_SCHEMA,
};
pub use synth::{
    add_gaussian_noise, generate_board, golden_board, layout, BoardKind, BoardLayout, DefectKind,
    GroundTruth, BOARD_SIDE,
};
