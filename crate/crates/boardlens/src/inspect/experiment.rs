//! Batched robustness runs: a plan names groups of synthetic boards
//! (defect-free, defective, off-color), every board goes through the
//! inspection pipeline, and the verdicts are scored against the
//! generator's ground truth into a per-group accuracy table.

use rayon::prelude::*;
use thiserror::Error;

use super::config::PipelineConfig;
use super::pipeline::{run_pipeline, Golden, PipelineError};
use super::report::Verdict;
use super::synth::{add_gaussian_noise, generate_board, BoardKind};

/// Errors from reading an experiment plan.
#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    /// The line is not `key = value`.
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    /// The key is not part of the plan format.
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    /// A single-valued key was assigned twice.
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    /// The value could not be parsed for its key.
    #[error("line {line}: bad value for {key:?}: {reason}")]
    BadValue {
        line: usize,
        key: &'static str,
        reason: String,
    },
    /// The assembled plan is unusable.
    #[error("invalid plan: {reason}")]
    Invalid { reason: String },
}

/// Errors from running an experiment.
#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// How many boards of each kind one group contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSpec {
    pub standard: u32,
    pub defect: u32,
    pub color_diff: u32,
}

impl GroupSpec {
    pub fn total(&self) -> u64 {
        self.standard as u64 + self.defect as u64 + self.color_diff as u64
    }
}

/// A parsed experiment plan: the groups to run, how many times to repeat
/// the whole set, the master seed, and the pixel noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub groups: Vec<GroupSpec>,
    pub repetitions: u32,
    pub seed: u64,
    pub noise_sigma: f64,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            groups: Vec::new(),
            repetitions: 1,
            seed: 0,
            noise_sigma: 0.0,
        }
    }
}

impl ExperimentPlan {
    /// A plan is runnable when it repeats at least once, carries a finite
    /// nonnegative noise level, and names at least one board.
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.repetitions == 0 {
            return Err(PlanError::Invalid {
                reason: "repetitions must be at least 1".to_string(),
            });
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(PlanError::Invalid {
                reason: format!(
                    "noise sigma {} must be finite and nonnegative",
                    self.noise_sigma
                ),
            });
        }
        if self.groups.is_empty() {
            return Err(PlanError::Invalid {
                reason: "plan names no groups".to_string(),
            });
        }
        if self.groups.iter().map(GroupSpec::total).sum::<u64>() == 0 {
            return Err(PlanError::Invalid {
                reason: "every group is empty".to_string(),
            });
        }
        Ok(())
    }
}

/// Parses plan text: one `key = value` per line, `#` comments and blank
/// lines ignored. `seed`, `repetitions`, and `noise_sigma` may each
/// appear once; every `group = STANDARD DEFECT COLOR_DIFF` line appends a
/// group.
pub fn parse_plan(text: &str) -> Result<ExperimentPlan, PlanError> {
    let mut plan = ExperimentPlan::default();
    let mut seen = [false; 3]; // seed, repetitions, noise_sigma
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(PlanError::Syntax { line });
        };
        let key = key.trim();
        let value = value.trim();
        let mut claim = |slot: usize| {
            if seen[slot] {
                Err(PlanError::DuplicateKey {
                    line,
                    key: key.to_string(),
                })
            } else {
                seen[slot] = true;
                Ok(())
            }
        };
        match key {
            "seed" => {
                claim(0)?;
                plan.seed = value.parse().map_err(|_| PlanError::BadValue {
                    line,
                    key: "seed",
                    reason: format!("{value:?} is not a whole number"),
                })?;
            }
            "repetitions" => {
                claim(1)?;
                plan.repetitions = value.parse().map_err(|_| PlanError::BadValue {
                    line,
                    key: "repetitions",
                    reason: format!("{value:?} is not a whole number"),
                })?;
            }
            "noise_sigma" => {
                claim(2)?;
                plan.noise_sigma = value.parse().map_err(|_| PlanError::BadValue {
                    line,
                    key: "noise_sigma",
                    reason: format!("{value:?} is not a number"),
                })?;
            }
            "group" => {
                let counts: Vec<&str> = value.split_whitespace().collect();
                let [standard, defect, color_diff] = counts[..] else {
                    return Err(PlanError::BadValue {
                        line,
                        key: "group",
                        reason: format!(
                            "expected three counts `STANDARD DEFECT COLOR_DIFF`, got {}",
                            counts.len()
                        ),
                    });
                };
                let parse = |s: &str| -> Result<u32, PlanError> {
                    s.parse().map_err(|_| PlanError::BadValue {
                        line,
                        key: "group",
                        reason: format!("{s:?} is not a whole number"),
                    })
                };
                plan.groups.push(GroupSpec {
                    standard: parse(standard)?,
                    defect: parse(defect)?,
                    color_diff: parse(color_diff)?,
                });
            }
            other => {
                return Err(PlanError::UnknownKey {
                    line,
                    key: other.to_string(),
                });
            }
        }
    }
    plan.validate()?;
    Ok(plan)
}

/// Scored outcome for one group, aggregated over every repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupRow {
    /// 1-based group number, matching the plan's order.
    pub group: usize,
    pub standard_n: u64,
    pub standard_correct: u64,
    pub defect_n: u64,
    pub defect_correct: u64,
    pub color_diff_n: u64,
    pub color_diff_correct: u64,
}

impl GroupRow {
    pub fn total(&self) -> u64 {
        self.standard_n + self.defect_n + self.color_diff_n
    }

    pub fn correct(&self) -> u64 {
        self.standard_correct + self.defect_correct + self.color_diff_correct
    }

    /// Fraction of boards judged correctly; an empty row counts as
    /// vacuously perfect.
    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            1.0
        } else {
            self.correct() as f64 / self.total() as f64
        }
    }
}

/// Per-group accuracy table for one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    pub rows: Vec<GroupRow>,
}

impl ExperimentTable {
    pub fn total(&self) -> u64 {
        self.rows.iter().map(GroupRow::total).sum()
    }

    pub fn correct(&self) -> u64 {
        self.rows.iter().map(GroupRow::correct).sum()
    }

    pub fn overall_accuracy(&self) -> f64 {
        if self.total() == 0 {
            1.0
        } else {
            self.correct() as f64 / self.total() as f64
        }
    }

    /// Renders the table as CSV: one row per group plus an `overall` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "group,standard_n,standard_correct,defect_n,defect_correct,\
             color_diff_n,color_diff_correct,accuracy\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.group,
                row.standard_n,
                row.standard_correct,
                row.defect_n,
                row.defect_correct,
                row.color_diff_n,
                row.color_diff_correct,
                row.accuracy()
            ));
        }
        let sum = |f: fn(&GroupRow) -> u64| self.rows.iter().map(f).sum::<u64>();
        out.push_str(&format!(
            "overall,{},{},{},{},{},{},{}\n",
            sum(|r| r.standard_n),
            sum(|r| r.standard_correct),
            sum(|r| r.defect_n),
            sum(|r| r.defect_correct),
            sum(|r| r.color_diff_n),
            sum(|r| r.color_diff_correct),
            self.overall_accuracy()
        ));
        out
    }
}

/// One board's slot in the flattened work list.
struct WorkItem {
    group: usize,
    kind: BoardKind,
    board_seed: u64,
    noise_seed: u64,
}

/// The next value of the SplitMix64 stream, advancing `state`.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs every board the plan names through the pipeline and scores the
/// verdicts against ground truth.
///
/// Board seeds are drawn from a SplitMix64 stream keyed by the plan seed,
/// in a fixed flattening order (repetition, then group, then kind), so a
/// plan's results are reproducible regardless of worker scheduling.
pub fn run_experiment(
    plan: &ExperimentPlan,
    cfg: &PipelineConfig,
    golden: &Golden,
) -> Result<ExperimentTable, ExperimentError> {
    plan.validate()?;
    cfg.validate()
        .map_err(|e| PipelineError::Config(e.to_string()))?;

    let mut stream = plan.seed;
    let mut items = Vec::new();
    for _rep in 0..plan.repetitions {
        for (group, spec) in plan.groups.iter().enumerate() {
            for (kind, count) in [
                (BoardKind::Standard, spec.standard),
                (BoardKind::Defect, spec.defect),
                (BoardKind::ColorDiff, spec.color_diff),
            ] {
                for _ in 0..count {
                    let board_seed = splitmix64(&mut stream);
                    let noise_seed = splitmix64(&mut stream);
                    items.push(WorkItem {
                        group,
                        kind,
                        board_seed,
                        noise_seed,
                    });
                }
            }
        }
    }

    let outcomes: Result<Vec<(usize, BoardKind, bool)>, PipelineError> = items
        .par_iter()
        .map(|item| {
            let (board, truth) = generate_board(item.kind, item.board_seed);
            let board = if plan.noise_sigma > 0.0 {
                add_gaussian_noise(&board, plan.noise_sigma, item.noise_seed)
            } else {
                board
            };
            let id = format!("g{}-{}-{:016x}", item.group + 1, item.kind, item.board_seed);
            let report = run_pipeline(&id, &board, cfg, Some(golden))?;
            let correct = (report.verdict == Verdict::Qualified) == truth.expect_qualified();
            Ok((item.group, item.kind, correct))
        })
        .collect();

    let mut rows: Vec<GroupRow> = (0..plan.groups.len())
        .map(|i| GroupRow {
            group: i + 1,
            standard_n: 0,
            standard_correct: 0,
            defect_n: 0,
            defect_correct: 0,
            color_diff_n: 0,
            color_diff_correct: 0,
        })
        .collect();
    for (group, kind, correct) in outcomes? {
        let row = &mut rows[group];
        let (n, hits) = match kind {
            BoardKind::Standard => (&mut row.standard_n, &mut row.standard_correct),
            BoardKind::Defect => (&mut row.defect_n, &mut row.defect_correct),
            BoardKind::ColorDiff => (&mut row.color_diff_n, &mut row.color_diff_correct),
        };
        *n += 1;
        if correct {
            *hits += 1;
        }
    }
    Ok(ExperimentTable { rows })
}

#[cfg(test)]
mod tests {
    use super::super::synth::golden_board;
    use super::*;

    fn tiny_plan(noise_sigma: f64) -> ExperimentPlan {
        ExperimentPlan {
            groups: vec![GroupSpec {
                standard: 3,
                defect: 2,
                color_diff: 2,
            }],
            repetitions: 1,
            seed: 9,
            noise_sigma,
        }
    }

    fn reference() -> (PipelineConfig, Golden) {
        let cfg = PipelineConfig::default();
        let golden = Golden::from_board(&golden_board(), &cfg).unwrap();
        (cfg, golden)
    }

    #[test]
    fn plan_text_round_trips_values_and_groups() {
        let text = "\
# weekly robustness run
seed = 42
repetitions = 2
noise_sigma = 8

group = 150 50 50
group = 10 0 3
";
        let plan = parse_plan(text).unwrap();
        assert_eq!(
            plan,
            ExperimentPlan {
                groups: vec![
                    GroupSpec {
                        standard: 150,
                        defect: 50,
                        color_diff: 50
                    },
                    GroupSpec {
                        standard: 10,
                        defect: 0,
                        color_diff: 3
                    },
                ],
                repetitions: 2,
                seed: 42,
                noise_sigma: 8.0,
            }
        );
        assert_eq!(plan.groups[0].total(), 250);
    }

    #[test]
    fn plan_parse_errors_carry_line_numbers() {
        assert_eq!(
            parse_plan("group 1 2 3\n").unwrap_err(),
            PlanError::Syntax { line: 1 }
        );
        assert_eq!(
            parse_plan("sigma = 8\n").unwrap_err(),
            PlanError::UnknownKey {
                line: 1,
                key: "sigma".to_string()
            }
        );
        assert_eq!(
            parse_plan("seed = 1\nseed = 2\n").unwrap_err(),
            PlanError::DuplicateKey {
                line: 2,
                key: "seed".to_string()
            }
        );
        assert!(matches!(
            parse_plan("group = 1 2\n").unwrap_err(),
            PlanError::BadValue { line: 1, key: "group", .. }
        ));
        assert!(matches!(
            parse_plan("group = one 2 3\n").unwrap_err(),
            PlanError::BadValue { line: 1, key: "group", .. }
        ));
        assert!(matches!(
            parse_plan("noise_sigma = loud\ngroup = 1 0 0\n").unwrap_err(),
            PlanError::BadValue { line: 1, key: "noise_sigma", .. }
        ));
    }

    #[test]
    fn empty_or_zero_plans_are_invalid() {
        assert!(matches!(parse_plan(""), Err(PlanError::Invalid { .. })));
        assert!(matches!(
            parse_plan("group = 0 0 0\n"),
            Err(PlanError::Invalid { .. })
        ));
        assert!(matches!(
            parse_plan("repetitions = 0\ngroup = 1 1 1\n"),
            Err(PlanError::Invalid { .. })
        ));
        assert!(matches!(
            parse_plan("noise_sigma = -2\ngroup = 1 1 1\n"),
            Err(PlanError::Invalid { .. })
        ));
        // One empty group among useful ones is fine.
        parse_plan("group = 0 0 0\ngroup = 1 0 0\n").unwrap();
    }

    #[test]
    fn clean_run_scores_perfectly_and_renders_exact_csv() {
        let (cfg, golden) = reference();
        let table = run_experiment(&tiny_plan(0.0), &cfg, &golden).unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = table.rows[0];
        assert_eq!(
            (row.standard_n, row.defect_n, row.color_diff_n),
            (3, 2, 2)
        );
        assert_eq!(row.correct(), 7, "clean verdicts must all match truth");
        assert_eq!(table.overall_accuracy(), 1.0);
        assert_eq!(
            table.to_csv(),
            "group,standard_n,standard_correct,defect_n,defect_correct,\
             color_diff_n,color_diff_correct,accuracy\n\
             1,3,3,2,2,2,2,1\n\
             overall,3,3,2,2,2,2,1\n"
        );
    }

    #[test]
    fn noisy_run_still_scores_perfectly_on_a_small_batch() {
        let (cfg, golden) = reference();
        let plan = ExperimentPlan {
            groups: vec![GroupSpec {
                standard: 2,
                defect: 1,
                color_diff: 1,
            }],
            repetitions: 1,
            seed: 77,
            noise_sigma: 8.0,
        };
        let table = run_experiment(&plan, &cfg, &golden).unwrap();
        assert_eq!(table.total(), 4);
        assert_eq!(table.correct(), 4);
    }

    #[test]
    fn repetitions_multiply_counts_and_runs_are_reproducible() {
        let (cfg, golden) = reference();
        let mut plan = tiny_plan(0.0);
        plan.repetitions = 2;
        let a = run_experiment(&plan, &cfg, &golden).unwrap();
        assert_eq!(a.rows[0].total(), 14);
        let b = run_experiment(&plan, &cfg, &golden).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn group_rows_keep_plan_order_and_accuracy_is_vacuous_when_empty() {
        let (cfg, golden) = reference();
        let plan = ExperimentPlan {
            groups: vec![
                GroupSpec {
                    standard: 0,
                    defect: 0,
                    color_diff: 0,
                },
                GroupSpec {
                    standard: 1,
                    defect: 0,
                    color_diff: 0,
                },
            ],
            repetitions: 1,
            seed: 5,
            noise_sigma: 0.0,
        };
        let table = run_experiment(&plan, &cfg, &golden).unwrap();
        assert_eq!(table.rows[0].total(), 0);
        assert_eq!(table.rows[0].accuracy(), 1.0);
        assert_eq!(table.rows[1].group, 2);
        assert_eq!(table.rows[1].total(), 1);
    }

    #[test]
    fn invalid_inputs_are_rejected_before_running() {
        let (cfg, golden) = reference();
        let empty = ExperimentPlan::default();
        assert!(matches!(
            run_experiment(&empty, &cfg, &golden),
            Err(ExperimentError::Plan(PlanError::Invalid { .. }))
        ));
        let bad_cfg = PipelineConfig {
            edge_tolerance: f64::NAN,
            ..cfg
        };
        assert!(matches!(
            run_experiment(&tiny_plan(0.0), &bad_cfg, &golden),
            Err(ExperimentError::Pipeline(PipelineError::Config(_)))
        ));
    }
}
