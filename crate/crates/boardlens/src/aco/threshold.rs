//! Gray-level threshold selection as a colony problem: nodes are the 256
//! gray levels, a path of `k` distinct levels is a candidate
//! multi-threshold segmentation, and the cost is the negated
//! between-class variance, so minimizing cost maximizes separability.

use crate::imgcore::between_class_variance;

use super::{AcoError, AcoProblem};

/// Multi-threshold selection over a gray histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdProblem {
    hist: [u64; 256],
    k: usize,
}

/// Builds the adapter: `k >= 1` thresholds over a histogram with more
/// than `k` distinct occupied levels (splitting into more classes than
/// distinct values is meaningless).
pub fn threshold_adapter(hist: &[u64; 256], k: usize) -> Result<ThresholdProblem, AcoError> {
    if k == 0 {
        return Err(AcoError::BadParams("need at least one threshold"));
    }
    let distinct = hist.iter().filter(|&&n| n > 0).count();
    if k >= distinct {
        return Err(AcoError::InfeasibleK { k, distinct });
    }
    Ok(ThresholdProblem { hist: *hist, k })
}

impl ThresholdProblem {
    /// The thresholds a finished path denotes: its levels in ascending
    /// order.
    pub fn thresholds_of(&self, visited: &[usize]) -> Vec<u8> {
        let mut levels: Vec<u8> = visited.iter().map(|&v| v as u8).collect();
        levels.sort_unstable();
        levels
    }
}

impl AcoProblem for ThresholdProblem {
    fn node_count(&self) -> usize {
        256
    }

    fn path_len(&self) -> usize {
        self.k
    }

    /// Nearby levels are discouraged so paths spread across the range.
    fn heuristic(&self, from: usize, to: usize) -> f64 {
        1.0 / (1.0 + (from as f64 - to as f64).abs())
    }

    fn path_cost(&self, visited: &[usize]) -> f64 {
        -between_class_variance(&self.hist, &self.thresholds_of(visited))
    }

    fn cyclic(&self) -> bool {
        false
    }
}
