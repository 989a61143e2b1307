//! Ant-colony optimization: probabilistic path construction over a node
//! graph with pheromone evaporation and deposit, plus two adapters — a
//! small-graph tour search used for validation and a gray-level
//! multi-threshold selector for segmenting defect images.

mod threshold;
mod tour;

pub use threshold::{threshold_adapter, ThresholdProblem};
pub use tour::TourProblem;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Errors raised by colony construction and runs.
#[derive(Debug, Error, PartialEq)]
pub enum AcoError {
    /// Every candidate weight vanished, so no move can be drawn.
    #[error("all transition weights are zero; no move can be sampled")]
    ZeroDenominator,
    /// More thresholds requested than distinct gray levels present.
    #[error("{k} thresholds requested but the histogram holds only {distinct} distinct levels")]
    InfeasibleK { k: usize, distinct: usize },
    /// The problem exposes no nodes.
    #[error("problem has no nodes")]
    EmptyProblem,
    /// A parameter violates its stated domain.
    #[error("invalid parameter: {0}")]
    BadParams(&'static str),
    /// A heuristic entry is non-positive or non-finite.
    #[error("heuristic eta({0},{1}) must be positive and finite")]
    BadHeuristic(usize, usize),
}

/// Colony parameters. `alpha` and `beta` weigh pheromone against
/// heuristic in the transition rule; `rho` is the evaporation rate;
/// `big_h` the total deposit an ant spreads over its path; `q0` an
/// optional greedy-exploitation probability (0 disables it, the default).
#[derive(Debug, Clone, PartialEq)]
pub struct AcoParams {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub big_h: f64,
    pub ants: u32,
    pub iterations: u32,
    pub tau0: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub q0: f64,
    pub seed: u64,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 2.0,
            rho: 0.5,
            big_h: 1.0,
            ants: 20,
            iterations: 50,
            tau0: 1.0,
            tau_min: 1e-4,
            tau_max: 10.0,
            q0: 0.0,
            seed: 0,
        }
    }
}

impl AcoParams {
    /// Checks every stated domain: `0 < rho < 1`, at least one ant and
    /// iteration, `0 < tau_min <= tau0 <= tau_max`, non-negative finite
    /// exponents, positive deposit, `q0` in `[0, 1)`.
    pub fn validate(&self) -> Result<(), AcoError> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(AcoError::BadParams("rho must lie in (0, 1)"));
        }
        if self.ants == 0 {
            return Err(AcoError::BadParams("need at least one ant"));
        }
        if self.iterations == 0 {
            return Err(AcoError::BadParams("need at least one iteration"));
        }
        if !(self.tau_min > 0.0 && self.tau_min <= self.tau0 && self.tau0 <= self.tau_max) {
            return Err(AcoError::BadParams(
                "pheromone bounds must satisfy 0 < tau_min <= tau0 <= tau_max",
            ));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0)
            || !(self.beta.is_finite() && self.beta >= 0.0)
        {
            return Err(AcoError::BadParams("exponents must be finite and >= 0"));
        }
        if !(self.big_h.is_finite() && self.big_h > 0.0) {
            return Err(AcoError::BadParams("deposit total must be positive"));
        }
        if !(0.0..1.0).contains(&self.q0) {
            return Err(AcoError::BadParams("q0 must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// The colony's shared memory: a symmetric pheromone matrix and a fixed
/// heuristic matrix over node pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneState {
    n: usize,
    tau: Vec<f64>,
    eta: Vec<f64>,
}

impl PheromoneState {
    /// A fresh state with every pheromone at `tau0` and the given
    /// heuristic, which must be positive and finite off the diagonal
    /// (the diagonal is never consulted).
    pub fn new(
        n: usize,
        tau0: f64,
        mut eta: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, AcoError> {
        if n == 0 {
            return Err(AcoError::EmptyProblem);
        }
        let mut eta_mat = vec![1.0; n * n];
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let e = eta(x, y);
                if !(e.is_finite() && e > 0.0) {
                    return Err(AcoError::BadHeuristic(x, y));
                }
                eta_mat[x * n + y] = e;
            }
        }
        Ok(Self {
            n,
            tau: vec![tau0; n * n],
            eta: eta_mat,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn tau(&self, x: usize, y: usize) -> f64 {
        self.tau[x * self.n + y]
    }

    pub fn eta(&self, x: usize, y: usize) -> f64 {
        self.eta[x * self.n + y]
    }

    /// Sets the pheromone on the undirected edge `{x, y}`.
    pub fn set_tau(&mut self, x: usize, y: usize, value: f64) {
        self.tau[x * self.n + y] = value;
        self.tau[y * self.n + x] = value;
    }
}

/// One ant's completed walk: the ordered nodes it visited, the cost of
/// that path, the nodes it never reached, and whether the closing edge
/// back to the start was traversed (tour problems) or not (open paths).
#[derive(Debug, Clone, PartialEq)]
pub struct AntPath {
    pub visited: Vec<usize>,
    pub cost: f64,
    pub tabu: BTreeSet<usize>,
    pub cyclic: bool,
}

impl AntPath {
    /// The undirected edges the ant traversed, closing edge included for
    /// cyclic paths.
    fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> =
            self.visited.windows(2).map(|w| (w[0], w[1])).collect();
        if self.cyclic && self.visited.len() > 1 {
            edges.push((*self.visited.last().unwrap(), self.visited[0]));
        }
        edges
    }
}

/// The transition rule: for each unvisited node `y`,
/// `P(y) = tau(x,y)^alpha * eta(x,y)^beta / sum over unvisited`, and 0
/// for every other node. Returned as a dense vector indexed by node.
pub fn transition_probabilities(
    state: &PheromoneState,
    current: usize,
    unvisited: &BTreeSet<usize>,
    params: &AcoParams,
) -> Result<Vec<f64>, AcoError> {
    let mut probs = vec![0.0; state.n];
    let mut total = 0.0;
    for &y in unvisited {
        let w = state.tau(current, y).powf(params.alpha) * state.eta(current, y).powf(params.beta);
        probs[y] = w;
        total += w;
    }
    if !(total.is_finite() && total > 0.0) {
        return Err(AcoError::ZeroDenominator);
    }
    for p in &mut probs {
        *p /= total;
    }
    Ok(probs)
}

/// One pheromone update: every entry evaporates by `(1 - rho)`, each
/// ant deposits `big_h / cost` on every edge it traversed, and the
/// result is clamped into `[tau_min, tau_max]`.
pub fn update_pheromones(state: &mut PheromoneState, completed: &[AntPath], params: &AcoParams) {
    for t in &mut state.tau {
        *t *= 1.0 - params.rho;
    }
    for path in completed {
        if path.cost <= 0.0 {
            continue; // a free path carries no meaningful deposit scale
        }
        let deposit = params.big_h / path.cost;
        for (a, b) in path.edges() {
            let updated = state.tau(a, b) + deposit;
            state.set_tau(a, b, updated);
        }
    }
    for t in &mut state.tau {
        *t = t.clamp(params.tau_min, params.tau_max);
    }
}

/// A problem the colony can walk: a node set with pairwise heuristic
/// desirability, a path length to build, and a cost for finished paths.
pub trait AcoProblem {
    fn node_count(&self) -> usize;
    /// Nodes each ant visits per path; at most `node_count`.
    fn path_len(&self) -> usize;
    /// Desirability of stepping from `from` to `to`; must be positive and
    /// finite for `from != to`.
    fn heuristic(&self, from: usize, to: usize) -> f64;
    /// Cost of a completed path (lower is better).
    fn path_cost(&self, visited: &[usize]) -> f64;
    /// Whether the path implicitly returns to its start.
    fn cyclic(&self) -> bool;
}

/// One row of the convergence trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: u32,
    /// Best cost seen in any iteration up to and including this one.
    pub best_cost: f64,
    /// Mean cost over this iteration's ants.
    pub mean_cost: f64,
}

/// Outcome of a colony run: the best path ever built and the
/// per-iteration trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AcoRun {
    pub best: AntPath,
    pub trace: Vec<TraceRow>,
}

impl AcoRun {
    /// The trace as CSV with header `iteration,best_cost,mean_cost`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,best_cost,mean_cost\n");
        for row in &self.trace {
            out.push_str(&format!(
                "{},{},{}\n",
                row.iteration, row.best_cost, row.mean_cost
            ));
        }
        out
    }
}

fn roulette(probs: &[f64], r: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
            acc += p;
            if r < acc {
                return i;
            }
        }
    }
    // Rounding left a sliver above the accumulated mass; take the final
    // candidate.
    last_positive
}

/// Runs the colony: per iteration each ant starts on a uniformly drawn
/// node and extends its path by roulette sampling of the transition rule
/// (or, with probability `q0`, by greedy argmax), paths are costed, and
/// pheromones evaporate and absorb deposits. Fully reproducible from
/// `params.seed`; ants run sequentially so scheduling cannot perturb the
/// result.
pub fn run_aco(problem: &dyn AcoProblem, params: &AcoParams) -> Result<AcoRun, AcoError> {
    params.validate()?;
    let n = problem.node_count();
    if n == 0 {
        return Err(AcoError::EmptyProblem);
    }
    let path_len = problem.path_len().min(n).max(1);
    let mut state = PheromoneState::new(n, params.tau0, |x, y| problem.heuristic(x, y))?;
    // A named stream cipher keeps seeded runs stable across toolchain and
    // dependency upgrades, which the determinism guarantee leans on.
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<AntPath> = None;
    let mut trace = Vec::with_capacity(params.iterations as usize);

    for iteration in 0..params.iterations {
        let mut paths = Vec::with_capacity(params.ants as usize);
        for _ in 0..params.ants {
            let start = rng.random_range(0..n);
            let mut visited = vec![start];
            let mut unvisited: BTreeSet<usize> = (0..n).filter(|&v| v != start).collect();
            while visited.len() < path_len {
                let current = *visited.last().unwrap();
                let probs = transition_probabilities(&state, current, &unvisited, params)?;
                let next = if params.q0 > 0.0 && rng.random::<f64>() < params.q0 {
                    // Greedy exploitation: highest-weight candidate,
                    // lowest index on ties.
                    probs
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
                        .map(|(i, _)| i)
                        .unwrap()
                } else {
                    roulette(&probs, rng.random::<f64>())
                };
                visited.push(next);
                unvisited.remove(&next);
            }
            let cost = problem.path_cost(&visited);
            paths.push(AntPath {
                visited,
                cost,
                tabu: unvisited,
                cyclic: problem.cyclic(),
            });
        }
        update_pheromones(&mut state, &paths, params);

        let mean_cost = paths.iter().map(|p| p.cost).sum::<f64>() / paths.len() as f64;
        for path in paths {
            // Strict improvement keeps the earliest best, so reruns with
            // the same seed reproduce the same winner.
            if best.as_ref().is_none_or(|b| path.cost < b.cost) {
                best = Some(path);
            }
        }
        trace.push(TraceRow {
            iteration,
            best_cost: best.as_ref().unwrap().cost,
            mean_cost,
        });
    }
    Ok(AcoRun {
        best: best.unwrap(),
        trace,
    })
}
