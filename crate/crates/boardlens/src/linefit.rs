//! Robust straight-line fitting with Tukey reweighting, used to recover
//! boundary lines from noisy edge points while discounting outliers.
//!
//! Lines are fitted in total-least-squares sense (orthogonal distances),
//! so arbitrary orientations — including vertical — are handled uniformly.

use thiserror::Error;

/// Errors raised by line fitting.
#[derive(Debug, Error, PartialEq)]
pub enum LinefitError {
    /// Fewer than two points were supplied.
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    /// All points are coincident; every line through them fits equally.
    #[error("all points are coincident")]
    DegenerateInput,
    /// A coordinate is NaN or infinite.
    #[error("non-finite coordinate at point index {0}")]
    NonFiniteCoordinate(usize),
    /// A normal vector of length zero cannot define a line.
    #[error("line normal must be nonzero and finite")]
    BadNormal,
}

/// A line in normal form: the set of points `p` with `nx·px + ny·py = d`,
/// where `(nx, ny)` is a unit normal.
///
/// The representation is canonicalized (`ny > 0`, or `ny == 0` and
/// `nx > 0`) so equal lines compare equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line2D {
    nx: f64,
    ny: f64,
    d: f64,
}

impl Line2D {
    /// Builds a line from a (not necessarily unit) normal and offset;
    /// the stored form is normalized and sign-canonicalized.
    pub fn new(nx: f64, ny: f64, d: f64) -> Result<Self, LinefitError> {
        if !(nx.is_finite() && ny.is_finite() && d.is_finite()) {
            return Err(LinefitError::BadNormal);
        }
        let len = nx.hypot(ny);
        if len == 0.0 {
            return Err(LinefitError::BadNormal);
        }
        let (mut nx, mut ny, mut d) = (nx / len, ny / len, d / len);
        if ny < 0.0 || (ny == 0.0 && nx < 0.0) {
            nx = -nx;
            ny = -ny;
            d = -d;
        }
        Ok(Self { nx, ny, d })
    }

    /// The line through two distinct points.
    pub fn through(a: (f64, f64), b: (f64, f64)) -> Result<Self, LinefitError> {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        if !(dx.is_finite() && dy.is_finite()) {
            return Err(LinefitError::BadNormal);
        }
        if dx == 0.0 && dy == 0.0 {
            return Err(LinefitError::DegenerateInput);
        }
        // Normal is the direction rotated a quarter turn.
        let (nx, ny) = (-dy, dx);
        Line2D::new(nx, ny, nx * a.0 + ny * a.1)
    }

    pub fn nx(&self) -> f64 {
        self.nx
    }

    pub fn ny(&self) -> f64 {
        self.ny
    }

    /// The offset `d` of the normal form.
    pub fn offset(&self) -> f64 {
        self.d
    }

    /// Signed perpendicular distance; positive on the side the normal
    /// points toward.
    pub fn signed_distance(&self, p: (f64, f64)) -> f64 {
        self.nx * p.0 + self.ny * p.1 - self.d
    }

    /// Perpendicular distance from `p` to the line.
    pub fn distance(&self, p: (f64, f64)) -> f64 {
        self.signed_distance(p).abs()
    }
}

/// Reweighting schedule for the robust fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TukeySpec {
    tau: f64,
    max_iters: u32,
    tol: f64,
    classic_tukey: bool,
}

impl TukeySpec {
    /// Validates `tau > 0` (finite), `max_iters >= 1`, `tol >= 0` (finite).
    pub fn new(tau: f64, max_iters: u32, tol: f64) -> Result<Self, LinefitError> {
        if !(tau.is_finite() && tau > 0.0) || max_iters == 0 || !(tol.is_finite() && tol >= 0.0) {
            return Err(LinefitError::BadNormal);
        }
        Ok(Self {
            tau,
            max_iters,
            tol,
            classic_tukey: false,
        })
    }

    /// Switches the out-of-band branch from `tau/|delta|` to the classical
    /// biweight's hard zero, for comparison runs.
    pub fn with_classic_tukey(mut self, classic: bool) -> Self {
        self.classic_tukey = classic;
        self
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn max_iters(&self) -> u32 {
        self.max_iters
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn classic_tukey(&self) -> bool {
        self.classic_tukey
    }

    /// The weight assigned to a residual under this spec.
    pub fn weight(&self, delta: f64) -> f64 {
        if self.classic_tukey && delta.abs() > self.tau {
            0.0
        } else {
            tukey_weight(delta, self.tau)
        }
    }
}

impl Default for TukeySpec {
    /// `tau = 2` px, 20 iterations, tolerance `1e-6`, out-of-band branch
    /// as printed.
    fn default() -> Self {
        Self {
            tau: 2.0,
            max_iters: 20,
            tol: 1e-6,
            classic_tukey: false,
        }
    }
}

/// The Tukey weight of a residual `delta` at threshold `tau`:
/// `(1 - (delta/tau)^2)^2` for `|delta| <= tau`, else `tau/|delta|`.
///
/// Note the cusp this creates at `|delta| == tau`: the in-band branch
/// reaches 0 there while the out-of-band branch approaches 1. The form is
/// kept verbatim; [`TukeySpec::with_classic_tukey`] swaps the outer branch
/// for the classical hard zero.
///
/// Panics if `tau <= 0`.
pub fn tukey_weight(delta: f64, tau: f64) -> f64 {
    assert!(tau > 0.0, "tau must be positive, got {tau}");
    let d = delta.abs();
    if d <= tau {
        let r = 1.0 - (d / tau) * (d / tau);
        r * r
    } else {
        tau / d
    }
}

/// Result of a robust fit: the converged line, the weight of each input
/// point under that line, and the number of reweighted refits performed.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub line: Line2D,
    pub weights: Vec<f64>,
    pub iterations: u32,
}

fn check_points(points: &[(f64, f64)]) -> Result<(), LinefitError> {
    if points.len() < 2 {
        return Err(LinefitError::TooFewPoints(points.len()));
    }
    for (i, p) in points.iter().enumerate() {
        if !(p.0.is_finite() && p.1.is_finite()) {
            return Err(LinefitError::NonFiniteCoordinate(i));
        }
    }
    Ok(())
}

/// One weighted total-least-squares solve: weighted centroid plus the
/// principal direction of the weighted scatter.
fn weighted_tls(points: &[(f64, f64)], weights: &[f64]) -> Result<Line2D, LinefitError> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(LinefitError::DegenerateInput);
    }
    let cx = points
        .iter()
        .zip(weights)
        .map(|(p, w)| w * p.0)
        .sum::<f64>()
        / total;
    let cy = points
        .iter()
        .zip(weights)
        .map(|(p, w)| w * p.1)
        .sum::<f64>()
        / total;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (p, w) in points.iter().zip(weights) {
        let (dx, dy) = (p.0 - cx, p.1 - cy);
        sxx += w * dx * dx;
        syy += w * dy * dy;
        sxy += w * dx * dy;
    }
    if sxx + syy == 0.0 {
        return Err(LinefitError::DegenerateInput);
    }
    // Principal direction of the 2x2 scatter matrix.
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (dir_x, dir_y) = (theta.cos(), theta.sin());
    let (nx, ny) = (-dir_y, dir_x);
    Line2D::new(nx, ny, nx * cx + ny * cy)
}

/// Plain (unweighted) total-least-squares fit; also the initial iterate of
/// the robust fit.
pub fn fit_line_tls(points: &[(f64, f64)]) -> Result<Line2D, LinefitError> {
    check_points(points)?;
    weighted_tls(points, &vec![1.0; points.len()])
}

/// Iteratively reweighted fit: starts from the unweighted solution, then
/// alternates Tukey reweighting with weighted refits until the line moves
/// less than `spec.tol` at every input point or `spec.max_iters` refits
/// have run.
pub fn fit_line_irls(points: &[(f64, f64)], spec: &TukeySpec) -> Result<LineFit, LinefitError> {
    check_points(points)?;
    let mut line = weighted_tls(points, &vec![1.0; points.len()])?;
    let mut iterations = 0;
    for _ in 0..spec.max_iters {
        let weights: Vec<f64> = points.iter().map(|&p| spec.weight(line.distance(p))).collect();
        let next = match weighted_tls(points, &weights) {
            Ok(next) => next,
            // All weights collapsed to zero (possible in classic mode when
            // every point is out of band): keep the current line.
            Err(LinefitError::DegenerateInput) => break,
            Err(e) => return Err(e),
        };
        iterations += 1;
        let movement = points
            .iter()
            .map(|&p| (next.distance(p) - line.distance(p)).abs())
            .fold(0.0, f64::max);
        line = next;
        if movement < spec.tol {
            break;
        }
    }
    let weights = points.iter().map(|&p| spec.weight(line.distance(p))).collect();
    Ok(LineFit {
        line,
        weights,
        iterations,
    })
}
