//! Closed-tour adapter: the colony visits every node once and returns to
//! its start; edge desirability is inverse distance.

use super::{AcoError, AcoProblem};

/// A symmetric distance graph searched for a shortest closed tour.
#[derive(Debug, Clone, PartialEq)]
pub struct TourProblem {
    n: usize,
    dist: Vec<f64>,
}

impl TourProblem {
    /// Builds the problem from an explicit symmetric distance matrix
    /// (row-major, `n x n`) with zero diagonal and positive finite
    /// off-diagonal entries.
    pub fn new(n: usize, dist: Vec<f64>) -> Result<Self, AcoError> {
        if n == 0 {
            return Err(AcoError::EmptyProblem);
        }
        if dist.len() != n * n {
            return Err(AcoError::BadParams("distance matrix must be n*n"));
        }
        for x in 0..n {
            if dist[x * n + x] != 0.0 {
                return Err(AcoError::BadParams("distance diagonal must be zero"));
            }
            for y in 0..n {
                let d = dist[x * n + y];
                if x != y && !(d.is_finite() && d > 0.0) {
                    return Err(AcoError::BadParams(
                        "off-diagonal distances must be positive and finite",
                    ));
                }
                if d != dist[y * n + x] {
                    return Err(AcoError::BadParams("distance matrix must be symmetric"));
                }
            }
        }
        Ok(Self { n, dist })
    }

    /// Euclidean tour over distinct planar points.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self, AcoError> {
        let n = points.len();
        if n == 0 {
            return Err(AcoError::EmptyProblem);
        }
        let mut dist = vec![0.0; n * n];
        for (x, a) in points.iter().enumerate() {
            for (y, b) in points.iter().enumerate() {
                if x != y {
                    let d = (a.0 - b.0).hypot(a.1 - b.1);
                    if d == 0.0 {
                        return Err(AcoError::BadParams("points must be distinct"));
                    }
                    dist[x * n + y] = d;
                }
            }
        }
        Ok(Self { n, dist })
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.n + y]
    }
}

impl AcoProblem for TourProblem {
    fn node_count(&self) -> usize {
        self.n
    }

    fn path_len(&self) -> usize {
        self.n
    }

    fn heuristic(&self, from: usize, to: usize) -> f64 {
        1.0 / self.distance(from, to)
    }

    fn path_cost(&self, visited: &[usize]) -> f64 {
        let mut cost = 0.0;
        for w in visited.windows(2) {
            cost += self.distance(w[0], w[1]);
        }
        if visited.len() > 1 {
            cost += self.distance(*visited.last().unwrap(), visited[0]);
        }
        cost
    }

    fn cyclic(&self) -> bool {
        true
    }
}
