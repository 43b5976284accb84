//! Weight sweep of the merging-zone problem and its non-dominated set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, SolveError};
use crate::mz::{mz_costs, solve_mz_weighted, MzBoundary, MzTrajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub w: f64,
    pub fuel: f64,
    pub discomfort: f64,
    pub trajectory: MzTrajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoRun {
    pub boundary: MzBoundary,
    pub q1: f64,
    pub q2: f64,
    pub grid: Vec<f64>,
    pub points: Vec<ParetoPoint>,
    /// Indices into `points` of the non-dominated points, ascending in `w`.
    pub frontier: Vec<usize>,
}

impl ParetoRun {
    pub fn on_frontier(&self, i: usize) -> bool {
        self.frontier.binary_search(&i).is_ok()
    }
}

/// `n` weights evenly spaced in log-odds between `eps` and `1 − eps`, which
/// clusters points towards both ends of `(0, 1)`.
pub fn default_grid(n: usize, eps: f64) -> Vec<f64> {
    let logit = |p: f64| (p / (1.0 - p)).ln();
    let (lo, hi) = (logit(eps), logit(1.0 - eps));
    match n {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..n)
            .map(|k| {
                let x = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                1.0 / (1.0 + (-x).exp())
            })
            .collect(),
    }
}

/// Solves the weighted problem at every grid weight.
pub fn sweep(b: &MzBoundary, grid: &[f64], q1: f64, q2: f64) -> Result<ParetoRun, Error> {
    if let Some(&w) = grid.iter().find(|&&w| !(w > 0.0 && w < 1.0)) {
        return Err(Error::Sweep {
            w,
            source: SolveError::DegenerateWeight(w),
        });
    }
    let mut order: Vec<f64> = grid.to_vec();
    order.sort_by(f64::total_cmp);
    let points = order
        .iter()
        .map(|&w| {
            let trajectory =
                solve_mz_weighted(b, w, q1, q2).map_err(|source| Error::Sweep { w, source })?;
            let c = mz_costs(&trajectory, q1, q2);
            Ok(ParetoPoint {
                w,
                fuel: c.fuel,
                discomfort: c.discomfort,
                trajectory,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let costs: Vec<(f64, f64)> = points.iter().map(|p| (p.fuel, p.discomfort)).collect();
    Ok(ParetoRun {
        boundary: *b,
        q1,
        q2,
        grid: order,
        frontier: frontier(&costs),
        points,
    })
}

fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Indices of the non-dominated `(fuel, discomfort)` pairs, both minimised.
/// Of several identical points only the first is kept.
pub fn frontier(points: &[(f64, f64)]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            let p = points[i];
            !points
                .iter()
                .enumerate()
                .any(|(j, &q)| dominates(q, p) || (j < i && q == p))
        })
        .collect()
}
