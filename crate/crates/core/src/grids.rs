//! Batch grids: the endpoints `t_1 < … < t_M = T` at which rewards are
//! revealed.
//!
//! Rounds are 1-based throughout; batch `m` (0-based) covers the rounds
//! `t_{m-1}+1 ..= t_m` with `t_{-1} = 0`.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid_grid, Error, Result};

/// Bisection steps used to pin down the minimax grid scale.
pub const MINIMAX_BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSchedule {
    endpoints: Vec<usize>,
}

impl GridSchedule {
    pub fn new(endpoints: Vec<usize>, horizon: usize) -> Result<Self> {
        validate_grid(&endpoints, horizon)?;
        Ok(Self { endpoints })
    }

    pub fn endpoints(&self) -> &[usize] {
        &self.endpoints
    }

    pub fn horizon(&self) -> usize {
        *self.endpoints.last().expect("validated grid is non-empty")
    }

    pub fn num_batches(&self) -> usize {
        self.endpoints.len()
    }

    /// `(t_{m-1}, t_m]` as `(exclusive start, inclusive end)`.
    pub fn batch_bounds(&self, m: usize) -> (usize, usize) {
        let start = if m == 0 { 0 } else { self.endpoints[m - 1] };
        (start, self.endpoints[m])
    }

    pub fn batch_len(&self, m: usize) -> usize {
        let (s, e) = self.batch_bounds(m);
        e - s
    }

    pub fn batch_lengths(&self) -> Vec<usize> {
        (0..self.num_batches()).map(|m| self.batch_len(m)).collect()
    }

    /// Batch containing round `t` (1-based), or `None` outside `1..=T`.
    pub fn batch_of(&self, t: usize) -> Option<usize> {
        if t == 0 || t > self.horizon() {
            return None;
        }
        Some(self.endpoints.partition_point(|&e| e < t))
    }

    pub fn is_batch_end(&self, t: usize) -> bool {
        self.endpoints.binary_search(&t).is_ok()
    }
}

impl fmt::Display for GridSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.endpoints.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Parses a comma-separated endpoint list; the horizon is the last entry.
impl FromStr for GridSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let endpoints = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| invalid_grid(format!("not a round index: {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let horizon = endpoints.last().copied().unwrap_or(0);
        Self::new(endpoints, horizon)
    }
}

/// Checks `0 < t_1 < … < t_M = T`, naming the first violated condition.
pub fn validate_grid(endpoints: &[usize], horizon: usize) -> Result<()> {
    if endpoints.is_empty() {
        return Err(invalid_grid("grid has no endpoints"));
    }
    if endpoints.len() > horizon {
        return Err(invalid_grid(format!(
            "{} batches exceed horizon {horizon}",
            endpoints.len()
        )));
    }
    if endpoints[0] == 0 {
        return Err(invalid_grid("first endpoint must be positive"));
    }
    for (m, w) in endpoints.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(invalid_grid(format!(
                "endpoints not strictly increasing at batch {}: {} then {}",
                m + 2,
                w[0],
                w[1]
            )));
        }
    }
    let last = *endpoints.last().unwrap();
    if last != horizon {
        return Err(invalid_grid(format!(
            "last endpoint {last} differs from horizon {horizon}"
        )));
    }
    Ok(())
}

fn check_counts(horizon: usize, batches: usize) -> Result<()> {
    if batches < 1 {
        return Err(invalid_grid("need at least one batch"));
    }
    if batches > horizon {
        return Err(invalid_grid(format!(
            "{batches} batches exceed horizon {horizon}"
        )));
    }
    Ok(())
}

fn check_horizon_dim(horizon: usize, dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(invalid_grid("dimension must be positive"));
    }
    if (horizon as u128) < (dim as u128) * (dim as u128) {
        return Err(invalid_grid(format!(
            "horizon {horizon} is below d² = {}",
            dim * dim
        )));
    }
    Ok(())
}

/// `t_m = ⌊mT/M⌋`.
pub fn uniform_grid(horizon: usize, batches: usize) -> Result<GridSchedule> {
    check_counts(horizon, batches)?;
    let endpoints = (1..=batches)
        .map(|m| ((m as u128 * horizon as u128) / batches as u128) as usize)
        .collect();
    GridSchedule::new(endpoints, horizon)
}

/// Raw square-root recursion `t_1 = ⌊a d⌋`, `t_m = ⌊a √t_{m-1}⌋`.
pub fn minimax_recursion(scale: f64, batches: usize, dim: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(batches);
    let mut t = (scale * dim as f64).floor();
    out.push(t);
    for _ in 1..batches {
        t = (scale * t.sqrt()).floor();
        out.push(t);
    }
    out
}

/// Smallest `a ∈ [1, T]` (to bisection precision) whose recursion reaches
/// `t_M ≥ T`.
pub fn minimax_scale(horizon: usize, batches: usize, dim: usize) -> Result<f64> {
    check_counts(horizon, batches)?;
    check_horizon_dim(horizon, dim)?;
    let target = horizon as f64;
    let reaches = |a: f64| *minimax_recursion(a, batches, dim).last().unwrap() >= target;
    let (mut lo, mut hi) = (1.0_f64, target);
    if reaches(lo) {
        return Ok(lo);
    }
    debug_assert!(reaches(hi));
    for _ in 0..MINIMAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The minimax grid: square-root recursion with the scale fitted so the
/// last endpoint lands on `T`.
pub fn minimax_grid(horizon: usize, batches: usize, dim: usize) -> Result<GridSchedule> {
    let a = minimax_scale(horizon, batches, dim)?;
    let raw = minimax_recursion(a, batches, dim);
    repair(raw, horizon)
}

/// Ratio `b = (T/d²)^{1/M}` of the geometric grid.
pub fn geometric_ratio(horizon: usize, batches: usize, dim: usize) -> f64 {
    (horizon as f64 / (dim * dim) as f64).powf(1.0 / batches as f64)
}

/// Geometric recursion before clamping: `t_1 = ⌊b d²⌋`, `t_m = ⌊b t_{m-1}⌋`.
pub fn geometric_recursion(horizon: usize, batches: usize, dim: usize) -> Vec<f64> {
    let b = geometric_ratio(horizon, batches, dim);
    let mut out = Vec::with_capacity(batches);
    let mut t = (b * (dim * dim) as f64).floor();
    out.push(t);
    for _ in 1..batches {
        t = (b * t).floor();
        out.push(t);
    }
    out
}

pub fn geometric_grid(horizon: usize, batches: usize, dim: usize) -> Result<GridSchedule> {
    check_counts(horizon, batches)?;
    check_horizon_dim(horizon, dim)?;
    repair(geometric_recursion(horizon, batches, dim), horizon)
}

/// Clamps the last endpoint to `T` and enforces strict increase: colliding
/// floors are bumped forward, then anything crowding `T` is pulled back.
fn repair(raw: Vec<f64>, horizon: usize) -> Result<GridSchedule> {
    let m = raw.len();
    check_counts(horizon, m)?;
    let mut t: Vec<usize> = raw
        .iter()
        .map(|&v| v.clamp(1.0, horizon as f64) as usize)
        .collect();
    t[m - 1] = horizon;
    for i in 1..m {
        if t[i] <= t[i - 1] {
            t[i] = t[i - 1] + 1;
        }
    }
    t[m - 1] = horizon;
    for i in (0..m - 1).rev() {
        if t[i] >= t[i + 1] {
            t[i] = t[i + 1] - 1;
        }
    }
    GridSchedule::new(t, horizon)
}
