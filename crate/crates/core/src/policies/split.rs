use crate::error::{invalid_param, Result};
use crate::grids::GridSchedule;

/// Each batch cut into `parts` contiguous intervals `T_m^{(j)}`; frame `j`
/// is `T^{(j)} = ∪_{m ≤ j} T_m^{(j)}`. Intervals with `j < m` belong to no
/// frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    grid: GridSchedule,
    /// `intervals[m][j] = (exclusive start, inclusive end)`.
    intervals: Vec<Vec<(usize, usize)>>,
}

/// Splits every batch of `grid` into `parts` near-equal intervals, sizes
/// differing by at most one with the remainder going to earlier intervals.
pub fn make_split_plan(grid: &GridSchedule, parts: usize) -> Result<SplitPlan> {
    if parts == 0 {
        return Err(invalid_param("need at least one interval per batch"));
    }
    let intervals = (0..grid.num_batches())
        .map(|m| {
            let (start, end) = grid.batch_bounds(m);
            let len = end - start;
            let (base, rem) = (len / parts, len % parts);
            let mut lo = start;
            (0..parts)
                .map(|j| {
                    let hi = lo + base + usize::from(j < rem);
                    let iv = (lo, hi);
                    lo = hi;
                    iv
                })
                .collect()
        })
        .collect();
    Ok(SplitPlan {
        grid: grid.clone(),
        intervals,
    })
}

impl SplitPlan {
    pub fn parts(&self) -> usize {
        self.intervals.first().map_or(0, Vec::len)
    }

    pub fn num_batches(&self) -> usize {
        self.intervals.len()
    }

    /// `T_m^{(j)}`, both 0-based.
    pub fn interval(&self, batch: usize, part: usize) -> (usize, usize) {
        self.intervals[batch][part]
    }

    /// Intervals making up frame `j` (0-based), in round order.
    pub fn frame(&self, j: usize) -> Vec<(usize, usize)> {
        (0..=j.min(self.num_batches().saturating_sub(1)))
            .map(|m| self.intervals[m][j])
            .filter(|(lo, hi)| hi > lo)
            .collect()
    }

    pub fn frame_rounds(&self, j: usize) -> Vec<usize> {
        self.frame(j)
            .into_iter()
            .flat_map(|(lo, hi)| lo + 1..=hi)
            .collect()
    }

    /// Frame containing round `t` (1-based), if any.
    pub fn frame_of(&self, t: usize) -> Option<usize> {
        let m = self.grid.batch_of(t)?;
        let j = self.intervals[m].iter().position(|&(lo, hi)| lo < t && t <= hi)?;
        (j >= m).then_some(j)
    }
}
