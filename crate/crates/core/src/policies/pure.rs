use crate::environments::ContextSet;
use crate::error::{invalid_param, Result};
use crate::grids::GridSchedule;
use crate::linalg::Vector;

use super::{argmax, make_split_plan, Feedback, Policy, RegressionState, SplitPlan};

/// `argmax_a xᵀθ̂`, lowest index on ties (so `θ̂ = 0` picks action 0).
pub fn pure_exploit_select(contexts: &ContextSet, theta_hat: &Vector) -> usize {
    argmax(contexts.iter().map(|x| x.dot(theta_hat)))
}

/// Greedy policy on the least-squares estimate over all revealed data.
#[derive(Debug, Clone)]
pub struct PureExploit {
    reg: RegressionState,
}

impl PureExploit {
    pub fn new(dim: usize, eps: f64) -> Result<Self> {
        Ok(Self {
            reg: RegressionState::new(dim, eps)?,
        })
    }

    pub fn theta_hat(&self) -> &Vector {
        self.reg.theta_hat()
    }
}

impl Policy for PureExploit {
    fn name(&self) -> &'static str {
        "pure"
    }

    fn select(&mut self, _round: usize, contexts: &ContextSet) -> Result<usize> {
        Ok(pure_exploit_select(contexts, self.reg.theta_hat()))
    }

    fn end_batch(&mut self, _batch: usize, feedback: &[Feedback]) -> Result<()> {
        self.reg.absorb(feedback)
    }
}

/// Greedy policy whose estimate after batch `m` uses only frame `T^{(m)}`.
#[derive(Debug, Clone)]
pub struct PureSplit {
    plan: SplitPlan,
    frames: Vec<RegressionState>,
    theta_hat: Vector,
}

impl PureSplit {
    pub fn new(grid: &GridSchedule, dim: usize, eps: f64) -> Result<Self> {
        let parts = grid.num_batches();
        let plan = make_split_plan(grid, parts)?;
        let frames = (0..parts)
            .map(|_| RegressionState::new(dim, eps))
            .collect::<Result<_>>()?;
        Ok(Self {
            plan,
            frames,
            theta_hat: Vector::zeros(dim),
        })
    }

    pub fn plan(&self) -> &SplitPlan {
        &self.plan
    }

    pub fn theta_hat(&self) -> &Vector {
        &self.theta_hat
    }

    /// Observation count feeding each frame so far.
    pub fn frame_sizes(&self) -> Vec<usize> {
        self.frames.iter().map(RegressionState::observations).collect()
    }
}

impl Policy for PureSplit {
    fn name(&self) -> &'static str {
        "pure-split"
    }

    fn select(&mut self, _round: usize, contexts: &ContextSet) -> Result<usize> {
        Ok(pure_exploit_select(contexts, &self.theta_hat))
    }

    fn end_batch(&mut self, batch: usize, feedback: &[Feedback]) -> Result<()> {
        if batch >= self.frames.len() {
            return Err(invalid_param(format!("batch {batch} beyond the grid")));
        }
        for fb in feedback {
            if let Some(j) = self.plan.frame_of(fb.round) {
                self.frames[j].accumulate(&fb.context, fb.reward)?;
            }
        }
        let frame = &mut self.frames[batch];
        if frame.observations() == 0 {
            self.theta_hat = Vector::zeros(self.theta_hat.dim());
        } else {
            frame.refresh()?;
            self.theta_hat = frame.theta_hat().clone();
        }
        Ok(())
    }
}
