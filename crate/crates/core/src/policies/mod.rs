//! Decision policies for the batched protocol.
//!
//! A policy chooses actions from estimates frozen at the last completed
//! batch. Rewards reach it only through [`Policy::end_batch`], which the
//! harness calls exactly once at each grid endpoint.

mod pure;
mod regression;
mod sbucb;
mod split;
mod supsbucb;

pub use pure::{pure_exploit_select, PureExploit, PureSplit};
pub use regression::{base_sbucb, least_squares_subset, RegressionState, DEFAULT_EPS};
pub use sbucb::{sbucb_select, Sbucb};
pub use split::{make_split_plan, SplitPlan};
pub use supsbucb::{
    stage_count, stage_decision, supsbucb_select, ArmEstimate, Decision, StageState, StageStep,
    SupSbucb,
};

use crate::environments::ContextSet;
use crate::error::{invalid_param, Result};
use crate::linalg::Vector;

/// One revealed observation: the chosen context and its realized reward.
#[derive(Debug, Clone, PartialEq)]
pub struct Feedback {
    /// 1-based round index.
    pub round: usize,
    pub context: Vector,
    pub reward: f64,
}

impl Feedback {
    pub fn new(round: usize, context: Vector, reward: f64) -> Self {
        Self {
            round,
            context,
            reward,
        }
    }
}

pub trait Policy {
    fn name(&self) -> &'static str;

    /// Chooses a 0-based action for round `round` (1-based).
    fn select(&mut self, round: usize, contexts: &ContextSet) -> Result<usize>;

    /// Reveals the rewards of batch `batch` (0-based), in round order.
    fn end_batch(&mut self, batch: usize, feedback: &[Feedback]) -> Result<()>;
}

/// Confidence multiplier `1 + √(½ ln(2KT/δ))`.
pub fn gamma_default(horizon: usize, num_actions: usize, delta: f64) -> Result<f64> {
    if horizon < 1 || num_actions < 1 {
        return Err(invalid_param("gamma needs T ≥ 1 and K ≥ 1"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid_param(format!("confidence level must lie in (0, 1], got {delta}")));
    }
    let arg = 2.0 * num_actions as f64 * horizon as f64 / delta;
    Ok(1.0 + (0.5 * arg.ln()).sqrt())
}

/// [`gamma_default`] at `δ = 1/T`.
pub fn gamma_auto(horizon: usize, num_actions: usize) -> Result<f64> {
    gamma_default(horizon, num_actions, 1.0 / horizon.max(1) as f64)
}

/// Index of the largest score, lowest index on ties.
pub(crate) fn argmax(scores: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, s) in scores.into_iter().enumerate() {
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}
