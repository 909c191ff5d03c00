//! Staged master/base pair: each stage keeps its own ridge regression over
//! the rounds it explored, so rewards inside a stage stay conditionally
//! independent of the widths that selected them.

use crate::environments::ContextSet;
use crate::error::{invalid_param, Result};
use crate::linalg::Vector;

use super::{Feedback, Policy, RegressionState};

/// `⌈log₂ T⌉`, at least one.
pub fn stage_count(horizon: usize) -> usize {
    let mut s = 0;
    while (1usize << s) < horizon {
        s += 1;
    }
    s.max(1)
}

/// One stage `s`: its member rounds `Ψ^s` and the regression over them.
#[derive(Debug, Clone)]
pub struct StageState {
    index: usize,
    members: Vec<usize>,
    reg: RegressionState,
}

impl StageState {
    /// Stage `index` (1-based) with `Ψ = ∅` and `A = I`.
    pub fn new(index: usize, dim: usize) -> Result<Self> {
        Ok(Self {
            index,
            members: Vec::new(),
            reg: RegressionState::new(dim, 1.0)?,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn regression(&self) -> &RegressionState {
        &self.reg
    }

    fn add(&mut self, fb: &Feedback) -> Result<()> {
        self.members.push(fb.round);
        self.reg.accumulate(&fb.context, fb.reward)
    }
}

/// Estimated reward `r̂` and width `w` of one candidate action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmEstimate {
    pub action: usize,
    pub reward: f64,
    pub width: f64,
}

impl ArmEstimate {
    fn ucb(&self) -> f64 {
        self.reward + self.width
    }
}

/// Result of one pass of the stage loop.
#[derive(Debug, Clone, PartialEq)]
pub enum StageStep {
    /// Every width is below `1/√T`: commit to the best UCB.
    Exploit(usize),
    /// Every width is below `2^{-s}`: keep the near-optimal candidates.
    Filter(Vec<usize>),
    /// Some width exceeds `2^{-s}`: explore that action at this stage.
    Explore(usize),
}

/// How an action was reached; `stage` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Exploit { stage: usize },
    Explore { stage: usize },
}

/// Applies steps (a), (b), (c) at stage `stage` to the candidates'
/// estimates, which must be in ascending action order.
pub fn stage_decision(estimates: &[ArmEstimate], stage: usize, horizon: usize) -> StageStep {
    debug_assert!(!estimates.is_empty());
    let exploit_level = 1.0 / (horizon as f64).sqrt();
    let stage_level = 0.5f64.powi(stage as i32);
    if estimates.iter().all(|e| e.width <= exploit_level) {
        let mut best = estimates[0];
        for e in &estimates[1..] {
            if e.ucb() > best.ucb() {
                best = *e;
            }
        }
        return StageStep::Exploit(best.action);
    }
    if estimates.iter().all(|e| e.width <= stage_level) {
        let top = estimates
            .iter()
            .map(ArmEstimate::ucb)
            .fold(f64::NEG_INFINITY, f64::max);
        let cut = top - 2.0 * stage_level;
        return StageStep::Filter(
            estimates
                .iter()
                .filter(|e| e.ucb() >= cut)
                .map(|e| e.action)
                .collect(),
        );
    }
    let pick = estimates
        .iter()
        .find(|e| e.width > stage_level)
        .expect("some width exceeds the stage level");
    StageStep::Explore(pick.action)
}

fn estimates(
    contexts: &ContextSet,
    stage: &StageState,
    candidates: &[usize],
    gamma: f64,
) -> Result<Vec<ArmEstimate>> {
    let theta: &Vector = stage.reg.theta_hat();
    candidates
        .iter()
        .map(|&a| {
            let x = contexts.get(a);
            Ok(ArmEstimate {
                action: a,
                reward: x.dot(theta),
                width: gamma * stage.reg.width(x)?,
            })
        })
        .collect()
}

/// Runs the stage loop from `s = 1` with all actions as candidates.
pub fn supsbucb_select(
    contexts: &ContextSet,
    stages: &[StageState],
    horizon: usize,
    gamma: f64,
) -> Result<(usize, Decision)> {
    let mut candidates: Vec<usize> = (0..contexts.num_actions()).collect();
    for (i, stage) in stages.iter().enumerate() {
        let s = i + 1;
        let est = estimates(contexts, stage, &candidates, gamma)?;
        match stage_decision(&est, s, horizon) {
            StageStep::Exploit(a) => return Ok((a, Decision::Exploit { stage: s })),
            StageStep::Explore(a) => return Ok((a, Decision::Explore { stage: s })),
            StageStep::Filter(next) => candidates = next,
        }
    }
    Err(invalid_param(format!(
        "stage loop ran past {} stages without choosing",
        stages.len()
    )))
}

/// Master policy over `⌈log₂ T⌉` stages. Stage regressions are rebuilt once
/// per batch from the rounds each stage explored.
#[derive(Debug, Clone)]
pub struct SupSbucb {
    stages: Vec<StageState>,
    horizon: usize,
    gamma: f64,
    /// Rounds explored in the current batch, with their 0-based stage.
    pending: Vec<(usize, usize)>,
    decisions: Vec<Decision>,
}

impl SupSbucb {
    pub fn new(dim: usize, horizon: usize, gamma: f64) -> Result<Self> {
        let stages = (1..=stage_count(horizon))
            .map(|s| StageState::new(s, dim))
            .collect::<Result<_>>()?;
        Ok(Self {
            stages,
            horizon,
            gamma,
            pending: Vec::new(),
            decisions: Vec::new(),
        })
    }

    pub fn stages(&self) -> &[StageState] {
        &self.stages
    }

    /// Decision taken at every round so far.
    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }
}

impl Policy for SupSbucb {
    fn name(&self) -> &'static str {
        "supsbucb"
    }

    fn select(&mut self, round: usize, contexts: &ContextSet) -> Result<usize> {
        let (action, decision) = supsbucb_select(contexts, &self.stages, self.horizon, self.gamma)?;
        if let Decision::Explore { stage } = decision {
            self.pending.push((round, stage - 1));
        }
        self.decisions.push(decision);
        Ok(action)
    }

    fn end_batch(&mut self, _batch: usize, feedback: &[Feedback]) -> Result<()> {
        let Some(first) = feedback.first() else {
            self.pending.clear();
            return Ok(());
        };
        let base = first.round;
        let mut touched = vec![false; self.stages.len()];
        for &(round, s) in &self.pending {
            let fb = feedback
                .get(round.wrapping_sub(base))
                .filter(|fb| fb.round == round)
                .ok_or_else(|| invalid_param(format!("no feedback for explored round {round}")))?;
            self.stages[s].add(fb)?;
            touched[s] = true;
        }
        self.pending.clear();
        for (stage, hit) in self.stages.iter_mut().zip(touched) {
            if hit {
                stage.reg.refresh()?;
            }
        }
        Ok(())
    }
}
