use std::time::Instant;

use crate::environments::{make_covariance, sample_theta_sphere, Environment};
use crate::error::{invalid_param, Result};
use crate::grids::GridSchedule;
use crate::linalg::Vector;
use crate::policies::{Feedback, Policy, PureExploit, PureSplit, Sbucb, SupSbucb};
use crate::rng::{RngStream, StreamRole};

use super::config::{AlgoId, EnvKind, ExperimentConfig, ThetaSpec};

/// One round of an episode. `batch` and `action` are 0-based here; the CSV
/// writer shifts them to 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub rep: usize,
    pub round: usize,
    pub batch: usize,
    pub action: usize,
    pub inst_regret: f64,
    pub cum_regret: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub rep: usize,
    /// `R_T`.
    pub regret: f64,
    /// Regret accrued inside each batch.
    pub batch_regret: Vec<f64>,
    pub wall_ms: f64,
    /// Present when the config asks for a trace.
    pub trace: Option<Vec<TraceRow>>,
}

fn stream(cfg: &ExperimentConfig, rep: usize, role: StreamRole) -> RngStream {
    RngStream::for_role(cfg.base_seed, rep as u64, role)
}

/// The environment of replication `rep`, drawn from its own streams.
pub fn build_environment(cfg: &ExperimentConfig, grid: &GridSchedule, rep: usize) -> Result<Environment> {
    let noise_rng = stream(cfg, rep, StreamRole::Noise);
    match cfg.env {
        EnvKind::Adversarial => Environment::adversarial(
            cfg.dim,
            cfg.actions,
            grid,
            &mut stream(cfg, rep, StreamRole::Coins),
            cfg.noise,
            noise_rng,
        ),
        EnvKind::Stochastic => {
            let sigma = make_covariance(
                cfg.dim,
                cfg.kappa,
                cfg.cov,
                &mut stream(cfg, rep, StreamRole::Covariance),
            )?;
            let theta = match &cfg.theta {
                ThetaSpec::Sphere(r) => {
                    sample_theta_sphere(cfg.dim, *r, &mut stream(cfg, rep, StreamRole::Theta))?
                }
                ThetaSpec::Fixed(v) => Vector::new(v.clone())?,
            };
            Environment::stochastic(
                cfg.actions,
                sigma,
                cfg.kappa,
                theta,
                cfg.noise,
                stream(cfg, rep, StreamRole::Contexts),
                noise_rng,
            )
        }
    }
}

pub fn build_policy(cfg: &ExperimentConfig, grid: &GridSchedule) -> Result<Box<dyn Policy + Send>> {
    let gamma = cfg.gamma_value()?;
    Ok(match cfg.algo {
        AlgoId::Sbucb => Box::new(Sbucb::new(cfg.dim, cfg.ridge, gamma)?),
        AlgoId::SupSbucb => Box::new(SupSbucb::new(cfg.dim, cfg.horizon, gamma)?),
        AlgoId::Pure => Box::new(PureExploit::new(cfg.dim, cfg.eps)?),
        AlgoId::PureSplit => Box::new(PureSplit::new(grid, cfg.dim, cfg.eps)?),
    })
}

/// Simulates replication `rep` with the policy named by `cfg.algo`.
pub fn run_episode(cfg: &ExperimentConfig, rep: usize) -> Result<RunResult> {
    let grid = cfg.build_grid()?;
    let mut policy = build_policy(cfg, &grid)?;
    run_on_grid(cfg, &grid, rep, policy.as_mut())
}

/// Like [`run_episode`] but drives a caller-supplied policy.
pub fn run_episode_with(cfg: &ExperimentConfig, rep: usize, policy: &mut dyn Policy) -> Result<RunResult> {
    let grid = cfg.build_grid()?;
    run_on_grid(cfg, &grid, rep, policy)
}

fn run_on_grid(
    cfg: &ExperimentConfig,
    grid: &GridSchedule,
    rep: usize,
    policy: &mut dyn Policy,
) -> Result<RunResult> {
    let started = Instant::now();
    let mut env = build_environment(cfg, grid, rep)?;
    let mut trace = cfg.trace.then(|| Vec::with_capacity(cfg.horizon));
    let mut batch_regret = Vec::with_capacity(grid.num_batches());
    let mut cum = 0.0;
    for m in 0..grid.num_batches() {
        let (start, end) = grid.batch_bounds(m);
        let mut feedback = Vec::with_capacity(end - start);
        let mut subtotal = 0.0;
        for t in start + 1..=end {
            let contexts = env.contexts(t)?;
            let action = policy.select(t, &contexts)?;
            if action >= contexts.num_actions() {
                return Err(invalid_param(format!(
                    "{} chose action {action} of {} at round {t}",
                    policy.name(),
                    contexts.num_actions()
                )));
            }
            let x = contexts.get(action).clone();
            let reward = env.realize_reward(&x);
            let inst = env.inst_regret(&contexts, action);
            subtotal += inst;
            cum += inst;
            if let Some(rows) = trace.as_mut() {
                rows.push(TraceRow {
                    rep,
                    round: t,
                    batch: m,
                    action,
                    inst_regret: inst,
                    cum_regret: cum,
                });
            }
            feedback.push(Feedback::new(t, x, reward));
        }
        policy.end_batch(m, &feedback)?;
        batch_regret.push(subtotal);
    }
    let wall_ms = if cfg.timing {
        started.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(RunResult {
        rep,
        regret: cum,
        batch_regret,
        wall_ms,
        trace,
    })
}
