//! Empirical check that greedy selection keeps the Gram matrix of a batch
//! well conditioned: `λ_min(Σ x xᵀ) ≥ c₀ κ n / d`.

use crate::environments::{make_covariance, sample_theta_sphere, CovarianceMode, Environment, NoiseKind};
use crate::error::{invalid_param, Result};
use crate::linalg::{min_eigenvalue, SymMatrix, Vector};
use crate::policies::pure_exploit_select;
use crate::rng::{RngStream, StreamRole};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCheckConfig {
    pub dim: usize,
    pub actions: usize,
    /// Rounds per batch.
    pub rounds: usize,
    pub kappa: f64,
    pub cov: CovarianceMode,
    pub reps: usize,
    pub c0: f64,
    pub seed: u64,
    /// Frozen estimate used for greedy selection; a fresh unit-sphere draw
    /// per replication when absent.
    pub theta_hat: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCheckResult {
    pub pass_fraction: f64,
    /// `λ_min / (κ n / d)` per replication; NaN when `n = 0`.
    pub ratios: Vec<f64>,
}

/// λ_min of the Gram matrix of `rounds` greedily chosen contexts.
pub fn greedy_gram_min_eigenvalue(cfg: &EigenCheckConfig, rep: usize) -> Result<f64> {
    let stream = |role| RngStream::for_role(cfg.seed, rep as u64, role);
    let sigma = make_covariance(cfg.dim, cfg.kappa, cfg.cov, &mut stream(StreamRole::Covariance))?;
    let theta_hat = match &cfg.theta_hat {
        Some(v) => Vector::new(v.clone())?,
        None => sample_theta_sphere(cfg.dim, 1.0, &mut stream(StreamRole::Theta))?,
    };
    if theta_hat.dim() != cfg.dim {
        return Err(invalid_param("frozen estimate has the wrong dimension"));
    }
    let mut env = Environment::stochastic(
        cfg.actions,
        sigma,
        cfg.kappa,
        Vector::zeros(cfg.dim),
        NoiseKind::Gaussian,
        stream(StreamRole::Contexts),
        stream(StreamRole::Noise),
    )?;
    let mut gram = SymMatrix::zeros(cfg.dim);
    for t in 1..=cfg.rounds {
        let c = env.stochastic_step(t)?;
        gram.add_outer(c.get(pure_exploit_select(&c, &theta_hat)).as_slice(), 1.0);
    }
    Ok(min_eigenvalue(&gram))
}

/// Fraction of replications with `λ_min ≥ c₀ κ n / d`. An empty batch never
/// passes.
pub fn gram_eigen_check(cfg: &EigenCheckConfig) -> Result<EigenCheckResult> {
    if cfg.reps == 0 {
        return Err(invalid_param("reps must be ≥ 1"));
    }
    let scale = cfg.kappa * cfg.rounds as f64 / cfg.dim as f64;
    let mut passed = 0;
    let mut ratios = Vec::with_capacity(cfg.reps);
    for rep in 0..cfg.reps {
        let lam = greedy_gram_min_eigenvalue(cfg, rep)?;
        if cfg.rounds > 0 && lam >= cfg.c0 * scale {
            passed += 1;
        }
        ratios.push(if cfg.rounds > 0 { lam / scale } else { f64::NAN });
    }
    Ok(EigenCheckResult {
        pass_fraction: passed as f64 / cfg.reps as f64,
        ratios,
    })
}
