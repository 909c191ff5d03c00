//! Context and reward generation.
//!
//! Two context regimes are supported:
//!
//! - **stochastic**: every `x_{t,a}` is an independent draw from `N(0, Σ)`
//!   with the spectrum of `Σ` inside `[κ/d, 1/d]`;
//! - **adversarial**: the two-action lower-bound construction. A fair coin
//!   per coordinate pair decides which basis vector carries the reward, and
//!   each pair is shown only inside one designated batch.
//!
//! Rewards are `xᵀθ* + ξ` with `ξ` either standard Gaussian or uniform on
//! `[-√3, √3]` (both unit variance).

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid_param, Error, Result};
use crate::grids::GridSchedule;
use crate::linalg::{Cholesky, SymMatrix, Vector};
use crate::rng::RngStream;

/// The `K` context vectors revealed at one round.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextSet {
    vectors: Vec<Vector>,
}

impl ContextSet {
    pub fn new(vectors: Vec<Vector>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(invalid_param("a context set needs at least one action"));
        };
        let d = first.dim();
        if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.dim(),
            });
        }
        Ok(Self { vectors })
    }

    pub fn num_actions(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn get(&self, action: usize) -> &Vector {
        &self.vectors[action]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vector> {
        self.vectors.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceMode {
    Isotropic,
    Random,
}

impl FromStr for CovarianceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isotropic" => Ok(Self::Isotropic),
            "random" => Ok(Self::Random),
            other => Err(invalid_param(format!("unknown covariance mode {other:?}"))),
        }
    }
}

impl fmt::Display for CovarianceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Isotropic => "isotropic",
            Self::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Gaussian,
    /// Uniform on `[-√3, √3]`.
    Uniform,
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "uniform" => Ok(Self::Uniform),
            other => Err(invalid_param(format!("unknown noise kind {other:?}"))),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gaussian => "gaussian",
            Self::Uniform => "uniform",
        })
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa <= 1.0 {
        Ok(())
    } else {
        Err(invalid_param(format!("kappa must lie in (0, 1], got {kappa}")))
    }
}

/// A context covariance with spectrum in `[κ/d, 1/d]`.
///
/// `Random` draws the eigenvalues uniformly from that interval and rotates
/// them by a Haar-random orthogonal basis. With `κ = 1` the spectrum is a
/// single point and the result is exactly `I/d`.
pub fn make_covariance(
    dim: usize,
    kappa: f64,
    mode: CovarianceMode,
    rng: &mut RngStream,
) -> Result<SymMatrix> {
    check_kappa(kappa)?;
    if dim == 0 {
        return Err(invalid_param("dimension must be positive"));
    }
    let top = 1.0 / dim as f64;
    if mode == CovarianceMode::Isotropic || kappa == 1.0 {
        return Ok(SymMatrix::scaled_identity(dim, top));
    }
    let lo = kappa * top;
    let eig: Vec<f64> = (0..dim).map(|_| lo + (top - lo) * rng.uniform()).collect();
    let basis = haar_orthogonal(dim, rng);
    SymMatrix::from_upper(dim, |i, j| {
        (0..dim).map(|k| basis[k][i] * eig[k] * basis[k][j]).sum()
    })
}

/// Rows of a Haar-distributed orthogonal matrix: Gram–Schmidt on Gaussian
/// vectors (positive-diagonal QR).
fn haar_orthogonal(dim: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while rows.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.std_normal()).collect();
        for _ in 0..2 {
            for r in &rows {
                let p: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
                for (vi, ri) in v.iter_mut().zip(r) {
                    *vi -= p * ri;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            rows.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    rows
}

/// A point uniform on the sphere of radius `delta`.
pub fn sample_theta_sphere(dim: usize, delta: f64, rng: &mut RngStream) -> Result<Vector> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(invalid_param(format!("sphere radius must lie in [0, 1], got {delta}")));
    }
    if dim == 0 {
        return Err(invalid_param("dimension must be positive"));
    }
    if delta == 0.0 {
        return Ok(Vector::zeros(dim));
    }
    loop {
        let z: Vec<f64> = (0..dim).map(|_| rng.std_normal()).collect();
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Vector::new(z.into_iter().map(|x| delta * x / norm).collect());
        }
    }
}

/// Fair-coin outcome `U_k ∈ {1, 2}`: which of the pair `(e_{2k-1}, e_{2k})`
/// carries the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coin {
    First,
    Second,
}

#[derive(Debug, Clone)]
enum Regime {
    Stochastic {
        sigma: SymMatrix,
        sigma_chol: Cholesky,
        kappa: f64,
        contexts_rng: RngStream,
    },
    Adversarial {
        coins: Vec<Coin>,
        designated: Vec<usize>,
        /// Coordinate pair shown in each batch, if any.
        pair_of_batch: Vec<Option<usize>>,
        grid: GridSchedule,
    },
}

/// Hidden state of one episode's environment.
#[derive(Debug, Clone)]
pub struct Environment {
    theta_star: Vector,
    num_actions: usize,
    noise: NoiseKind,
    regime: Regime,
    noise_rng: RngStream,
}

impl Environment {
    pub fn stochastic(
        num_actions: usize,
        sigma: SymMatrix,
        kappa: f64,
        theta_star: Vector,
        noise: NoiseKind,
        contexts_rng: RngStream,
        noise_rng: RngStream,
    ) -> Result<Self> {
        check_kappa(kappa)?;
        if num_actions == 0 {
            return Err(invalid_param("need at least one action"));
        }
        if theta_star.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                got: theta_star.dim(),
            });
        }
        check_theta_norm(&theta_star)?;
        let sigma_chol = sigma.cholesky()?;
        Ok(Self {
            theta_star,
            num_actions,
            noise,
            regime: Regime::Stochastic {
                sigma,
                sigma_chol,
                kappa,
                contexts_rng,
            },
            noise_rng,
        })
    }

    /// The lower-bound construction on `grid` with `d' = min(⌊d/2⌋, M)`
    /// coordinate pairs, one coin each.
    pub fn adversarial(
        dim: usize,
        num_actions: usize,
        grid: &GridSchedule,
        coin_rng: &mut RngStream,
        noise: NoiseKind,
        noise_rng: RngStream,
    ) -> Result<Self> {
        if num_actions != 2 {
            return Err(invalid_param(format!(
                "adversarial contexts need K = 2, got {num_actions}"
            )));
        }
        if dim < 2 {
            return Err(invalid_param(format!("adversarial contexts need d ≥ 2, got {dim}")));
        }
        let pairs = (dim / 2).min(grid.num_batches());
        let designated = designated_batches(grid, pairs);
        let coins: Vec<Coin> = (0..pairs)
            .map(|_| if coin_rng.fair_coin() { Coin::First } else { Coin::Second })
            .collect();
        let mut pair_of_batch = vec![None; grid.num_batches()];
        for (k, &m) in designated.iter().enumerate() {
            pair_of_batch[m] = Some(k);
        }
        let level = 1.0 / (pairs as f64).sqrt();
        let mut theta = vec![0.0; dim];
        for (k, coin) in coins.iter().enumerate() {
            match coin {
                Coin::First => theta[2 * k] = level,
                Coin::Second => theta[2 * k + 1] = level,
            }
        }
        Ok(Self {
            theta_star: Vector::new(theta)?,
            num_actions,
            noise,
            regime: Regime::Adversarial {
                coins,
                designated,
                pair_of_batch,
                grid: grid.clone(),
            },
            noise_rng,
        })
    }

    pub fn theta_star(&self) -> &Vector {
        &self.theta_star
    }

    pub fn dim(&self) -> usize {
        self.theta_star.dim()
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn is_adversarial(&self) -> bool {
        matches!(self.regime, Regime::Adversarial { .. })
    }

    pub fn sigma(&self) -> Option<&SymMatrix> {
        match &self.regime {
            Regime::Stochastic { sigma, .. } => Some(sigma),
            Regime::Adversarial { .. } => None,
        }
    }

    pub fn kappa(&self) -> Option<f64> {
        match &self.regime {
            Regime::Stochastic { kappa, .. } => Some(*kappa),
            Regime::Adversarial { .. } => None,
        }
    }

    pub fn coins(&self) -> &[Coin] {
        match &self.regime {
            Regime::Adversarial { coins, .. } => coins,
            Regime::Stochastic { .. } => &[],
        }
    }

    /// Designated batch `i_k` for each coordinate pair `k` (0-based).
    pub fn designated_batches(&self) -> &[usize] {
        match &self.regime {
            Regime::Adversarial { designated, .. } => designated,
            Regime::Stochastic { .. } => &[],
        }
    }

    /// Contexts for round `t` (1-based) under whichever regime is active.
    pub fn contexts(&mut self, t: usize) -> Result<ContextSet> {
        match self.regime {
            Regime::Stochastic { .. } => self.stochastic_step(t),
            Regime::Adversarial { .. } => self.adversarial_step(t),
        }
    }

    /// `K` fresh independent draws `x = L z` with `Σ = L Lᵀ`.
    pub fn stochastic_step(&mut self, _t: usize) -> Result<ContextSet> {
        let Regime::Stochastic {
            sigma_chol,
            contexts_rng,
            ..
        } = &mut self.regime
        else {
            return Err(invalid_param("stochastic_step on an adversarial environment"));
        };
        let d = sigma_chol.dim();
        let mut z = vec![0.0; d];
        let vectors = (0..self.num_actions)
            .map(|_| {
                for zi in z.iter_mut() {
                    *zi = contexts_rng.std_normal();
                }
                Vector::from_finite(sigma_chol.mul_lower(&z))
            })
            .collect();
        Ok(ContextSet { vectors })
    }

    /// `(e_{2k-1}, e_{2k})` inside designated batch `i_k`, `(0, 0)` elsewhere.
    pub fn adversarial_step(&mut self, t: usize) -> Result<ContextSet> {
        let Regime::Adversarial {
            pair_of_batch,
            grid,
            ..
        } = &self.regime
        else {
            return Err(invalid_param("adversarial_step on a stochastic environment"));
        };
        let d = self.theta_star.dim();
        let batch = grid
            .batch_of(t)
            .ok_or_else(|| invalid_param(format!("round {t} outside the horizon")))?;
        let vectors = match pair_of_batch[batch] {
            Some(k) => vec![Vector::basis(d, 2 * k), Vector::basis(d, 2 * k + 1)],
            None => vec![Vector::zeros(d), Vector::zeros(d)],
        };
        Ok(ContextSet { vectors })
    }

    pub fn mean_reward(&self, x: &Vector) -> f64 {
        x.dot(&self.theta_star)
    }

    /// `xᵀθ* + ξ` with `ξ` from the environment's noise stream.
    pub fn realize_reward(&mut self, x: &Vector) -> f64 {
        let xi = match self.noise {
            NoiseKind::Gaussian => self.noise_rng.std_normal(),
            NoiseKind::Uniform => 3f64.sqrt() * (2.0 * self.noise_rng.uniform() - 1.0),
        };
        self.mean_reward(x) + xi
    }

    /// `max_a x_aᵀθ* − x_{action}ᵀθ*`.
    pub fn inst_regret(&self, contexts: &ContextSet, action: usize) -> f64 {
        let best = contexts
            .iter()
            .map(|x| self.mean_reward(x))
            .fold(f64::NEG_INFINITY, f64::max);
        (best - self.mean_reward(contexts.get(action))).max(0.0)
    }
}

fn check_theta_norm(theta: &Vector) -> Result<()> {
    let n = theta.norm();
    if n > 1.0 + 1e-12 {
        return Err(invalid_param(format!("‖θ*‖ = {n} exceeds 1")));
    }
    Ok(())
}

/// The `pairs` longest batches, ties to the lower index, in that order.
pub fn designated_batches(grid: &GridSchedule, pairs: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..grid.num_batches()).collect();
    order.sort_by_key(|&m| (std::cmp::Reverse(grid.batch_len(m)), m));
    order.truncate(pairs);
    order
}
