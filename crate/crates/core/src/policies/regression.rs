use crate::error::{invalid_param, Error, Result};
use crate::linalg::{Cholesky, SymMatrix, Vector};

use super::Feedback;

/// Ridge added to the unregularized least-squares estimators.
pub const DEFAULT_EPS: f64 = 1e-8;

/// Running `A = ridge·I + Σ x xᵀ`, `b = Σ r x`, and `θ̂ = A⁻¹ b`.
#[derive(Debug, Clone)]
pub struct RegressionState {
    gram: SymMatrix,
    moment: Vec<f64>,
    theta_hat: Vector,
    ridge: f64,
    factor: Option<Cholesky>,
    observations: usize,
}

impl RegressionState {
    pub fn new(dim: usize, ridge: f64) -> Result<Self> {
        if !(ridge >= 0.0 && ridge.is_finite()) {
            return Err(invalid_param(format!("ridge must be finite and ≥ 0, got {ridge}")));
        }
        let gram = SymMatrix::scaled_identity(dim, ridge);
        let factor = gram.cholesky().ok();
        Ok(Self {
            gram,
            moment: vec![0.0; dim],
            theta_hat: Vector::zeros(dim),
            ridge,
            factor,
            observations: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.moment.len()
    }

    pub fn gram(&self) -> &SymMatrix {
        &self.gram
    }

    pub fn moment(&self) -> &[f64] {
        &self.moment
    }

    pub fn theta_hat(&self) -> &Vector {
        &self.theta_hat
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn observations(&self) -> usize {
        self.observations
    }

    /// Returns the state after absorbing `batch`; `self` is untouched.
    pub fn batch_update(&self, batch: &[Feedback]) -> Result<Self> {
        let mut next = self.clone();
        next.absorb(batch)?;
        Ok(next)
    }

    /// In-place form of [`RegressionState::batch_update`].
    pub fn absorb(&mut self, batch: &[Feedback]) -> Result<()> {
        if batch.is_empty() {
            return Ok(());
        }
        for fb in batch {
            self.accumulate(&fb.context, fb.reward)?;
        }
        self.refresh()
    }

    /// Adds one observation without refreshing `θ̂`.
    pub fn accumulate(&mut self, x: &Vector, reward: f64) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        self.gram.add_outer(x.as_slice(), 1.0);
        for (b, xi) in self.moment.iter_mut().zip(x.as_slice()) {
            *b += reward * xi;
        }
        self.observations += 1;
        Ok(())
    }

    /// Refactors `A` and recomputes `θ̂`.
    pub fn refresh(&mut self) -> Result<()> {
        let chol = self.gram.cholesky()?;
        self.theta_hat = Vector::new(chol.solve(&self.moment))?;
        self.factor = Some(chol);
        Ok(())
    }

    /// `√(xᵀ A⁻¹ x)` from the cached factorization.
    pub fn width(&self, x: &Vector) -> Result<f64> {
        match &self.factor {
            Some(chol) => Ok(chol.quad_form(x.as_slice()).sqrt()),
            None => Err(self.gram.cholesky().unwrap_err()),
        }
    }
}

/// Regression over an explicit history: `A = I + Σ x xᵀ`, `θ = A⁻¹ Σ r x`.
pub fn base_sbucb(history: &[Feedback], dim: usize) -> Result<(Vector, SymMatrix)> {
    let mut reg = RegressionState::new(dim, 1.0)?;
    reg.absorb(history)?;
    Ok((reg.theta_hat.clone(), reg.gram))
}

/// `(Σ x xᵀ + eps·I)⁻¹ Σ r x` over `frame`; zero for an empty frame.
pub fn least_squares_subset(frame: &[Feedback], dim: usize, eps: f64) -> Result<Vector> {
    if frame.is_empty() {
        return Ok(Vector::zeros(dim));
    }
    let mut reg = RegressionState::new(dim, eps)?;
    reg.absorb(frame)?;
    Ok(reg.theta_hat)
}
