use crate::environments::ContextSet;
use crate::error::Result;

use super::{argmax, Feedback, Policy, RegressionState};

/// `argmax_a xᵀθ̂ + γ √(xᵀA⁻¹x)`, lowest index on ties.
pub fn sbucb_select(contexts: &ContextSet, reg: &RegressionState, gamma: f64) -> Result<usize> {
    let theta = reg.theta_hat();
    let scores = contexts
        .iter()
        .map(|x| Ok(x.dot(theta) + gamma * reg.width(x)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(argmax(scores))
}

/// Sequential batch UCB: ridge regression over all revealed data,
/// refreshed at each batch end.
#[derive(Debug, Clone)]
pub struct Sbucb {
    reg: RegressionState,
    gamma: f64,
}

impl Sbucb {
    pub fn new(dim: usize, ridge: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            reg: RegressionState::new(dim, ridge)?,
            gamma,
        })
    }

    pub fn state(&self) -> &RegressionState {
        &self.reg
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Policy for Sbucb {
    fn name(&self) -> &'static str {
        "sbucb"
    }

    fn select(&mut self, _round: usize, contexts: &ContextSet) -> Result<usize> {
        sbucb_select(contexts, &self.reg, self.gamma)
    }

    fn end_batch(&mut self, _batch: usize, feedback: &[Feedback]) -> Result<()> {
        self.reg.absorb(feedback)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;

    fn ctx(xs: &[&[f64]]) -> ContextSet {
        ContextSet::new(xs.iter().map(|x| Vector::new(x.to_vec()).unwrap()).collect()).unwrap()
    }

    #[test]
    fn hand_evaluated_index() {
        // θ̂ = 1, A = 2: indices 1 + √½ and −1 + √½
        let reg = RegressionState::new(1, 1.0)
            .unwrap()
            .batch_update(&[Feedback::new(1, Vector::new(vec![1.0]).unwrap(), 2.0)])
            .unwrap();
        assert!((reg.theta_hat()[0] - 1.0).abs() < 1e-15);
        assert_eq!(sbucb_select(&ctx(&[&[1.0], &[-1.0]]), &reg, 1.0).unwrap(), 0);
    }

    #[test]
    fn cold_start_tie_goes_to_first_action() {
        let reg = RegressionState::new(2, 1.0).unwrap();
        let c = ctx(&[&[0.3, 0.4], &[0.3, 0.4], &[0.3, 0.4]]);
        assert_eq!(sbucb_select(&c, &reg, 2.0).unwrap(), 0);
    }

    #[test]
    fn zero_gamma_is_greedy() {
        let reg = RegressionState::new(2, 1.0)
            .unwrap()
            .batch_update(&[Feedback::new(1, Vector::new(vec![1.0, 0.0]).unwrap(), 1.0)])
            .unwrap();
        // action 1 has the larger width but the smaller mean
        let c = ctx(&[&[0.5, 0.0], &[0.4, 3.0]]);
        assert_eq!(sbucb_select(&c, &reg, 0.0).unwrap(), 0);
        assert_eq!(sbucb_select(&c, &reg, 1.0).unwrap(), 1);
    }
}
