//! Simulation library for sequential batch learning in finite-action linear
//! contextual bandits.
//!
//! Rewards of a batch of rounds are revealed only when the batch ends. The
//! crate provides the batch grids, the decision policies, the stochastic and
//! adversarial context generators, and a seeded harness that measures regret
//! and fits its scaling in the horizon.

pub mod environments;
pub mod error;
pub mod grids;
pub mod harness;
pub mod linalg;
pub mod policies;
pub mod rng;

pub use error::{Error, Result};
