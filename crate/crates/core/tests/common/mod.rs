//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use batchbandit::environments::ContextSet;
use batchbandit::grids::GridSchedule;
use batchbandit::harness::{
    build_environment, run_episode, run_episode_with, AlgoId, EnvKind, ExperimentConfig,
};
use batchbandit::policies::{gamma_auto, make_split_plan, Decision, Feedback, Policy, SupSbucb};
use batchbandit::Result;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Gauss–Jordan inverse with partial pivoting.
pub fn explicit_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// `(I + Σ x xᵀ)⁻¹ Σ r x` by explicit inversion.
pub fn ridge_oracle(xs: &[Vec<f64>], rs: &[f64], dim: usize) -> Vec<f64> {
    let mut a = vec![vec![0.0; dim]; dim];
    let mut b = vec![0.0; dim];
    for i in 0..dim {
        a[i][i] = 1.0;
    }
    for (x, r) in xs.iter().zip(rs) {
        for i in 0..dim {
            b[i] += r * x[i];
            for j in 0..dim {
                a[i][j] += x[i] * x[j];
            }
        }
    }
    mat_vec(&explicit_inverse(&a), &b)
}

/// Per-round LinUCB with the design matrix inverted from scratch each round.
pub struct ReferenceLinUcb {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    gamma: f64,
}

impl ReferenceLinUcb {
    pub fn new(dim: usize, gamma: f64) -> Self {
        let mut a = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            a[i][i] = 1.0;
        }
        Self {
            a,
            b: vec![0.0; dim],
            gamma,
        }
    }

    pub fn choose(&self, contexts: &ContextSet) -> usize {
        let inv = explicit_inverse(&self.a);
        let theta = mat_vec(&inv, &self.b);
        let mut best = (0, f64::NEG_INFINITY);
        for (k, x) in contexts.iter().enumerate() {
            let x = x.as_slice();
            let ucb = dot(x, &theta) + self.gamma * dot(x, &mat_vec(&inv, x)).sqrt();
            if ucb > best.1 {
                best = (k, ucb);
            }
        }
        best.0
    }

    pub fn observe(&mut self, x: &[f64], r: f64) {
        for i in 0..x.len() {
            self.b[i] += r * x[i];
            for j in 0..x.len() {
                self.a[i][j] += x[i] * x[j];
            }
        }
    }
}

/// Actions of the reference LinUCB on replication `rep`'s environment.
pub fn reference_linucb_actions(cfg: &ExperimentConfig, rep: usize) -> Vec<usize> {
    let grid = cfg.build_grid().unwrap();
    let mut env = build_environment(cfg, &grid, rep).unwrap();
    let mut policy = ReferenceLinUcb::new(cfg.dim, gamma_auto(cfg.horizon, cfg.actions).unwrap());
    (1..=cfg.horizon)
        .map(|t| {
            let c = env.contexts(t).unwrap();
            let a = policy.choose(&c);
            let x = c.get(a).clone();
            let r = env.realize_reward(&x);
            policy.observe(x.as_slice(), r);
            a
        })
        .collect()
}

pub fn online_config(dim: usize, actions: usize, horizon: usize, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(AlgoId::Sbucb, EnvKind::Stochastic, horizon, horizon, dim, actions);
    cfg.base_seed = seed;
    cfg.trace = true;
    cfg.timing = false;
    cfg
}

pub fn traced_actions(cfg: &ExperimentConfig, rep: usize) -> Vec<usize> {
    run_episode(cfg, rep)
        .unwrap()
        .trace
        .unwrap()
        .iter()
        .map(|r| r.action)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Select(usize),
    Reveal { batch: usize, rounds: Vec<usize> },
}

/// Picks action 0 and logs every call it receives.
#[derive(Default)]
pub struct RecordingPolicy {
    pub events: Vec<Event>,
}

impl Policy for RecordingPolicy {
    fn name(&self) -> &'static str {
        "recording"
    }

    fn select(&mut self, round: usize, _contexts: &ContextSet) -> Result<usize> {
        self.events.push(Event::Select(round));
        Ok(0)
    }

    fn end_batch(&mut self, batch: usize, feedback: &[Feedback]) -> Result<()> {
        self.events.push(Event::Reveal {
            batch,
            rounds: feedback.iter().map(|f| f.round).collect(),
        });
        Ok(())
    }
}

/// A small random configuration for property tests.
pub fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    (
        prop::sample::select(AlgoId::ALL.to_vec()),
        any::<bool>(),
        8usize..120,
        1usize..6,
        2usize..5,
        any::<u64>(),
    )
        .prop_map(|(algo, adversarial, horizon, m, dim, seed)| {
            let batches = m.min(horizon);
            let env = if adversarial { EnvKind::Adversarial } else { EnvKind::Stochastic };
            let actions = if adversarial { 2 } else { 1 + (seed % 4) as usize };
            let mut cfg = ExperimentConfig::new(algo, env, horizon, batches, dim, actions);
            cfg.base_seed = seed;
            cfg.trace = true;
            cfg.timing = false;
            cfg
        })
}

/// Rewards reach the policy only at grid endpoints, exactly once per batch,
/// covering exactly that batch's rounds.
pub fn check_batched_information(cfg: &ExperimentConfig) -> std::result::Result<(), TestCaseError> {
    let grid = cfg.build_grid().unwrap();
    let mut rec = RecordingPolicy::default();
    run_episode_with(cfg, 0, &mut rec).unwrap();
    let mut expected = Vec::new();
    for m in 0..grid.num_batches() {
        let (start, end) = grid.batch_bounds(m);
        expected.extend((start + 1..=end).map(Event::Select));
        expected.push(Event::Reveal {
            batch: m,
            rounds: (start + 1..=end).collect(),
        });
    }
    prop_assert_eq!(rec.events, expected);
    Ok(())
}

pub fn check_cum_regret_monotone(cfg: &ExperimentConfig) -> std::result::Result<(), TestCaseError> {
    let r = run_episode(cfg, 1).unwrap();
    let trace = r.trace.unwrap();
    let mut prev = 0.0;
    let mut sum = 0.0;
    for row in &trace {
        prop_assert!(row.inst_regret >= 0.0);
        prop_assert!(row.cum_regret >= prev);
        sum += row.inst_regret;
        prev = row.cum_regret;
    }
    prop_assert_eq!(sum, r.regret);
    prop_assert!((r.batch_regret.iter().sum::<f64>() - r.regret).abs() <= 1e-9 * (1.0 + r.regret));
    Ok(())
}

pub fn check_seed_determinism(cfg: &ExperimentConfig) -> std::result::Result<(), TestCaseError> {
    prop_assert_eq!(run_episode(cfg, 2).unwrap(), run_episode(cfg, 2).unwrap());
    Ok(())
}

/// Stage member sets are pairwise disjoint and hold exactly the explored rounds.
pub fn check_stage_disjointness(cfg: &ExperimentConfig) -> std::result::Result<(), TestCaseError> {
    let mut p = SupSbucb::new(cfg.dim, cfg.horizon, gamma_auto(cfg.horizon, cfg.actions).unwrap()).unwrap();
    run_episode_with(cfg, 0, &mut p).unwrap();
    let mut seen = HashSet::new();
    for (s, stage) in p.stages().iter().enumerate() {
        for &t in stage.members() {
            prop_assert!(seen.insert(t), "round {} in two stages", t);
            prop_assert_eq!(p.decisions()[t - 1], Decision::Explore { stage: s + 1 });
        }
    }
    let explored = p
        .decisions()
        .iter()
        .filter(|d| matches!(d, Decision::Explore { .. }))
        .count();
    prop_assert_eq!(explored, seen.len());
    Ok(())
}

/// Frames are disjoint, sit inside the rounds already revealed, and every
/// round lies in one interval of its batch.
pub fn check_split_plan(grid: &GridSchedule) -> std::result::Result<(), TestCaseError> {
    let parts = grid.num_batches();
    let plan = make_split_plan(grid, parts).unwrap();
    let mut seen = HashSet::new();
    for j in 0..parts {
        for t in plan.frame_rounds(j) {
            prop_assert!(seen.insert(t), "round {} in two frames", t);
            prop_assert_eq!(plan.frame_of(t), Some(j));
            prop_assert!(t <= grid.endpoints()[j]);
        }
    }
    for m in 0..parts {
        let (start, end) = grid.batch_bounds(m);
        let mut covered = start;
        for j in 0..parts {
            let (lo, hi) = plan.interval(m, j);
            prop_assert_eq!(lo, covered);
            prop_assert!(hi >= lo);
            covered = hi;
        }
        prop_assert_eq!(covered, end);
    }
    Ok(())
}

pub fn arb_grid() -> impl Strategy<Value = GridSchedule> {
    (1usize..400, prop::collection::vec(any::<u32>(), 0..8)).prop_map(|(horizon, cuts)| {
        let mut pts: Vec<usize> = cuts.iter().map(|c| 1 + *c as usize % horizon).collect();
        pts.push(horizon);
        pts.sort_unstable();
        pts.dedup();
        GridSchedule::new(pts, horizon).unwrap()
    })
}
