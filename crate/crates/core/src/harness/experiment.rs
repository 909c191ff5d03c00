use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{invalid_param, Result};

use super::config::{ConfigMap, ExperimentConfig};
use super::episode::{run_episode, RunResult};

pub const SUMMARY_HEADER: [&str; 11] = [
    "algo", "env", "T", "M", "d", "K", "grid", "seed", "rep", "regret", "wall_ms",
];

pub const TRACE_HEADER: [&str; 6] = ["rep", "t", "batch", "action", "inst_regret", "cum_regret"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Replications on the rayon pool; results stay in rep order.
    Parallel,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub runs: Vec<RunResult>,
    pub mean: f64,
    /// Standard error of the mean; NaN with a single replication.
    pub stderr: f64,
}

pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let runs: Vec<RunResult> = match exec {
        Execution::Serial => (0..cfg.reps).map(|r| run_episode(cfg, r)).collect::<Result<_>>()?,
        Execution::Parallel => (0..cfg.reps)
            .into_par_iter()
            .map(|r| run_episode(cfg, r))
            .collect::<Result<_>>()?,
    };
    let regrets: Vec<f64> = runs.iter().map(|r| r.regret).collect();
    let (mean, stderr) = mean_and_stderr(&regrets);
    Ok(ExperimentSummary {
        config: cfg.clone(),
        runs,
        mean,
        stderr,
    })
}

/// Arithmetic mean and `s/√n` with the `n − 1` sample variance.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Writes the header and then, per summary, its rep rows and aggregate row.
pub fn write_summary_csv<W: Write>(out: W, summaries: &[ExperimentSummary]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        let c = &s.config;
        let prefix = [
            c.algo.to_string(),
            c.env.to_string(),
            c.horizon.to_string(),
            c.batches.to_string(),
            c.dim.to_string(),
            c.actions.to_string(),
            c.grid.to_string(),
            c.base_seed.to_string(),
        ];
        for r in &s.runs {
            let mut row = prefix.to_vec();
            row.extend([r.rep.to_string(), r.regret.to_string(), r.wall_ms.to_string()]);
            w.write_record(&row)?;
        }
        let wall: f64 = s.runs.iter().map(|r| r.wall_ms).sum();
        let mut row = prefix.to_vec();
        row.extend([
            "-1".to_owned(),
            s.mean.to_string(),
            wall.to_string(),
            s.stderr.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Trace rows with `batch` and `action` printed 1-based.
pub fn write_trace_csv<W: Write>(out: W, runs: &[RunResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for row in runs.iter().filter_map(|r| r.trace.as_ref()).flatten() {
        w.write_record([
            row.rep.to_string(),
            row.round.to_string(),
            (row.batch + 1).to_string(),
            (row.action + 1).to_string(),
            row.inst_regret.to_string(),
            row.cum_regret.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the summary to `path` and, if traced, the trace beside it.
pub fn write_outputs(path: &Path, summaries: &[ExperimentSummary]) -> Result<()> {
    write_summary_csv(BufWriter::new(File::create(path)?), summaries)?;
    if summaries.iter().any(|s| s.config.trace) {
        let runs: Vec<RunResult> = summaries.iter().flat_map(|s| s.runs.iter().cloned()).collect();
        let trace_path = super::config::trace_path_for(path);
        write_trace_csv(BufWriter::new(File::create(trace_path)?), &runs)?;
    }
    Ok(())
}

/// One config map per `(T, M)` pair when `T` or `M` holds a comma list.
pub fn expand_sweep(map: &ConfigMap) -> Result<Vec<ConfigMap>> {
    let list = |k: &str| -> Vec<String> {
        map.get(k)
            .map(|v| v.split(',').map(|s| s.trim().to_owned()).collect())
            .unwrap_or_default()
    };
    if map.get("grid").is_some_and(|g| g.contains(',')) {
        return Ok(vec![map.clone()]);
    }
    let (ts, ms) = (list("T"), list("M"));
    if ts.is_empty() || ms.is_empty() {
        return Err(invalid_param("a sweep needs T and M"));
    }
    let mut out = Vec::with_capacity(ts.len() * ms.len());
    for t in &ts {
        for m in &ms {
            let mut one = map.clone();
            one.insert("T".into(), t.clone());
            one.insert("M".into(), m.clone());
            out.push(one);
        }
    }
    Ok(out)
}

/// Runs every point of a sweep in order.
pub fn run_sweep(map: &ConfigMap, exec: Execution) -> Result<Vec<ExperimentSummary>> {
    expand_sweep(map)?
        .iter()
        .map(|m| run_experiment(&ExperimentConfig::from_map(m)?, exec))
        .collect()
}
