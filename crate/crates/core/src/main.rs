use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use batchbandit::grids::GridSchedule;
use batchbandit::harness::{
    load_config_file, lower_bound_curve, run_experiment, run_sweep, write_outputs,
    write_summary_csv, ConfigMap, Execution, ExperimentConfig, ExperimentSummary, GridSpec,
};

#[derive(Parser)]
#[command(name = "batchbandit", version, about = "Batched linear contextual bandit simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write the summary CSV.
    Run(RunArgs),
    /// Run every (T, M) pair listed in a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        serial: bool,
    },
    /// Print the lower-bound curve for a grid.
    Bounds {
        /// uniform | minimax | geometric | t1,t2,...
        #[arg(long)]
        grid: String,
        #[arg(long = "T")]
        horizon: Option<usize>,
        #[arg(long = "M")]
        batches: Option<usize>,
        #[arg(long)]
        d: usize,
        /// One or more comma-separated values in [0, 1].
        #[arg(long)]
        delta: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    env: Option<String>,
    #[arg(long = "T")]
    horizon: Option<String>,
    /// Batch count, or `T` for fully online.
    #[arg(long = "M")]
    batches: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long = "K")]
    actions: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    cov: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    ridge: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    trace: bool,
    /// Record wall time per rep (on|off).
    #[arg(long)]
    timing: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    serial: bool,
}

impl RunArgs {
    fn to_map(&self) -> anyhow::Result<ConfigMap> {
        let mut map = match &self.config {
            Some(p) => load_config_file(p).with_context(|| format!("reading {}", p.display()))?,
            None => ConfigMap::new(),
        };
        let flags = [
            ("algo", &self.algo),
            ("env", &self.env),
            ("T", &self.horizon),
            ("M", &self.batches),
            ("d", &self.d),
            ("K", &self.actions),
            ("grid", &self.grid),
            ("gamma", &self.gamma),
            ("kappa", &self.kappa),
            ("cov", &self.cov),
            ("theta", &self.theta),
            ("noise", &self.noise),
            ("ridge", &self.ridge),
            ("eps", &self.eps),
            ("reps", &self.reps),
            ("seed", &self.seed),
            ("timing", &self.timing),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_owned(), v.clone());
            }
        }
        if self.trace {
            map.insert("trace".into(), "true".into());
        }
        if let Some(out) = &self.out {
            map.insert("out".into(), out.display().to_string());
        }
        Ok(map)
    }
}

fn exec(serial: bool) -> Execution {
    if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    }
}

fn emit(summaries: &[ExperimentSummary], out: Option<PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            write_outputs(&path, summaries).with_context(|| format!("writing {}", path.display()))?;
            for s in summaries {
                let c = &s.config;
                println!(
                    "{} {} T={} M={} d={} K={} reps={}: mean regret {} (se {})",
                    c.algo, c.env, c.horizon, c.batches, c.dim, c.actions, c.reps, s.mean, s.stderr
                );
            }
        }
        None => {
            if summaries.iter().any(|s| s.config.trace) {
                bail!("--trace needs --out");
            }
            write_summary_csv(io::stdout().lock(), summaries)?;
        }
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let cfg = ExperimentConfig::from_map(&args.to_map()?)?;
            let summary = run_experiment(&cfg, exec(args.serial))?;
            emit(&[summary], cfg.out)
        }
        Command::Sweep { config, out, serial } => {
            let mut map = load_config_file(&config).with_context(|| format!("reading {}", config.display()))?;
            if let Some(o) = &out {
                map.insert("out".into(), o.display().to_string());
            }
            let out = map.get("out").map(PathBuf::from);
            let summaries = run_sweep(&map, exec(serial))?;
            emit(&summaries, out)
        }
        Command::Bounds {
            grid,
            horizon,
            batches,
            d,
            delta,
        } => {
            let spec: GridSpec = grid.parse()?;
            let schedule: GridSchedule = match spec {
                GridSpec::Explicit(g) => g,
                other => {
                    let (Some(t), Some(m)) = (horizon, batches) else {
                        bail!("--grid {other} needs --T and --M");
                    };
                    other.build(t, m, d)?
                }
            };
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "grid,d,delta,lower_bound")?;
            for part in delta.split(',') {
                let delta: f64 = part.trim().parse().with_context(|| format!("bad delta {part:?}"))?;
                let v = lower_bound_curve(&schedule, d, delta)?;
                writeln!(stdout, "\"{schedule}\",{d},{delta},{v}")?;
            }
            Ok(())
        }
    }
}
