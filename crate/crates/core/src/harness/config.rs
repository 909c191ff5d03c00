//! Experiment configuration.
//!
//! Configurations come from flat `key = value` text (one pair per line, `#`
//! starts a comment) or from CLI flags with the same names. Both are merged
//! into a string map first, so CLI values override file values uniformly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::environments::{CovarianceMode, NoiseKind};
use crate::error::{invalid_param, Error, Result};
use crate::grids::{geometric_grid, minimax_grid, uniform_grid, GridSchedule};
use crate::policies::{gamma_auto, DEFAULT_EPS};

pub type ConfigMap = BTreeMap<String, String>;

/// Keys accepted in config files and as CLI flags.
pub const KNOWN_KEYS: &[&str] = &[
    "algo", "env", "T", "M", "d", "K", "grid", "gamma", "kappa", "cov", "theta", "noise", "ridge",
    "eps", "reps", "seed", "trace", "timing", "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoId {
    Sbucb,
    SupSbucb,
    Pure,
    PureSplit,
}

impl AlgoId {
    pub const ALL: [AlgoId; 4] = [AlgoId::Sbucb, AlgoId::SupSbucb, AlgoId::Pure, AlgoId::PureSplit];
}

impl FromStr for AlgoId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sbucb" => Ok(Self::Sbucb),
            "supsbucb" => Ok(Self::SupSbucb),
            "pure" => Ok(Self::Pure),
            "pure-split" => Ok(Self::PureSplit),
            other => Err(invalid_param(format!("unknown algo {other:?}"))),
        }
    }
}

impl fmt::Display for AlgoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sbucb => "sbucb",
            Self::SupSbucb => "supsbucb",
            Self::Pure => "pure",
            Self::PureSplit => "pure-split",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    Stochastic,
    Adversarial,
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stochastic" => Ok(Self::Stochastic),
            "adversarial" => Ok(Self::Adversarial),
            other => Err(invalid_param(format!("unknown env {other:?}"))),
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Stochastic => "stochastic",
            Self::Adversarial => "adversarial",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridSpec {
    Uniform,
    Minimax,
    Geometric,
    Explicit(GridSchedule),
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "minimax" => Ok(Self::Minimax),
            "geometric" => Ok(Self::Geometric),
            list => Ok(Self::Explicit(list.parse()?)),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Minimax => f.write_str("minimax"),
            Self::Geometric => f.write_str("geometric"),
            Self::Explicit(g) => write!(f, "{g}"),
        }
    }
}

impl GridSpec {
    pub fn build(&self, horizon: usize, batches: usize, dim: usize) -> Result<GridSchedule> {
        match self {
            Self::Uniform => uniform_grid(horizon, batches),
            Self::Minimax => minimax_grid(horizon, batches, dim),
            Self::Geometric => geometric_grid(horizon, batches, dim),
            Self::Explicit(g) => Ok(g.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaSpec {
    Auto,
    Fixed(f64),
}

impl FromStr for GammaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        let g = parse_f64("gamma", s)?;
        if g < 0.0 {
            return Err(invalid_param(format!("gamma must be ≥ 0, got {g}")));
        }
        Ok(Self::Fixed(g))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThetaSpec {
    /// Uniform on the sphere of this radius.
    Sphere(f64),
    Fixed(Vec<f64>),
}

impl FromStr for ThetaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(r) = s.strip_prefix("sphere:") {
            return Ok(Self::Sphere(parse_f64("theta radius", r)?));
        }
        if let Some(list) = s.strip_prefix("fixed:") {
            let v = list
                .split(',')
                .map(|p| parse_f64("theta entry", p))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self::Fixed(v));
        }
        Err(invalid_param(format!(
            "theta must be sphere:<radius> or fixed:<v1,v2,...>, got {s:?}"
        )))
    }
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sphere(r) => write!(f, "sphere:{r}"),
            Self::Fixed(v) => {
                f.write_str("fixed:")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algo: AlgoId,
    pub env: EnvKind,
    pub horizon: usize,
    pub batches: usize,
    pub dim: usize,
    pub actions: usize,
    pub grid: GridSpec,
    pub gamma: GammaSpec,
    pub kappa: f64,
    pub cov: CovarianceMode,
    pub theta: ThetaSpec,
    pub noise: NoiseKind,
    pub ridge: f64,
    pub eps: f64,
    pub reps: usize,
    pub base_seed: u64,
    pub trace: bool,
    /// Record wall-clock time per replication. Off makes the summary CSV a
    /// pure function of the configuration.
    pub timing: bool,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for everything but the problem shape.
    pub fn new(algo: AlgoId, env: EnvKind, horizon: usize, batches: usize, dim: usize, actions: usize) -> Self {
        Self {
            algo,
            env,
            horizon,
            batches,
            dim,
            actions,
            grid: GridSpec::Uniform,
            gamma: GammaSpec::Auto,
            kappa: 1.0,
            cov: CovarianceMode::Isotropic,
            theta: ThetaSpec::Sphere(1.0),
            noise: NoiseKind::Gaussian,
            ridge: 1.0,
            eps: DEFAULT_EPS,
            reps: 1,
            base_seed: 0,
            trace: false,
            timing: true,
            out: None,
        }
    }

    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        if let Some(k) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(invalid_param(format!("unknown config key {k:?}")));
        }
        let get = |k: &str| map.get(k).map(String::as_str);

        let grid: GridSpec = get("grid").unwrap_or("uniform").parse()?;
        let (horizon, batches) = match &grid {
            GridSpec::Explicit(g) => {
                let horizon = g.horizon();
                if let Some(t) = get("T") {
                    let t = parse_usize("T", t)?;
                    if t != horizon {
                        return Err(Error::InvalidGrid(format!(
                            "grid ends at {horizon} but T = {t}"
                        )));
                    }
                }
                if let Some(m) = get("M") {
                    let m = parse_batches(m, horizon)?;
                    if m != g.num_batches() {
                        return Err(Error::InvalidGrid(format!(
                            "grid has {} batches but M = {m}",
                            g.num_batches()
                        )));
                    }
                }
                (horizon, g.num_batches())
            }
            _ => {
                let horizon = parse_usize("T", get("T").ok_or_else(|| invalid_param("missing T"))?)?;
                let batches = parse_batches(get("M").ok_or_else(|| invalid_param("missing M"))?, horizon)?;
                (horizon, batches)
            }
        };

        let mut cfg = Self::new(
            get("algo").unwrap_or("sbucb").parse()?,
            get("env").unwrap_or("stochastic").parse()?,
            horizon,
            batches,
            get("d").map(|v| parse_usize("d", v)).transpose()?.unwrap_or(2),
            get("K").map(|v| parse_usize("K", v)).transpose()?.unwrap_or(2),
        );
        cfg.grid = grid;
        if let Some(v) = get("gamma") {
            cfg.gamma = v.parse()?;
        }
        if let Some(v) = get("kappa") {
            cfg.kappa = parse_f64("kappa", v)?;
        }
        if let Some(v) = get("cov") {
            cfg.cov = v.parse()?;
        }
        if let Some(v) = get("theta") {
            cfg.theta = v.parse()?;
        }
        if let Some(v) = get("noise") {
            cfg.noise = v.parse()?;
        }
        if let Some(v) = get("ridge") {
            cfg.ridge = parse_f64("ridge", v)?;
        }
        if let Some(v) = get("eps") {
            cfg.eps = parse_f64("eps", v)?;
        }
        if let Some(v) = get("reps") {
            cfg.reps = parse_usize("reps", v)?;
        }
        if let Some(v) = get("seed") {
            cfg.base_seed = v
                .parse()
                .map_err(|_| invalid_param(format!("seed must be a u64, got {v:?}")))?;
        }
        if let Some(v) = get("trace") {
            cfg.trace = parse_bool("trace", v)?;
        }
        if let Some(v) = get("timing") {
            cfg.timing = parse_bool("timing", v)?;
        }
        cfg.out = get("out").map(PathBuf::from);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(invalid_param("d must be ≥ 1"));
        }
        if self.actions == 0 {
            return Err(invalid_param("K must be ≥ 1"));
        }
        if self.reps == 0 {
            return Err(invalid_param("reps must be ≥ 1"));
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(invalid_param(format!("kappa must lie in (0, 1], got {}", self.kappa)));
        }
        if !(self.ridge > 0.0 && self.ridge.is_finite()) {
            return Err(invalid_param(format!("ridge must be > 0, got {}", self.ridge)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(invalid_param(format!("eps must be > 0, got {}", self.eps)));
        }
        if self.env == EnvKind::Adversarial && (self.actions != 2 || self.dim < 2) {
            return Err(invalid_param("adversarial env needs K = 2 and d ≥ 2"));
        }
        match &self.theta {
            ThetaSpec::Sphere(r) if !(0.0..=1.0).contains(r) => {
                return Err(invalid_param(format!("sphere radius must lie in [0, 1], got {r}")));
            }
            ThetaSpec::Fixed(v) if v.len() != self.dim => {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: v.len(),
                });
            }
            _ => {}
        }
        self.build_grid().map(|_| ())
    }

    pub fn build_grid(&self) -> Result<GridSchedule> {
        let g = self.grid.build(self.horizon, self.batches, self.dim)?;
        if g.horizon() != self.horizon || g.num_batches() != self.batches {
            return Err(Error::InvalidGrid(format!(
                "grid {g} does not match T = {}, M = {}",
                self.horizon, self.batches
            )));
        }
        Ok(g)
    }

    pub fn gamma_value(&self) -> Result<f64> {
        match self.gamma {
            GammaSpec::Auto => gamma_auto(self.horizon, self.actions),
            GammaSpec::Fixed(g) => Ok(g),
        }
    }

    /// Where the trace CSV goes: `<stem>.trace.csv` beside the summary.
    pub fn trace_path(&self) -> Option<PathBuf> {
        self.out.as_deref().map(trace_path_for)
    }
}

pub fn trace_path_for(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_owned());
    out.with_file_name(format!("{stem}.trace.csv"))
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<ConfigMap> {
    let mut map = ConfigMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            invalid_param(format!("line {}: expected `key = value`, got {raw:?}", lineno + 1))
        })?;
        map.insert(k.trim().to_owned(), v.trim().to_owned());
    }
    Ok(map)
}

pub fn load_config_file(path: &Path) -> Result<ConfigMap> {
    parse_config_text(&std::fs::read_to_string(path)?)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| invalid_param(format!("{key} must be a non-negative integer, got {v:?}")))
}

/// `M` also accepts `T`, meaning one round per batch.
fn parse_batches(v: &str, horizon: usize) -> Result<usize> {
    if v.trim() == "T" {
        Ok(horizon)
    } else {
        parse_usize("M", v)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| invalid_param(format!("{key} must be a number, got {v:?}")))?;
    if !x.is_finite() {
        return Err(invalid_param(format!("{key} must be finite")));
    }
    Ok(x)
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(invalid_param(format!("{key} must be a boolean, got {other:?}"))),
    }
}
