//! Seeded episodes, replication, CSV output, and regret analysis.

pub mod analysis;
pub mod config;
pub mod eigen;
pub mod episode;
pub mod experiment;

pub use analysis::{exponent_target, fit_scaling_exponent, lower_bound_curve, ScalingFit};
pub use config::{
    load_config_file, parse_config_text, trace_path_for, AlgoId, ConfigMap, EnvKind,
    ExperimentConfig, GammaSpec, GridSpec, ThetaSpec, KNOWN_KEYS,
};
pub use eigen::{gram_eigen_check, greedy_gram_min_eigenvalue, EigenCheckConfig, EigenCheckResult};
pub use episode::{build_environment, build_policy, run_episode, run_episode_with, RunResult, TraceRow};
pub use experiment::{
    expand_sweep, mean_and_stderr, run_experiment, run_sweep, write_outputs, write_summary_csv,
    write_trace_csv, Execution, ExperimentSummary, SUMMARY_HEADER, TRACE_HEADER,
};
