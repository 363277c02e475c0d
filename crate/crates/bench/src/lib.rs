//! Paired benchmark harness for the multi-object search planners.
//!
//! Every policy in a run sees the same worlds, spawns and targets, episode
//! by episode, so per-episode outcomes can be compared with a signed-rank
//! test. Results are written as a versioned CSV plus a plain-text report.

pub mod config;
pub mod csvio;
pub mod error;
pub mod metrics;
pub mod report;
pub mod runner;
pub mod stats;
pub mod sweep;

pub use config::{BenchConfig, SweepConfig};
pub use error::BenchError;
pub use metrics::{mspl, optimal_multi_target_length, spl_term, success_rate, EpisodeResult};
pub use report::BenchReport;
pub use runner::{episode_seeds, run_benchmark, BenchRun, EpisodeSeeds};
pub use stats::{bonferroni_threshold, wilcoxon_signed_rank, Wilcoxon, WilcoxonMethod};
pub use sweep::{scalability_sweep, SweepRow};
