//! TOML run configurations.
//!
//! ```toml
//! seed = 7
//! episodes = 100
//! policies = ["full", "no_sto", "no_oto", "greedy_frontier", "random_walk"]
//! workers = 0        # 0 lets the thread pool decide
//!
//! [world]            # world generator parameters
//! width = 64
//! height = 64
//! targets = 3
//!
//! [policy]           # shared planner settings; `variant` is ignored
//! epsilon = 2
//! budget = 500
//! ```

use std::path::Path;

use finder_core::planner::{PolicyConfig, Variant};
use finder_core::world::{WorldParams, MAX_TARGETS};
use serde::{Deserialize, Serialize};

use crate::error::BenchError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    /// The one seed every episode's world, spawn and policy seed derive from.
    pub seed: u64,
    pub episodes: usize,
    pub policies: Vec<Variant>,
    /// Worker threads; 0 means the pool default.
    pub workers: usize,
    /// Family-wise significance level for the pairwise tests.
    pub alpha: f64,
    pub world: WorldParams,
    pub policy: PolicyConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            episodes: 100,
            policies: vec![
                Variant::Full,
                Variant::NoSto,
                Variant::NoOto,
                Variant::GreedyFrontier,
                Variant::RandomWalk,
            ],
            workers: 0,
            alpha: 0.05,
            world: WorldParams::default(),
            policy: PolicyConfig::default(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let mut problems = Vec::new();
        if self.episodes == 0 {
            problems.push("episodes must be at least 1".to_string());
        }
        if self.policies.is_empty() {
            problems.push("policies must not be empty".to_string());
        }
        let mut seen = self.policies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.policies.len() {
            problems.push("policies must be distinct".to_string());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            problems.push(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        check_shared(&self.world, &self.policy, &mut problems);
        if problems.is_empty() {
            Ok(())
        } else {
            Err(BenchError::Config(problems))
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        load_toml(path.as_ref())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub seed: u64,
    /// Target counts to sweep.
    pub ks: Vec<usize>,
    /// Successful episodes to collect per K.
    pub successes: usize,
    /// Episodes attempted per K before giving up.
    pub attempt_cap: usize,
    pub workers: usize,
    pub variant: Variant,
    /// `world.targets` is overridden by each K.
    pub world: WorldParams,
    pub policy: PolicyConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 11,
            ks: (1..=MAX_TARGETS).collect(),
            successes: 100,
            attempt_cap: 1000,
            workers: 0,
            variant: Variant::Full,
            world: WorldParams::default(),
            policy: PolicyConfig::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let mut problems = Vec::new();
        if self.ks.is_empty() {
            problems.push("ks must not be empty".to_string());
        }
        if let Some(k) = self.ks.iter().find(|&&k| k == 0 || k > MAX_TARGETS) {
            problems.push(format!("K out of range: {k} (expected 1..={MAX_TARGETS})"));
        }
        if self.successes == 0 {
            problems.push("successes must be at least 1".to_string());
        }
        if self.attempt_cap < self.successes {
            problems.push("attempt_cap must be at least successes".to_string());
        }
        check_shared(&self.world, &self.policy, &mut problems);
        if problems.is_empty() {
            Ok(())
        } else {
            Err(BenchError::Config(problems))
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        load_toml(path.as_ref())
    }
}

fn check_shared(world: &WorldParams, policy: &PolicyConfig, problems: &mut Vec<String>) {
    if world.targets == 0 || world.targets > MAX_TARGETS {
        problems.push(format!("K out of range: {} (expected 1..={MAX_TARGETS})", world.targets));
    }
    if let Err(e) = policy.validate() {
        problems.push(e.to_string());
    }
}

fn load_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    toml::from_str(&text).map_err(|e| BenchError::Config(vec![format!("{}: {e}", path.display())]))
}
