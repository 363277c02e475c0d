//! Paired benchmark execution.

use std::path::Path;

use finder_core::mapping::{occupancy_pgm, write_pgm};
use finder_core::planner::{sample_start, Episode, PolicyConfig, Variant};
use finder_core::semantics::{similarity_for_world, SimilarityTable};
use finder_core::world::{generate_world, save_scenario, GridWorld, RobotState, WorldParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::BenchConfig;
use crate::error::BenchError;
use crate::metrics::{optimal_multi_target_length, EpisodeResult};
use crate::report::BenchReport;

/// Seeds of one episode, shared by every policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpisodeSeeds {
    pub world: u64,
    pub spawn: u64,
    pub policy: u64,
}

/// Derives the seeds of episode `index` from the run's base seed. Each index
/// reads its own ChaCha stream, so seeds never depend on scheduling.
pub fn episode_seeds(base: u64, index: u64) -> EpisodeSeeds {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    EpisodeSeeds { world: rng.gen(), spawn: rng.gen(), policy: rng.gen() }
}

/// Everything an episode needs before a policy is chosen.
#[derive(Clone, Debug)]
pub struct Trial {
    pub seeds: EpisodeSeeds,
    pub world: GridWorld,
    pub table: SimilarityTable,
    pub start: RobotState,
    pub optimal_length: u32,
}

pub fn prepare_trial(seeds: EpisodeSeeds, params: &WorldParams, policy: &PolicyConfig) -> Result<Trial, BenchError> {
    let world = generate_world(seeds.world, params)?;
    let table = similarity_for_world(&world, &params.affinity);
    let start = sample_start(&world, &policy.kinematics, seeds.spawn).ok_or(BenchError::NoSpawn(seeds.world))?;
    let optimal_length = optimal_multi_target_length(&world, start.cell, &world.target_cells())?;
    Ok(Trial { seeds, world, table, start, optimal_length })
}

/// Map dump location for one episode: files are written as
/// `<dir>/<stem>_<kind>.pgm`.
#[derive(Clone, Copy, Debug)]
pub struct Dump<'a> {
    pub dir: &'a Path,
    pub stem: &'a str,
}

pub fn run_trial(
    trial: &Trial,
    variant: Variant,
    base: &PolicyConfig,
    dump: Option<Dump<'_>>,
) -> Result<EpisodeResult, BenchError> {
    let cfg = PolicyConfig { variant, ..base.clone() };
    let mut episode = Episode::new(&trial.world, &trial.table, cfg, trial.start, trial.seeds.policy)?;
    while episode.step()?.is_none() {}
    if let Some(d) = dump {
        write_file(d.dir, &format!("{}_occupancy.pgm", d.stem), &occupancy_pgm(episode.occupancy()))?;
        if let Some(u) = episode.unified() {
            let max = u.as_slice().iter().copied().fold(0.0, f64::max);
            write_file(d.dir, &format!("{}_unified.pgm", d.stem), &write_pgm(u, max))?;
        }
    }
    let out = episode.outcome().cloned().unwrap_or_else(|| unreachable!());
    Ok(EpisodeResult {
        seed: trial.seeds.world,
        policy: variant,
        success: out.success,
        path_length: out.path_length,
        optimal_length: trial.optimal_length,
        steps: out.steps,
        found_steps: out.found_steps,
        fail_reason: out.fail_reason,
    })
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), BenchError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| BenchError::io(path, e))
}

/// Runs `f` on a pool of `workers` threads (0 = default size).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, BenchError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

#[derive(Clone, Debug)]
pub struct BenchRun {
    /// Episode-major, policies in config order within each episode.
    pub results: Vec<EpisodeResult>,
    pub report: BenchReport,
}

impl BenchRun {
    pub fn for_policy(&self, v: Variant) -> Vec<EpisodeResult> {
        self.results.iter().filter(|r| r.policy == v).cloned().collect()
    }
}

/// Runs every policy on the same `episodes` trials. With `dump_dir`, each
/// episode's scenario and final maps are written there.
pub fn run_benchmark(cfg: &BenchConfig, dump_dir: Option<&Path>) -> Result<BenchRun, BenchError> {
    cfg.validate()?;
    if let Some(dir) = dump_dir {
        std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    }
    let per_episode: Vec<Vec<EpisodeResult>> = with_workers(cfg.workers, || {
        (0..cfg.episodes)
            .into_par_iter()
            .map(|i| {
                let trial = prepare_trial(episode_seeds(cfg.seed, i as u64), &cfg.world, &cfg.policy)?;
                if let Some(dir) = dump_dir {
                    let path = dir.join(format!("ep{i:04}.scenario"));
                    save_scenario(&trial.world, &path)?;
                }
                cfg.policies
                    .iter()
                    .map(|&v| {
                        let stem = format!("ep{i:04}_{}", v.name());
                        let dump = dump_dir.map(|dir| Dump { dir, stem: &stem });
                        run_trial(&trial, v, &cfg.policy, dump)
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, BenchError>>()
    })??;
    let results: Vec<EpisodeResult> = per_episode.into_iter().flatten().collect();
    let report = BenchReport::build(cfg, &results)?;
    Ok(BenchRun { results, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(episode_seeds(1, 5), episode_seeds(1, 5));
        assert_ne!(episode_seeds(1, 5), episode_seeds(1, 6));
        assert_ne!(episode_seeds(1, 5), episode_seeds(2, 5));
    }
}
