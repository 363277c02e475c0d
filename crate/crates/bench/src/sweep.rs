//! Step counts of successful episodes as the number of targets grows.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SweepConfig;
use crate::error::BenchError;
use crate::runner::{episode_seeds, prepare_trial, run_trial, with_workers};

/// Episodes launched together; fixed so results do not depend on the
/// worker count.
const BATCH: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub attempts: usize,
    pub successes: usize,
    pub mean_steps: Option<f64>,
    pub median_steps: Option<f64>,
    /// The attempt cap was hit before enough successes were collected.
    pub partial: bool,
}

/// For each K, runs episodes in index order until `successes` of them
/// succeed or `attempt_cap` have been tried.
pub fn scalability_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, BenchError> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.ks.len());
    for &k in &cfg.ks {
        let world = finder_core::world::WorldParams { targets: k, ..cfg.world.clone() };
        let mut steps: Vec<u32> = Vec::new();
        let mut attempts = 0;
        while steps.len() < cfg.successes && attempts < cfg.attempt_cap {
            let hi = (attempts + BATCH).min(cfg.attempt_cap);
            let batch: Vec<Option<u32>> = with_workers(cfg.workers, || {
                (attempts..hi)
                    .into_par_iter()
                    .map(|i| {
                        let stream = ((k as u64) << 32) | i as u64;
                        let trial = prepare_trial(episode_seeds(cfg.seed, stream), &world, &cfg.policy)?;
                        let r = run_trial(&trial, cfg.variant, &cfg.policy, None)?;
                        Ok(r.success.then_some(r.steps))
                    })
                    .collect::<Result<Vec<_>, BenchError>>()
            })??;
            for s in batch {
                attempts += 1;
                if let Some(s) = s {
                    steps.push(s);
                    if steps.len() == cfg.successes {
                        break;
                    }
                }
            }
        }
        rows.push(SweepRow {
            k,
            attempts,
            successes: steps.len(),
            mean_steps: mean(&steps),
            median_steps: median(&steps),
            partial: steps.len() < cfg.successes,
        });
    }
    Ok(rows)
}

fn mean(xs: &[u32]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().map(|&x| x as f64).sum::<f64>() / xs.len() as f64)
}

fn median(xs: &[u32]) -> Option<f64> {
    let mut v = xs.to_vec();
    v.sort_unstable();
    let n = v.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(v[n / 2] as f64),
        _ => Some((v[n / 2 - 1] as f64 + v[n / 2] as f64) / 2.0),
    }
}

pub fn render_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::from("k,attempts,successes,mean_steps,median_steps,partial\n");
    let fmt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.3}"));
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k,
            r.attempts,
            r.successes,
            fmt(r.mean_steps),
            fmt(r.median_steps),
            u8::from(r.partial)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3, 1, 2]), Some(2.0));
        assert_eq!(median(&[4, 1, 3, 2]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn cap_flags_partial() {
        let cfg = SweepConfig {
            ks: vec![2],
            successes: 5,
            attempt_cap: 5,
            policy: finder_core::planner::PolicyConfig { budget: 1, ..Default::default() },
            world: finder_core::world::WorldParams { width: 32, height: 32, ..Default::default() },
            ..SweepConfig::default()
        };
        let rows = scalability_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].attempts, rows[0].successes, rows[0].partial), (5, 0, true));
    }
}
