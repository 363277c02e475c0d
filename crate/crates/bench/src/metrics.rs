use finder_core::planner::{optimal_tour, FailReason, Variant};
use finder_core::world::GridWorld;
use finder_core::{Cell, TourError};
use serde::{Deserialize, Serialize};

use crate::error::BenchError;

/// One row of the per-episode table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeResult {
    /// Seed of the episode's world; identical across policies in a run.
    pub seed: u64,
    pub policy: Variant,
    pub success: bool,
    /// Executed path length `p`, in cells.
    pub path_length: u32,
    /// Optimal tour length `ℓ`, in cells.
    pub optimal_length: u32,
    pub steps: u32,
    /// Step at which each target slot was found.
    pub found_steps: Vec<Option<u32>>,
    pub fail_reason: Option<FailReason>,
}

/// Shortest open tour from `start` through all targets, over every visiting
/// order, with exact grid distances.
pub fn optimal_multi_target_length(world: &GridWorld, start: Cell, targets: &[Cell]) -> Result<u32, TourError> {
    optimal_tour(world, start, targets).map(|t| t.length)
}

/// Per-episode term `S·ℓ / max(p, ℓ)`. An episode that starts on its only
/// target (`p = ℓ = 0`) scores `S`.
pub fn spl_term(r: &EpisodeResult) -> f64 {
    if !r.success {
        return 0.0;
    }
    let denom = r.path_length.max(r.optimal_length);
    if denom == 0 {
        1.0
    } else {
        r.optimal_length as f64 / denom as f64
    }
}

pub fn mspl(results: &[EpisodeResult]) -> Result<f64, BenchError> {
    if results.is_empty() {
        return Err(BenchError::Empty);
    }
    Ok(results.iter().map(spl_term).sum::<f64>() / results.len() as f64)
}

pub fn success_rate(results: &[EpisodeResult]) -> Result<f64, BenchError> {
    if results.is_empty() {
        return Err(BenchError::Empty);
    }
    Ok(results.iter().filter(|r| r.success).count() as f64 / results.len() as f64)
}

/// Mean step count over successful episodes; `None` when there are none.
pub fn mean_successful_steps(results: &[EpisodeResult]) -> Option<f64> {
    let steps: Vec<f64> = results.iter().filter(|r| r.success).map(|r| r.steps as f64).collect();
    (!steps.is_empty()).then(|| steps.iter().sum::<f64>() / steps.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn ep(success: bool, p: u32, l: u32) -> EpisodeResult {
        EpisodeResult {
            seed: 0,
            policy: Variant::Full,
            success,
            path_length: p,
            optimal_length: l,
            steps: p,
            found_steps: vec![],
            fail_reason: (!success).then_some(FailReason::Budget),
        }
    }

    #[test]
    fn optimal_path_scores_one() {
        assert_eq!(mspl(&[ep(true, 10, 10)]).unwrap(), 1.0);
    }

    #[test]
    fn failure_scores_zero() {
        assert_eq!(mspl(&[ep(false, 3, 10)]).unwrap(), 0.0);
    }

    #[test]
    fn two_episode_mean() {
        let v = mspl(&[ep(true, 20, 10), ep(true, 10, 10)]).unwrap();
        assert!((v - 0.75).abs() <= 1e-12 * 0.75);
    }

    #[test]
    fn shorter_than_optimal_is_capped() {
        // Stopping within epsilon can make p < l; the term is then 1.
        assert_eq!(mspl(&[ep(true, 8, 10)]).unwrap(), 1.0);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(mspl(&[]), Err(BenchError::Empty)));
        assert!(matches!(success_rate(&[]), Err(BenchError::Empty)));
    }

    #[test]
    fn success_rates() {
        assert_eq!(success_rate(&vec![ep(true, 1, 1); 4]).unwrap(), 1.0);
        assert_eq!(success_rate(&vec![ep(false, 1, 1); 4]).unwrap(), 0.0);
        let mixed = [ep(true, 1, 1), ep(true, 1, 1), ep(false, 1, 1), ep(true, 1, 1)];
        assert_eq!(success_rate(&mixed).unwrap(), 0.75);
    }

    #[test]
    fn mean_steps_ignores_failures() {
        let rs = [ep(true, 10, 1), ep(false, 99, 1), ep(true, 20, 1)];
        assert_eq!(mean_successful_steps(&rs), Some(15.0));
        assert_eq!(mean_successful_steps(&rs[1..2]), None);
    }
}
