//! Frontier selection, path planning and the search episode loop.

pub mod astar;
pub mod control;
pub mod episode;
pub mod frontier;
pub mod search;
pub mod tour;

pub use astar::{plan_distances, plan_path, plan_path_facing};
pub use control::{bearing_error, next_action};
pub use episode::{run_episode, sample_start, Episode, EpisodeOutcome, FailReason, PolicyConfig, Variant};
pub use frontier::*;
pub use search::{Goal, SearchState};
pub use tour::{optimal_tour, Tour};
