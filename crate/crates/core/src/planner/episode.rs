//! The per-step search loop: observe, update maps and scores, pick a goal,
//! act.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::astar::{plan_distances, plan_path_facing};
use super::control::{bearing_error, next_action};
use super::frontier::{extract_frontiers, hold_frontier, nearest_frontier, score_frontiers, select_frontier_within, HoldRule};
use super::search::{Goal, SearchState};
use super::tour::{optimal_tour, Tour};
use crate::error::EpisodeError;
use crate::grid::Cell;
use crate::mapping::{cone_mask, OccupancyMap, SemanticMap};
use crate::scoremap::{drop_target_channel, fuse, fuse_single, oto_compute, sto_update, ScoreStack, UnifiedMap};
use crate::semantics::{scene_score, SimilarityTable};
use crate::world::{observe, shortest_path, step, Action, GridWorld, Kinematics, RobotState, SensorConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Frontiers ranked by the fused StO + OtO map.
    Full,
    /// OtO map only.
    NoSto,
    /// StO map only.
    NoOto,
    /// Nearest frontier; score maps are never built.
    GreedyFrontier,
    /// Uniform over Forward, TurnLeft and TurnRight.
    RandomWalk,
    /// Follows the optimal tour on the true map.
    Oracle,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Full,
        Variant::NoSto,
        Variant::NoOto,
        Variant::GreedyFrontier,
        Variant::RandomWalk,
        Variant::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoSto => "no_sto",
            Variant::NoOto => "no_oto",
            Variant::GreedyFrontier => "greedy_frontier",
            Variant::RandomWalk => "random_walk",
            Variant::Oracle => "oracle",
        }
    }

    fn uses_sto(self) -> bool {
        matches!(self, Variant::Full | Variant::NoOto)
    }

    fn uses_oto(self) -> bool {
        matches!(self, Variant::Full | Variant::NoSto)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = EpisodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| EpisodeError::Config(format!("unknown policy `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    pub variant: Variant,
    /// Path distance, in cells, at which a seen target counts as found.
    pub epsilon: u32,
    /// Maximum number of actions, the final Stop included.
    pub budget: u32,
    pub sensor: SensorConfig,
    pub kinematics: Kinematics,
    /// Cost of entering an unknown cell when planning; free cells cost 1.
    pub unknown_cost: f64,
    /// Chebyshev radius of the window a frontier reads its score from.
    pub score_radius: u32,
    /// Relative margin a new frontier must win by before the current frontier
    /// goal is abandoned. 0 reselects freely every step; 1 keeps the goal
    /// until it is reached or stops being a frontier.
    pub goal_margin: f64,
    /// Frontiers scoring within this fraction of the best count as tied and
    /// the nearest of them is chosen. 0 is a strict argmax.
    pub score_tolerance: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Full,
            epsilon: 2,
            budget: 500,
            sensor: SensorConfig::default(),
            kinematics: Kinematics::default(),
            unknown_cost: 1.0,
            score_radius: 3,
            goal_margin: 1.0,
            score_tolerance: 0.0,
        }
    }
}

impl PolicyConfig {
    pub fn with_variant(variant: Variant) -> Self {
        Self { variant, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), EpisodeError> {
        let mut problems = Vec::new();
        if self.budget == 0 {
            problems.push("budget must be at least 1".to_string());
        }
        if !self.sensor.is_valid() {
            problems.push("sensor range must be ≥ 0 and fov in (0, 360]".to_string());
        }
        if !self.kinematics.is_valid() {
            problems.push("turn increment must be a positive divisor of 360".to_string());
        }
        if !(self.unknown_cost.is_finite() && self.unknown_cost > 0.0) {
            problems.push(format!("unknown_cost must be positive, got {}", self.unknown_cost));
        }
        if !(0.0..=1.0).contains(&self.goal_margin) {
            problems.push(format!("goal_margin must be in [0, 1], got {}", self.goal_margin));
        }
        if !(0.0..=1.0).contains(&self.score_tolerance) {
            problems.push(format!("score_tolerance must be in [0, 1], got {}", self.score_tolerance));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(EpisodeError::Config(problems.join("; ")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailReason {
    /// Ran out of actions.
    Budget,
    /// No reachable frontier left while targets remain.
    Exhausted,
}

impl FailReason {
    pub fn name(self) -> &'static str {
        match self {
            FailReason::Budget => "budget",
            FailReason::Exhausted => "exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub success: bool,
    /// Length of the executed trajectory in cells; a diagonal move counts 2.
    pub path_length: u32,
    /// Number of Forward actions that moved the robot.
    pub travelled: u32,
    pub steps: u32,
    /// Step at which each target slot was found.
    pub found_steps: Vec<Option<u32>>,
    pub found_order: Vec<usize>,
    pub fail_reason: Option<FailReason>,
    /// How many times a score map was updated or read.
    pub score_queries: u64,
}

/// Uniform spawn over free cells that reach every target, excluding the
/// target cells themselves, with a heading on the turn lattice.
pub fn sample_start(world: &GridWorld, kin: &Kinematics, seed: u64) -> Option<RobotState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets = world.target_cells();
    let cells: Vec<Cell> = world.spawn_cells().into_iter().filter(|c| !targets.contains(c)).collect();
    if cells.is_empty() {
        return None;
    }
    let cell = cells[rng.gen_range(0..cells.len())];
    let inc = kin.turn_increment_deg.max(1);
    let heading = rng.gen_range(0..360 / inc) * inc;
    Some(RobotState::new(cell, heading))
}

/// One search episode as an explicit state machine.
pub struct Episode<'a> {
    world: &'a GridWorld,
    table: &'a SimilarityTable,
    config: PolicyConfig,
    robot: RobotState,
    occ: OccupancyMap,
    sem: SemanticMap,
    sto: ScoreStack,
    unified: Option<UnifiedMap>,
    state: SearchState,
    path_length: u32,
    rng: ChaCha8Rng,
    tour: Option<Tour>,
    score_queries: u64,
    outcome: Option<EpisodeOutcome>,
}

impl<'a> Episode<'a> {
    pub fn new(
        world: &'a GridWorld,
        table: &'a SimilarityTable,
        config: PolicyConfig,
        start: RobotState,
        seed: u64,
    ) -> Result<Self, EpisodeError> {
        config.validate()?;
        table.bind(world)?;
        if !world.is_valid_spawn(start.cell) {
            return Err(EpisodeError::BadSpawn(start.cell));
        }
        let (w, h) = (world.width(), world.height());
        let k = world.num_targets();
        let tour = match config.variant {
            Variant::Oracle => Some(optimal_tour(world, start.cell, &world.target_cells())?),
            _ => None,
        };
        Ok(Self {
            world,
            table,
            robot: start,
            occ: OccupancyMap::new(w, h),
            sem: SemanticMap::new(world.num_classes(), w, h),
            sto: ScoreStack::scene_to_object((0..k).collect(), w, h),
            unified: None,
            state: SearchState::new(k),
            path_length: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            tour,
            score_queries: 0,
            outcome: None,
            config,
        })
    }

    pub fn robot(&self) -> RobotState {
        self.robot
    }

    pub fn occupancy(&self) -> &OccupancyMap {
        &self.occ
    }

    pub fn semantic(&self) -> &SemanticMap {
        &self.sem
    }

    pub fn sto(&self) -> &ScoreStack {
        &self.sto
    }

    /// Unified map behind the most recent frontier choice, if any.
    pub fn unified(&self) -> Option<&UnifiedMap> {
        self.unified.as_ref()
    }

    pub fn state(&self) -> &SearchState {
        &self.state
    }

    pub fn outcome(&self) -> Option<&EpisodeOutcome> {
        self.outcome.as_ref()
    }

    /// Runs one iteration of the loop. Returns the outcome once the episode
    /// has ended; further calls return it again without acting.
    pub fn step(&mut self) -> Result<Option<&EpisodeOutcome>, EpisodeError> {
        if self.outcome.is_none() {
            self.advance()?;
        }
        Ok(self.outcome.as_ref())
    }

    pub fn run(mut self) -> Result<EpisodeOutcome, EpisodeError> {
        while self.outcome.is_none() {
            self.advance()?;
        }
        Ok(self.outcome.take().unwrap_or_else(|| unreachable!()))
    }

    fn advance(&mut self) -> Result<(), EpisodeError> {
        if self.state.step_count >= self.config.budget {
            self.finish(Some(FailReason::Budget));
            return Ok(());
        }
        let variant = self.config.variant;
        let obs = observe(self.world, &self.robot, &self.config.sensor);
        self.occ.update(&obs);
        self.sem.update(&obs)?;
        let plan_dist = plan_distances(&self.occ, self.robot.cell);

        let newly = if variant == Variant::Oracle {
            self.state
                .mark_found_within(self.world, self.robot.cell, self.config.epsilon, |s| s.remaining.clone())
        } else {
            self.state
                .on_detection(&obs, self.world, self.robot.cell, &plan_dist, self.config.epsilon)
        };
        for t in newly {
            drop_target_channel(&mut self.sto, t)?;
        }

        if variant.uses_sto() && !self.state.is_done() {
            let cone = cone_mask(&obs, &self.config.sensor, self.world.width(), self.world.height());
            let scores = self
                .state
                .remaining
                .iter()
                .map(|&j| scene_score(&obs, j, self.table))
                .collect::<Result<Vec<_>, _>>()?;
            sto_update(&mut self.sto, &cone, &scores)?;
            self.score_queries += 1;
        }

        if self.state.is_done() {
            self.act(Action::Stop);
            self.finish(None);
            return Ok(());
        }

        let action = match variant {
            Variant::RandomWalk => {
                [Action::Forward, Action::TurnLeft, Action::TurnRight][self.rng.gen_range(0..3)]
            }
            Variant::Oracle => {
                let tour = self.tour.as_ref().map(|t| t.order.as_slice()).unwrap_or(&[]);
                let next = tour.iter().copied().find(|t| self.state.remaining.contains(t));
                let cell = next.and_then(|t| self.world.target_object(t)).map(|o| o.cell);
                self.state.path = cell
                    .and_then(|c| shortest_path(self.world, self.robot.cell, c))
                    .unwrap_or_default();
                self.state.goal = match (next, cell) {
                    (Some(target), Some(cell)) => Goal::TargetWaypoint { cell, target },
                    _ => Goal::None,
                };
                next_action(&self.robot, &self.state.path, self.state.remaining.len(), &self.config.kinematics)
            }
            _ => match self.plan(&plan_dist)? {
                Some(path) => {
                    self.state.path = path;
                    next_action(&self.robot, &self.state.path, self.state.remaining.len(), &self.config.kinematics)
                }
                None => {
                    self.finish(Some(FailReason::Exhausted));
                    return Ok(());
                }
            },
        };
        self.act(action);
        Ok(())
    }

    /// Picks the goal for this step and plans a path to it. `None` means the
    /// map is exhausted: no target waypoint and no reachable frontier.
    fn plan(&mut self, plan_dist: &crate::grid::Grid<Option<u32>>) -> Result<Option<Vec<Cell>>, EpisodeError> {
        let cost = self.config.unknown_cost;
        if let Goal::TargetWaypoint { cell, target } = self.state.goal {
            if let Some(path) = plan_path_facing(&self.occ, self.robot.cell, Some(self.robot.heading_deg), cell, cost) {
                return Ok(Some(path));
            }
            // Unplannable waypoint: forget the sighting and explore instead.
            self.state.sighted.remove(&target);
            self.state.goal = Goal::None;
        }
        let mut frontiers = extract_frontiers(&self.occ);
        let greedy = self.config.variant == Variant::GreedyFrontier;
        let chosen = if greedy {
            nearest_frontier(&frontiers, plan_dist)
        } else {
            let unified = self.unified_map()?;
            score_frontiers(&mut frontiers, &unified, self.config.score_radius);
            self.unified = Some(unified);
            select_frontier_within(&frontiers, plan_dist, self.config.score_tolerance)
        };
        let chosen = match (chosen, self.state.goal) {
            (Some(best), Goal::Frontier(prev)) if self.config.goal_margin > 0.0 => {
                let rule = if greedy { HoldRule::Distance } else { HoldRule::Score };
                Some(hold_frontier(&frontiers, plan_dist, prev, best, self.config.goal_margin, rule))
            }
            (c, _) => c,
        };
        let Some(f) = chosen else {
            self.state.goal = Goal::None;
            return Ok(None);
        };
        self.state.goal = Goal::Frontier(f.cell);
        Ok(plan_path_facing(&self.occ, self.robot.cell, Some(self.robot.heading_deg), f.cell, cost).map(|mut path| {
            if let Some(beyond) = self.peek_cell(&path) {
                path.push(beyond);
            }
            path
        }))
    }

    /// The unknown neighbour of a frontier path's last cell that needs the
    /// least turning on arrival, so reaching a frontier means looking past it.
    fn peek_cell(&self, path: &[Cell]) -> Option<Cell> {
        let last = *path.last()?;
        let arrival = match path {
            [.., a, b] => RobotState::new(*b, heading_towards(*a, *b)),
            _ => self.robot,
        };
        last.neighbors4()
            .into_iter()
            .filter(|&n| self.occ.get(n) == Some(crate::mapping::Belief::Unknown))
            .min_by(|&a, &b| {
                let (ea, eb) = (bearing_error(&arrival, a).abs(), bearing_error(&arrival, b).abs());
                ea.total_cmp(&eb)
            })
    }

    fn unified_map(&mut self) -> Result<UnifiedMap, EpisodeError> {
        self.score_queries += 1;
        let (w, h) = (self.world.width(), self.world.height());
        let variant = self.config.variant;
        let oto = if variant.uses_oto() {
            Some(oto_compute(&self.sem, self.table, &self.state.remaining)?)
        } else {
            None
        };
        Ok(match (variant.uses_sto(), oto) {
            (true, Some(oto)) => fuse(&self.sto, &oto)?,
            (false, Some(oto)) => fuse_single(&oto, w, h),
            _ => fuse_single(&self.sto, w, h),
        })
    }

    fn act(&mut self, action: Action) {
        let out = step(self.world, self.robot, action, &self.config.kinematics);
        if action == Action::Forward && !out.blocked {
            self.state.travelled += 1;
            self.path_length += out.state.cell.manhattan(self.robot.cell);
        }
        self.robot = out.state;
        self.state.step_count += 1;
    }

    fn finish(&mut self, fail: Option<FailReason>) {
        let k = self.world.num_targets();
        self.outcome = Some(EpisodeOutcome {
            success: fail.is_none(),
            path_length: self.path_length,
            travelled: self.state.travelled,
            steps: self.state.step_count,
            found_steps: (0..k).map(|t| self.state.found_step(t)).collect(),
            found_order: self.state.found.iter().map(|f| f.0).collect(),
            fail_reason: fail,
            score_queries: self.score_queries,
        });
    }
}

/// Heading, in whole degrees, of the step from `a` to the 4-neighbour `b`.
fn heading_towards(a: Cell, b: Cell) -> u32 {
    match (b.x - a.x, b.y - a.y) {
        (1, 0) => 0,
        (0, -1) => 90,
        (-1, 0) => 180,
        _ => 270,
    }
}

/// Runs one episode to completion. Deterministic in all arguments.
pub fn run_episode(
    world: &GridWorld,
    table: &SimilarityTable,
    config: &PolicyConfig,
    start: RobotState,
    seed: u64,
) -> Result<EpisodeOutcome, EpisodeError> {
    Episode::new(world, table, config.clone(), start, seed)?.run()
}
