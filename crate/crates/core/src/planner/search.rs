use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::grid::{Cell, Grid};
use crate::world::{distance_field, GridWorld, Observation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Goal {
    None,
    Frontier(Cell),
    TargetWaypoint { cell: Cell, target: usize },
}

/// Bookkeeping of one search: what is left to find, what has been seen, and
/// where the robot is headed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    /// Target slots still to find, ascending.
    pub remaining: Vec<usize>,
    /// `(target, step)` in the order targets were found.
    pub found: Vec<(usize, u32)>,
    /// Last known cell of each detected but unfound target.
    pub sighted: BTreeMap<usize, Cell>,
    pub goal: Goal,
    pub path: Vec<Cell>,
    pub step_count: u32,
    /// Successful Forward moves.
    pub travelled: u32,
}

impl SearchState {
    pub fn new(num_targets: usize) -> Self {
        Self {
            remaining: (0..num_targets).collect(),
            found: Vec::new(),
            sighted: BTreeMap::new(),
            goal: Goal::None,
            path: Vec::new(),
            step_count: 0,
            travelled: 0,
        }
    }

    pub fn is_done(&self) -> bool {
        self.remaining.is_empty()
    }

    pub fn found_step(&self, target: usize) -> Option<u32> {
        self.found.iter().find(|f| f.0 == target).map(|f| f.1)
    }

    /// Records target detections, marks as found every sighted target within
    /// `epsilon` true path cells of the robot, and points the goal at the
    /// nearest remaining sighted target by planning distance. Returns the
    /// newly found targets in the order they were recorded.
    pub fn on_detection(
        &mut self,
        obs: &Observation,
        world: &GridWorld,
        robot: Cell,
        plan_dist: &Grid<Option<u32>>,
        epsilon: u32,
    ) -> Vec<usize> {
        let pd = |c: Cell| plan_dist.get(c).copied().flatten().unwrap_or(u32::MAX);
        for d in obs.detections.iter().filter(|d| d.is_target) {
            let Some(t) = world.target_slot(d.object) else { continue };
            if !self.remaining.contains(&t) {
                continue;
            }
            let closer = self.sighted.get(&t).map_or(true, |&old| (pd(d.cell), d.cell) < (pd(old), old));
            if closer {
                self.sighted.insert(t, d.cell);
            }
        }
        let newly = self.mark_found_within(world, robot, epsilon, |s| s.sighted.keys().copied().collect());
        self.goal = self.nearest_sighted(plan_dist).map_or(
            match self.goal {
                Goal::TargetWaypoint { .. } => Goal::None,
                g => g,
            },
            |(target, cell)| Goal::TargetWaypoint { cell, target },
        );
        newly
    }

    /// Marks found every candidate target whose cell is within `epsilon`
    /// true path cells of `robot`.
    pub(crate) fn mark_found_within(
        &mut self,
        world: &GridWorld,
        robot: Cell,
        epsilon: u32,
        candidates: impl Fn(&Self) -> Vec<usize>,
    ) -> Vec<usize> {
        let cands = candidates(self);
        if cands.is_empty() {
            return Vec::new();
        }
        let field = distance_field(world, robot);
        let mut hits: Vec<(u32, usize)> = cands
            .into_iter()
            .filter(|t| self.remaining.contains(t))
            .filter_map(|t| {
                let cell = self.sighted.get(&t).copied().or_else(|| world.target_object(t).map(|o| o.cell))?;
                field[cell].filter(|&d| d <= epsilon).map(|d| (d, t))
            })
            .collect();
        hits.sort_unstable();
        let mut newly = Vec::new();
        for (_, t) in hits {
            self.remaining.retain(|&r| r != t);
            self.sighted.remove(&t);
            self.found.push((t, self.step_count));
            newly.push(t);
        }
        newly
    }

    fn nearest_sighted(&self, plan_dist: &Grid<Option<u32>>) -> Option<(usize, Cell)> {
        self.sighted
            .iter()
            .filter_map(|(&t, &c)| plan_dist.get(c).copied().flatten().map(|d| (d, t, c)))
            .min()
            .map(|(_, t, c)| (t, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{Detection, SceneObject, Terrain};

    fn open_world(targets: &[(i32, i32)]) -> GridWorld {
        let occ = Grid::filled(12, 3, Terrain::Free);
        let labels = Grid::filled(12, 3, 0u8);
        let objs = targets
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| SceneObject { class_id: i, cell: Cell::new(x, y) })
            .collect();
        GridWorld::new(occ, labels, 1, targets.len(), objs, (0..targets.len()).collect(), 1.0).unwrap()
    }

    fn seen(world: &GridWorld, slots: &[usize]) -> Observation {
        let mut obs = Observation::empty(1);
        for &t in slots {
            let o = world.target_object(t).unwrap();
            obs.detections.push(Detection { class_id: o.class_id, cell: o.cell, object: world.targets()[t], is_target: true });
        }
        obs
    }

    fn open_dist(from: Cell) -> Grid<Option<u32>> {
        let mut g = Grid::filled(12, 3, None);
        for c in g.cells().collect::<Vec<_>>() {
            g[c] = Some(c.manhattan(from));
        }
        g
    }

    #[test]
    fn far_detection_sets_waypoint() {
        let w = open_world(&[(10, 1)]);
        let robot = Cell::new(0, 1);
        let mut s = SearchState::new(1);
        s.goal = Goal::Frontier(Cell::new(0, 0));
        let newly = s.on_detection(&seen(&w, &[0]), &w, robot, &open_dist(robot), 2);
        assert!(newly.is_empty());
        assert_eq!(s.goal, Goal::TargetWaypoint { cell: Cell::new(10, 1), target: 0 });
    }

    #[test]
    fn adjacent_target_found() {
        let w = open_world(&[(3, 1)]);
        let robot = Cell::new(2, 1);
        let mut s = SearchState::new(1);
        s.step_count = 7;
        let newly = s.on_detection(&seen(&w, &[0]), &w, robot, &open_dist(robot), 2);
        assert_eq!(newly, vec![0]);
        assert!(s.is_done());
        assert_eq!(s.found_step(0), Some(7));
        assert_eq!(s.goal, Goal::None);
    }

    #[test]
    fn simultaneous_detections_nearest_first() {
        let w = open_world(&[(11, 1), (6, 2)]);
        let robot = Cell::new(1, 1);
        let mut s = SearchState::new(2);
        s.on_detection(&seen(&w, &[0, 1]), &w, robot, &open_dist(robot), 2);
        assert_eq!(s.goal, Goal::TargetWaypoint { cell: Cell::new(6, 2), target: 1 });
        // Reach the nearer one; the waypoint moves on to the other.
        let robot = Cell::new(5, 2);
        let newly = s.on_detection(&Observation::empty(1), &w, robot, &open_dist(robot), 2);
        assert_eq!(newly, vec![1]);
        assert_eq!(s.goal, Goal::TargetWaypoint { cell: Cell::new(11, 1), target: 0 });
    }

    #[test]
    fn unseen_target_is_not_found_even_when_close() {
        let w = open_world(&[(3, 1)]);
        let robot = Cell::new(2, 1);
        let mut s = SearchState::new(1);
        assert!(s.on_detection(&Observation::empty(1), &w, robot, &open_dist(robot), 2).is_empty());
        assert_eq!(s.remaining, vec![0]);
    }
}
