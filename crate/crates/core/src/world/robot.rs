use serde::{Deserialize, Serialize};

use super::GridWorld;
use crate::grid::Cell;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Forward,
    TurnLeft,
    TurnRight,
    Stop,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Kinematics {
    /// Heading change per turn action, degrees. Must divide 360.
    pub turn_increment_deg: u32,
}

impl Default for Kinematics {
    fn default() -> Self {
        Self { turn_increment_deg: 30 }
    }
}

impl Kinematics {
    pub fn is_valid(&self) -> bool {
        self.turn_increment_deg > 0 && 360 % self.turn_increment_deg == 0
    }
}

/// Pose on the grid. Heading is in degrees, counter-clockwise from east,
/// so 90° faces north (decreasing `y`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RobotState {
    pub cell: Cell,
    pub heading_deg: u32,
}

impl RobotState {
    pub fn new(cell: Cell, heading_deg: u32) -> Self {
        Self { cell, heading_deg: heading_deg % 360 }
    }

    pub fn heading_rad(&self) -> f64 {
        (self.heading_deg as f64).to_radians()
    }

    /// Unit grid step Forward would take: the nearest of the eight
    /// compass directions to the heading.
    pub fn forward_offset(&self) -> (i32, i32) {
        const DIRS: [(i32, i32); 8] = [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)];
        let octant = ((2 * self.heading_deg + 45) / 90) % 8;
        DIRS[octant as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub state: RobotState,
    /// A Forward that could not move; the state is unchanged.
    pub blocked: bool,
}

/// Applies one action. Diagonal moves also need both orthogonal cells free,
/// so the robot never squeezes between two diagonal obstacles.
pub fn step(world: &GridWorld, robot: RobotState, action: Action, kin: &Kinematics) -> StepOutcome {
    let inc = kin.turn_increment_deg % 360;
    let state = match action {
        Action::Stop => robot,
        Action::TurnLeft => RobotState::new(robot.cell, robot.heading_deg + inc),
        Action::TurnRight => RobotState::new(robot.cell, robot.heading_deg + 360 - inc),
        Action::Forward => {
            let (dx, dy) = robot.forward_offset();
            let next = robot.cell.offset(dx, dy);
            let clear = world.is_free(next)
                && (dx == 0 || dy == 0
                    || (world.is_free(robot.cell.offset(dx, 0)) && world.is_free(robot.cell.offset(0, dy))));
            if !clear {
                return StepOutcome { state: robot, blocked: true };
            }
            RobotState { cell: next, ..robot }
        }
    };
    StepOutcome { state, blocked: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::world::{SceneObject, Terrain};

    fn open(w: usize, h: usize, walls: &[Cell]) -> GridWorld {
        let mut occ = Grid::filled(w, h, Terrain::Free);
        for &c in walls {
            occ[c] = Terrain::Obstacle;
        }
        let objs = vec![SceneObject { class_id: 0, cell: Cell::new(0, 0) }];
        GridWorld::new(occ, Grid::filled(w, h, 0), 1, 1, objs, vec![0], 1.0).unwrap()
    }

    #[test]
    fn forward_east() {
        let w = open(5, 5, &[]);
        let out = step(&w, RobotState::new(Cell::new(2, 2), 0), Action::Forward, &Kinematics::default());
        assert_eq!(out.state.cell, Cell::new(3, 2));
        assert!(!out.blocked);
    }

    #[test]
    fn forward_blocked() {
        let w = open(5, 5, &[Cell::new(3, 2)]);
        let r = RobotState::new(Cell::new(2, 2), 0);
        let out = step(&w, r, Action::Forward, &Kinematics::default());
        assert_eq!(out.state, r);
        assert!(out.blocked);
    }

    #[test]
    fn turn_left_adds_increment() {
        let w = open(3, 3, &[]);
        let out = step(&w, RobotState::new(Cell::new(1, 1), 0), Action::TurnLeft, &Kinematics::default());
        assert_eq!(out.state.heading_deg, 30);
        let out = step(&w, RobotState::new(Cell::new(1, 1), 0), Action::TurnRight, &Kinematics::default());
        assert_eq!(out.state.heading_deg, 330);
    }

    #[test]
    fn stop_is_identity() {
        let w = open(3, 3, &[]);
        let r = RobotState::new(Cell::new(1, 1), 120);
        assert_eq!(step(&w, r, Action::Stop, &Kinematics::default()).state, r);
    }

    #[test]
    fn headings_snap_to_octants() {
        let cases = [(0, (1, 0)), (30, (1, -1)), (60, (1, -1)), (90, (0, -1)), (180, (-1, 0)), (270, (0, 1)), (330, (1, 1))];
        for (h, d) in cases {
            assert_eq!(RobotState::new(Cell::new(0, 0), h).forward_offset(), d, "heading {h}");
        }
    }

    #[test]
    fn no_corner_cutting() {
        let w = open(4, 4, &[Cell::new(2, 2)]);
        let out = step(&w, RobotState::new(Cell::new(1, 2), 45), Action::Forward, &Kinematics::default());
        assert!(out.blocked);
    }
}
