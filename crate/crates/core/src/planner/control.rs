use crate::grid::Cell;
use crate::world::{Action, Kinematics, RobotState};

/// Signed heading change, degrees in `(-180, 180]`, that points the robot
/// from its cell at `to`.
pub fn bearing_error(robot: &RobotState, to: Cell) -> f64 {
    let dx = (to.x - robot.cell.x) as f64;
    let dy = (to.y - robot.cell.y) as f64;
    let bearing = (-dy).atan2(dx).to_degrees();
    let mut d = bearing - robot.heading_deg as f64;
    while d <= -180.0 {
        d += 360.0;
    }
    while d > 180.0 {
        d -= 360.0;
    }
    d
}

/// Low-level controller. `path[0]` is the robot's cell; the robot turns
/// toward `path[1]` until it is within half a turn increment, then moves.
/// With nothing left to find it stops; at the end of a path it turns in
/// place to look around.
pub fn next_action(robot: &RobotState, path: &[Cell], remaining: usize, kin: &Kinematics) -> Action {
    if remaining == 0 {
        return Action::Stop;
    }
    let Some(&next) = path.get(1) else {
        return Action::TurnLeft;
    };
    let err = bearing_error(robot, next);
    if err.abs() <= kin.turn_increment_deg as f64 / 2.0 {
        Action::Forward
    } else if err > 0.0 {
        Action::TurnLeft
    } else {
        Action::TurnRight
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KIN: Kinematics = Kinematics { turn_increment_deg: 30 };

    #[test]
    fn aligned_moves_forward() {
        let r = RobotState::new(Cell::new(2, 2), 0);
        assert_eq!(next_action(&r, &[Cell::new(2, 2), Cell::new(3, 2)], 1, &KIN), Action::Forward);
    }

    #[test]
    fn left_goal_turns_left() {
        // North is 90° counter-clockwise of east.
        let r = RobotState::new(Cell::new(2, 2), 0);
        assert_eq!(next_action(&r, &[Cell::new(2, 2), Cell::new(2, 1)], 1, &KIN), Action::TurnLeft);
        let south = [Cell::new(2, 2), Cell::new(2, 3)];
        assert_eq!(next_action(&r, &south, 1, &KIN), Action::TurnRight);
    }

    #[test]
    fn behind_turns_left() {
        let r = RobotState::new(Cell::new(2, 2), 0);
        assert_eq!(next_action(&r, &[Cell::new(2, 2), Cell::new(1, 2)], 1, &KIN), Action::TurnLeft);
    }

    #[test]
    fn nothing_remaining_stops() {
        let r = RobotState::new(Cell::new(2, 2), 0);
        assert_eq!(next_action(&r, &[Cell::new(2, 2), Cell::new(3, 2)], 0, &KIN), Action::Stop);
    }

    #[test]
    fn turning_reaches_forward() {
        let mut r = RobotState::new(Cell::new(5, 5), 0);
        let path = [Cell::new(5, 5), Cell::new(5, 6)];
        let mut turns = 0;
        loop {
            match next_action(&r, &path, 1, &KIN) {
                Action::TurnLeft => r = RobotState::new(r.cell, r.heading_deg + 30),
                Action::TurnRight => r = RobotState::new(r.cell, r.heading_deg + 330),
                Action::Forward => break,
                Action::Stop => unreachable!(),
            }
            turns += 1;
        }
        assert_eq!((turns, r.heading_deg), (3, 270));
    }
}
