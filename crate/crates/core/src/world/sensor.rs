//! Simulated RGB-D view: line-of-sight visibility inside a range-limited
//! cone, object detection and the room-label histogram of what is seen.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{GridWorld, RobotState, Terrain};
use crate::grid::{Cell, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorConfig {
    /// Maximum centre-to-centre distance, in cells.
    pub range: f64,
    /// Full horizontal field of view, in degrees.
    pub fov_deg: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self { range: 10.0, fov_deg: 79.0 }
    }
}

impl SensorConfig {
    pub fn half_fov_rad(&self) -> f64 {
        self.fov_deg.to_radians() / 2.0
    }

    pub fn is_valid(&self) -> bool {
        self.range.is_finite() && self.range >= 0.0 && self.fov_deg > 0.0 && self.fov_deg <= 360.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibleCell {
    pub cell: Cell,
    /// Signed angle off the optical axis, radians, in `(-π, π]`.
    pub angle: f64,
    /// The cell is an obstacle face terminating the ray.
    pub occluding: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub class_id: usize,
    pub cell: Cell,
    /// Index into the world's scene objects.
    pub object: usize,
    pub is_target: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Sorted in row-major cell order.
    pub visible_cells: Vec<VisibleCell>,
    pub detections: Vec<Detection>,
    /// Counts of room labels over visible free cells, one slot per room type.
    pub room_histogram: Vec<u32>,
}

impl Observation {
    pub fn empty(room_types: usize) -> Self {
        Self {
            visible_cells: Vec::new(),
            detections: Vec::new(),
            room_histogram: vec![0; room_types],
        }
    }

    pub fn is_visible(&self, cell: Cell) -> bool {
        self.visible_cells.binary_search_by(|v| v.cell.cmp(&cell)).is_ok()
    }
}

/// Signed angle of `cell` off the robot's optical axis.
pub(crate) fn off_axis_angle(robot: &RobotState, cell: Cell) -> f64 {
    if cell == robot.cell {
        return 0.0;
    }
    let dx = (cell.x - robot.cell.x) as f64;
    let dy = (cell.y - robot.cell.y) as f64;
    let bearing = (-dy).atan2(dx);
    let mut a = bearing - robot.heading_rad();
    while a <= -PI {
        a += 2.0 * PI;
    }
    while a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Every cell whose closed square meets the segment between the centres of
/// `a` and `b`, in traversal order. Where the segment passes exactly through
/// a lattice corner both side cells are included.
pub fn supercover(a: Cell, b: Cell) -> Vec<Cell> {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let (nx, ny) = (dx.unsigned_abs() as i64, dy.unsigned_abs() as i64);
    let (sx, sy) = (dx.signum(), dy.signum());
    let mut p = a;
    let mut out = vec![p];
    let (mut ix, mut iy) = (0i64, 0i64);
    while ix < nx || iy < ny {
        let decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx;
        if decision == 0 {
            out.push(p.offset(sx, 0));
            out.push(p.offset(0, sy));
            p = p.offset(sx, sy);
            ix += 1;
            iy += 1;
        } else if decision < 0 {
            p = p.offset(sx, 0);
            ix += 1;
        } else {
            p = p.offset(0, sy);
            iy += 1;
        }
        out.push(p);
    }
    out
}

/// First obstacle strictly between `from` and `to` on the supercover ray.
fn first_blocker(world: &GridWorld, from: Cell, to: Cell) -> Option<Cell> {
    let ray = supercover(from, to);
    ray.get(1..ray.len().saturating_sub(1))?
        .iter()
        .copied()
        .find(|&c| c != to && world.terrain(c) == Some(Terrain::Obstacle))
}

/// Cells in view. A cell is visible when it lies within range and half-FOV
/// and its centre ray crosses no obstacle. Obstacles that stop a ray aimed
/// further out are the faces the sensor actually sees, so the first
/// obstacle on each blocked ray is visible too, provided it lies in range
/// and in the cone itself.
pub fn observe(world: &GridWorld, robot: &RobotState, sensor: &SensorConfig) -> Observation {
    let mut obs = Observation::empty(world.room_types());
    let mut mask = Grid::filled(world.width(), world.height(), false);
    let r = sensor.range.floor() as i32;
    let r2 = sensor.range * sensor.range;
    let half = sensor.half_fov_rad();
    let origin = robot.cell;
    let in_cone = |cell: Cell| -> Option<f64> {
        world.terrain(cell)?;
        let (ddx, ddy) = ((cell.x - origin.x) as f64, (cell.y - origin.y) as f64);
        if ddx * ddx + ddy * ddy > r2 {
            return None;
        }
        let angle = off_axis_angle(robot, cell);
        (angle.abs() <= half).then_some(angle)
    };
    let mut add = |cell: Cell, angle: f64, obs: &mut Observation| {
        if mask[cell] {
            return;
        }
        mask[cell] = true;
        let occluding = world.terrain(cell) == Some(Terrain::Obstacle);
        obs.visible_cells.push(VisibleCell { cell, angle, occluding });
        if !occluding {
            if let Some(label) = world.room_of(cell) {
                obs.room_histogram[label] += 1;
            }
        }
    };
    for y in origin.y - r..=origin.y + r {
        for x in origin.x - r..=origin.x + r {
            let cell = Cell::new(x, y);
            let Some(angle) = in_cone(cell) else { continue };
            match first_blocker(world, origin, cell) {
                None => add(cell, angle, &mut obs),
                Some(hit) => {
                    if let Some(a) = in_cone(hit) {
                        add(hit, a, &mut obs);
                    }
                }
            }
        }
    }
    obs.visible_cells.sort_by(|a, b| a.cell.cmp(&b.cell));
    for (object, o) in world.scene_objects().iter().enumerate() {
        if mask[o.cell] {
            obs.detections.push(Detection {
                class_id: o.class_id,
                cell: o.cell,
                object,
                is_target: world.target_slot(object).is_some(),
            });
        }
    }
    obs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::SceneObject;

    fn world_with(w: usize, h: usize, walls: &[Cell], objects: &[(usize, Cell)]) -> GridWorld {
        let mut occ = Grid::filled(w, h, Terrain::Free);
        for &c in walls {
            occ[c] = Terrain::Obstacle;
        }
        let objs = objects.iter().map(|&(class_id, cell)| SceneObject { class_id, cell }).collect();
        GridWorld::new(occ, Grid::filled(w, h, 0), 1, 4, objs, vec![0], 1.0).unwrap()
    }

    #[test]
    fn enclosed_robot_sees_only_itself_and_walls() {
        let c = Cell::new(2, 2);
        let ring: Vec<Cell> = c.neighbors8().to_vec();
        let world = world_with(5, 5, &ring, &[(1, Cell::new(0, 0))]);
        let sensor = SensorConfig { range: 10.0, fov_deg: 360.0 };
        let obs = observe(&world, &RobotState::new(c, 0), &sensor);
        for v in &obs.visible_cells {
            assert!(v.cell == c || ring.contains(&v.cell), "{:?}", v.cell);
            assert_eq!(v.occluding, v.cell != c);
        }
        // Diagonal ring cells hide behind the corner-touching orthogonal walls.
        assert_eq!(obs.visible_cells.len(), 5);
        assert!(obs.detections.is_empty());
        assert_eq!(obs.room_histogram, vec![1]);
    }

    #[test]
    fn object_outside_half_fov_not_detected() {
        let world = world_with(12, 12, &[], &[(1, Cell::new(8, 2))]);
        let robot = RobotState::new(Cell::new(4, 6), 0);
        let sensor = SensorConfig { range: 10.0, fov_deg: 79.0 };
        let obs = observe(&world, &robot, &sensor);
        assert!((off_axis_angle(&robot, Cell::new(8, 2)).to_degrees() - 45.0).abs() < 1e-9);
        assert!(obs.detections.is_empty());
        // Widen the cone and it is detected.
        let obs = observe(&world, &robot, &SensorConfig { fov_deg: 91.0, ..sensor });
        assert_eq!(obs.detections.len(), 1);
    }

    #[test]
    fn open_room_fully_visible() {
        let world = world_with(11, 11, &[], &[(0, Cell::new(0, 0))]);
        let obs = observe(&world, &RobotState::new(Cell::new(5, 5), 0), &SensorConfig { range: 10.0, fov_deg: 360.0 });
        assert_eq!(obs.visible_cells.len(), 121);
        assert_eq!(obs.room_histogram.iter().sum::<u32>(), 121);
    }

    #[test]
    fn supercover_corner_includes_both_sides() {
        let line = supercover(Cell::new(0, 0), Cell::new(2, 2));
        assert_eq!(
            line,
            vec![
                Cell::new(0, 0),
                Cell::new(1, 0),
                Cell::new(0, 1),
                Cell::new(1, 1),
                Cell::new(2, 1),
                Cell::new(1, 2),
                Cell::new(2, 2)
            ]
        );
        assert_eq!(supercover(Cell::new(3, 3), Cell::new(3, 3)), vec![Cell::new(3, 3)]);
    }

    #[test]
    fn grazing_wall_faces_are_seen() {
        // Robot walks along a wall one row above it. The wall cell two
        // columns ahead is hidden from its own centre ray by the wall cell
        // before it, but it is the first obstacle on the ray to (4, 0).
        let walls: Vec<Cell> = (0..8).map(|x| Cell::new(x, 1)).collect();
        let world = world_with(8, 4, &walls, &[(1, Cell::new(7, 3))]);
        let robot = RobotState::new(Cell::new(0, 2), 0);
        let sensor = SensorConfig { range: 10.0, fov_deg: 79.0 };
        assert_eq!(first_blocker(&world, robot.cell, Cell::new(2, 1)), Some(Cell::new(1, 1)));
        let obs = observe(&world, &robot, &sensor);
        assert!(obs.is_visible(Cell::new(2, 1)));
        assert!(obs.visible_cells.iter().filter(|v| v.cell.y == 1).all(|v| v.occluding));
        assert!(!obs.is_visible(Cell::new(1, 1)), "45° off axis is outside the cone");
    }

    #[test]
    fn wall_hides_cells_behind_it() {
        let world = world_with(8, 3, &[Cell::new(4, 1)], &[(2, Cell::new(6, 1))]);
        let obs = observe(&world, &RobotState::new(Cell::new(0, 1), 0), &SensorConfig { range: 10.0, fov_deg: 10.0 });
        assert!(obs.is_visible(Cell::new(4, 1)));
        assert!(!obs.is_visible(Cell::new(5, 1)));
        assert!(obs.detections.is_empty());
    }
}
