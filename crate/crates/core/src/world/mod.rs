//! Static grid environments and the ground truth the simulator runs against.

mod gen;
mod paths;
mod robot;
mod scenario;
mod sensor;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::WorldError;
use crate::grid::{Cell, Grid};

pub use gen::{generate_world, AffinityTable, WorldParams};
pub use paths::{distance_field, shortest_path, shortest_path_len, PathLength};
pub use robot::{step, Action, Kinematics, RobotState, StepOutcome};
pub use scenario::{load_scenario, parse_scenario, save_scenario, write_scenario, SCENARIO_MAGIC};
pub use sensor::{observe, supercover, Detection, Observation, SensorConfig, VisibleCell};

/// Largest target count accepted anywhere; keeps the K! tour oracle exact.
pub const MAX_TARGETS: usize = 8;
/// Room labels are stored as one hex digit in scenario files.
pub const MAX_ROOM_TYPES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terrain {
    Free,
    Obstacle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneObject {
    pub class_id: usize,
    pub cell: Cell,
}

/// An immutable environment: terrain, room labels, object placements and the
/// ordered target subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridWorld {
    occupancy: Grid<Terrain>,
    room_label: Grid<u8>,
    room_types: usize,
    num_classes: usize,
    scene_objects: Vec<SceneObject>,
    targets: Vec<usize>,
    resolution: f64,
}

impl GridWorld {
    /// Assembles a world and checks every structural invariant, including
    /// mutual reachability of the targets.
    pub fn new(
        occupancy: Grid<Terrain>,
        room_label: Grid<u8>,
        room_types: usize,
        num_classes: usize,
        scene_objects: Vec<SceneObject>,
        targets: Vec<usize>,
        resolution: f64,
    ) -> Result<Self, WorldError> {
        let world = Self {
            occupancy,
            room_label,
            room_types,
            num_classes,
            scene_objects,
            targets,
            resolution,
        };
        world.validate()?;
        Ok(world)
    }

    fn validate(&self) -> Result<(), WorldError> {
        let (w, h) = (self.width(), self.height());
        if w == 0 || h == 0 {
            return Err(WorldError::EmptyGrid);
        }
        if !self.room_label.same_shape(&self.occupancy) {
            return Err(WorldError::ShapeMismatch);
        }
        if self.room_types == 0 || self.room_types > MAX_ROOM_TYPES {
            return Err(WorldError::RoomTypesOutOfRange(self.room_types));
        }
        if let Some(&label) = self.room_label.as_slice().iter().find(|&&l| l as usize >= self.room_types) {
            return Err(WorldError::RoomLabelOutOfRange(label as usize));
        }
        let k = self.targets.len();
        if k == 0 || k > MAX_TARGETS {
            return Err(WorldError::TargetCountOutOfRange(k));
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(WorldError::BadResolution(self.resolution));
        }
        let mut seen_cells = BTreeSet::new();
        for (index, obj) in self.scene_objects.iter().enumerate() {
            if obj.class_id >= self.num_classes {
                return Err(WorldError::ClassOutOfRange { index, class_id: obj.class_id });
            }
            if !self.is_free(obj.cell) {
                return Err(WorldError::ObjectNotOnFree { index, cell: obj.cell });
            }
            if !seen_cells.insert(obj.cell) {
                return Err(WorldError::StackedObjects(obj.cell));
            }
        }
        let mut seen = BTreeSet::new();
        for &t in &self.targets {
            if t >= self.scene_objects.len() {
                return Err(WorldError::TargetIndexOutOfRange(t));
            }
            if !seen.insert(t) {
                return Err(WorldError::DuplicateTarget(t));
            }
        }
        let field = distance_field(self, self.scene_objects[self.targets[0]].cell);
        if self.target_cells().iter().any(|&c| field[c].is_none()) {
            return Err(WorldError::Disconnected);
        }
        Ok(())
    }

    /// Whether a robot spawned at `cell` can reach every target.
    pub fn is_valid_spawn(&self, cell: Cell) -> bool {
        self.is_free(cell) && {
            let field = distance_field(self, cell);
            self.target_cells().iter().all(|&c| field[c].is_some())
        }
    }

    /// Free cells in the connected component holding the targets, row-major.
    pub fn spawn_cells(&self) -> Vec<Cell> {
        let field = distance_field(self, self.target_cells()[0]);
        self.free_cells().filter(|&c| field[c].is_some()).collect()
    }

    pub fn width(&self) -> usize {
        self.occupancy.width()
    }

    pub fn height(&self) -> usize {
        self.occupancy.height()
    }

    pub fn occupancy(&self) -> &Grid<Terrain> {
        &self.occupancy
    }

    pub fn room_labels(&self) -> &Grid<u8> {
        &self.room_label
    }

    pub fn room_types(&self) -> usize {
        self.room_types
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn scene_objects(&self) -> &[SceneObject] {
        &self.scene_objects
    }

    /// Target indices into [`GridWorld::scene_objects`], in target order.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn num_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn target_object(&self, j: usize) -> Option<&SceneObject> {
        self.targets.get(j).map(|&i| &self.scene_objects[i])
    }

    pub fn target_cells(&self) -> Vec<Cell> {
        self.targets.iter().map(|&i| self.scene_objects[i].cell).collect()
    }

    /// Position of `object` in the target list, if it is a target.
    pub fn target_slot(&self, object: usize) -> Option<usize> {
        self.targets.iter().position(|&t| t == object)
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn terrain(&self, cell: Cell) -> Option<Terrain> {
        self.occupancy.get(cell).copied()
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.terrain(cell) == Some(Terrain::Free)
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.occupancy
            .iter()
            .filter(|(_, t)| **t == Terrain::Free)
            .map(|(c, _)| c)
    }

    pub fn room_of(&self, cell: Cell) -> Option<usize> {
        self.room_label.get(cell).map(|&l| l as usize)
    }
}
