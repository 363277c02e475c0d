//! The robot's belief about the world: what it has seen free or blocked,
//! where each scene class was detected, and how confidently each cell has
//! been observed.

mod confidence;
mod pgm;

use serde::{Deserialize, Serialize};

use crate::error::MapError;
use crate::grid::{Cell, Grid};
use crate::world::Observation;

pub use confidence::{cone_mask, cone_value, fuse_confidence, fuse_confidence_value, ConfidenceMap};
pub use pgm::{occupancy_pgm, parse_pgm, write_pgm, Pgm, PGM_MAXVAL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Belief {
    Unknown,
    Free,
    Obstacle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyMap {
    cells: Grid<Belief>,
}

impl OccupancyMap {
    pub fn new(width: usize, height: usize) -> Self {
        Self { cells: Grid::filled(width, height, Belief::Unknown) }
    }

    pub fn width(&self) -> usize {
        self.cells.width()
    }

    pub fn height(&self) -> usize {
        self.cells.height()
    }

    pub fn grid(&self) -> &Grid<Belief> {
        &self.cells
    }

    pub fn get(&self, cell: Cell) -> Option<Belief> {
        self.cells.get(cell).copied()
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.get(cell) == Some(Belief::Free)
    }

    /// Free or still unknown: where an optimistic planner may go.
    pub fn is_traversable(&self, cell: Cell) -> bool {
        matches!(self.get(cell), Some(Belief::Free | Belief::Unknown))
    }

    pub fn unknown_count(&self) -> usize {
        self.cells.as_slice().iter().filter(|b| **b == Belief::Unknown).count()
    }

    /// Marks a cell directly, used to seed fixtures. Only unknown cells change.
    pub fn mark(&mut self, cell: Cell, belief: Belief) -> bool {
        match self.cells.get_mut(cell) {
            Some(slot) if *slot == Belief::Unknown && belief != Belief::Unknown => {
                *slot = belief;
                true
            }
            _ => false,
        }
    }

    /// Writes visible free cells as Free and ray-terminating obstacle faces
    /// as Obstacle. Known cells never change. Returns the number of cells
    /// written.
    pub fn update(&mut self, obs: &Observation) -> usize {
        obs.visible_cells
            .iter()
            .filter(|v| {
                let b = if v.occluding { Belief::Obstacle } else { Belief::Free };
                self.mark(v.cell, b)
            })
            .count()
    }
}

/// One binary channel per scene class.
#[derive(Clone, Debug, PartialEq)]
pub struct SemanticMap {
    channels: Vec<Grid<bool>>,
    marked: Vec<Vec<Cell>>,
}

impl SemanticMap {
    pub fn new(classes: usize, width: usize, height: usize) -> Self {
        Self {
            channels: vec![Grid::filled(width, height, false); classes],
            marked: vec![Vec::new(); classes],
        }
    }

    pub fn classes(&self) -> usize {
        self.channels.len()
    }

    pub fn width(&self) -> usize {
        self.channels.first().map_or(0, |g| g.width())
    }

    pub fn height(&self) -> usize {
        self.channels.first().map_or(0, |g| g.height())
    }

    pub fn channel(&self, class_id: usize) -> &Grid<bool> {
        &self.channels[class_id]
    }

    /// Cells set in channel `class_id`, in the order they were first seen.
    pub fn marked(&self, class_id: usize) -> &[Cell] {
        &self.marked[class_id]
    }

    pub fn is_set(&self, class_id: usize, cell: Cell) -> bool {
        self.channels
            .get(class_id)
            .and_then(|g| g.get(cell))
            .copied()
            .unwrap_or(false)
    }

    pub fn set(&mut self, class_id: usize, cell: Cell) -> Result<bool, MapError> {
        let classes = self.classes();
        let channel = self
            .channels
            .get_mut(class_id)
            .ok_or(MapError::ClassOutOfRange { class_id, classes })?;
        match channel.get_mut(cell) {
            Some(bit) if !*bit => {
                *bit = true;
                self.marked[class_id].push(cell);
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    /// Marks every non-target detection. Targets are left to the planner.
    pub fn update(&mut self, obs: &Observation) -> Result<usize, MapError> {
        let mut written = 0;
        for d in obs.detections.iter().filter(|d| !d.is_target) {
            if self.set(d.class_id, d.cell)? {
                written += 1;
            }
        }
        Ok(written)
    }
}
