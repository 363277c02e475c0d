//! Multi-object semantic search on 2D occupancy grids.
//!
//! The crate is organised along the search loop: [`world`] simulates the
//! environment and the robot's sensor, [`semantics`] supplies the
//! scene/object similarity model, [`mapping`] maintains the robot's belief
//! maps, [`scoremap`] turns them into per-target score maps and a unified
//! score map, and [`planner`] picks frontiers or target waypoints and drives
//! whole episodes.

pub mod error;
pub mod grid;
pub mod mapping;
pub mod planner;
pub mod scoremap;
pub mod semantics;
pub mod world;

pub use error::*;
pub use grid::{Cell, Grid};
