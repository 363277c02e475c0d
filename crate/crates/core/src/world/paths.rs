//! Exact 4-connected distances over the true free space.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::GridWorld;
use crate::grid::{Cell, Grid};

/// Result of a shortest-path query. `Unreachable` is never encoded as a number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PathLength {
    Cells(u32),
    Unreachable,
}

impl PathLength {
    pub fn cells(self) -> Option<u32> {
        match self {
            PathLength::Cells(n) => Some(n),
            PathLength::Unreachable => None,
        }
    }
}

/// Breadth-first distances from `from` to every free cell.
pub fn distance_field(world: &GridWorld, from: Cell) -> Grid<Option<u32>> {
    let mut dist = Grid::filled(world.width(), world.height(), None);
    if !world.is_free(from) {
        return dist;
    }
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        let d = dist[c].unwrap_or(0);
        for n in c.neighbors4() {
            if world.is_free(n) && dist[n].is_none() {
                dist[n] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

pub fn shortest_path_len(world: &GridWorld, a: Cell, b: Cell) -> PathLength {
    if !world.is_free(a) || !world.is_free(b) {
        return PathLength::Unreachable;
    }
    if a == b {
        return PathLength::Cells(0);
    }
    match distance_field(world, a)[b] {
        Some(d) => PathLength::Cells(d),
        None => PathLength::Unreachable,
    }
}

/// One shortest 4-connected path from `a` to `b`, both endpoints included.
/// Among equal-length paths the one whose steps prefer E, N, W, S is returned.
pub fn shortest_path(world: &GridWorld, a: Cell, b: Cell) -> Option<Vec<Cell>> {
    if !world.is_free(a) || !world.is_free(b) {
        return None;
    }
    // Distances from the goal let us walk greedily from the start.
    let field = distance_field(world, b);
    let mut d = field[a]?;
    let mut path = vec![a];
    let mut cur = a;
    while d > 0 {
        cur = cur
            .neighbors4()
            .into_iter()
            .find(|&n| world.is_free(n) && field[n] == Some(d - 1))?;
        path.push(cur);
        d -= 1;
    }
    Some(path)
}
