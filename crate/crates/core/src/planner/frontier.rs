use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::grid::{Cell, Grid};
use crate::mapping::{Belief, OccupancyMap};
use crate::scoremap::UnifiedMap;

/// Midpoint of one boundary segment between known free space and unknown
/// space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub cell: Cell,
    pub score: f64,
    pub segment_len: usize,
}

/// Free cells with at least one 4-connected unknown neighbour.
pub fn boundary_cells(occ: &OccupancyMap) -> Grid<bool> {
    let grid = occ.grid();
    let mut out = Grid::filled(grid.width(), grid.height(), false);
    for (c, b) in grid.iter() {
        if *b == Belief::Free && c.neighbors4().iter().any(|&n| occ.get(n) == Some(Belief::Unknown)) {
            out[c] = true;
        }
    }
    out
}

/// Neighbour order used when walking a segment: edge neighbours first, then
/// corners.
const WALK_ORDER: [(i32, i32); 8] = [(1, 0), (0, -1), (-1, 0), (0, 1), (1, -1), (-1, -1), (-1, 1), (1, 1)];

/// 8-connected boundary segments, each in walk order from one end.
///
/// The walk starts at the cell farthest (8-connected, within the segment)
/// from the segment's first row-major cell and proceeds depth-first,
/// preferring edge neighbours over corner neighbours. On a simple chain this
/// is the chain order.
pub fn frontier_segments(occ: &OccupancyMap) -> Vec<Vec<Cell>> {
    let boundary = boundary_cells(occ);
    let mut label: Grid<Option<usize>> = Grid::filled(boundary.width(), boundary.height(), None);
    let mut segments = Vec::new();
    for (start, &on) in boundary.iter() {
        if !on || label[start].is_some() {
            continue;
        }
        let id = segments.len();
        let members = bfs(&boundary, start, |c| {
            label[c] = Some(id);
        });
        let far = members
            .iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|m| m.0)
            .unwrap_or(start);
        segments.push(walk(&boundary, far));
    }
    segments
}

/// BFS over `mask` from `start`; returns (cell, distance) pairs and calls
/// `visit` once per reached cell.
fn bfs(mask: &Grid<bool>, start: Cell, mut visit: impl FnMut(Cell)) -> Vec<(Cell, u32)> {
    let mut dist: Grid<Option<u32>> = Grid::filled(mask.width(), mask.height(), None);
    dist[start] = Some(0);
    visit(start);
    let mut queue = VecDeque::from([start]);
    let mut out = vec![(start, 0)];
    while let Some(c) = queue.pop_front() {
        let d = dist[c].unwrap_or(0);
        for (dx, dy) in WALK_ORDER {
            let n = c.offset(dx, dy);
            if mask.get(n) == Some(&true) && dist[n].is_none() {
                dist[n] = Some(d + 1);
                visit(n);
                out.push((n, d + 1));
                queue.push_back(n);
            }
        }
    }
    out
}

fn walk(mask: &Grid<bool>, from: Cell) -> Vec<Cell> {
    let mut seen = Grid::filled(mask.width(), mask.height(), false);
    let mut order = Vec::new();
    let mut stack = vec![from];
    while let Some(c) = stack.pop() {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        order.push(c);
        for &(dx, dy) in WALK_ORDER.iter().rev() {
            let n = c.offset(dx, dy);
            if mask.get(n) == Some(&true) && !seen[n] {
                stack.push(n);
            }
        }
    }
    order
}

/// One frontier per boundary segment, at the segment's midpoint (the
/// element at index `(n - 1) / 2` of the walk). Sorted by cell. Scores are 0
/// until [`score_frontiers`] runs.
pub fn extract_frontiers(occ: &OccupancyMap) -> Vec<Frontier> {
    let mut out: Vec<Frontier> = frontier_segments(occ)
        .into_iter()
        .map(|seg| Frontier {
            cell: seg[(seg.len() - 1) / 2],
            score: 0.0,
            segment_len: seg.len(),
        })
        .collect();
    out.sort_by(|a, b| a.cell.cmp(&b.cell));
    out
}

/// Score of a frontier: the largest unified value within Chebyshev distance
/// `radius` of its cell. Radius 0 reads the cell itself.
pub fn frontier_score(unified: &UnifiedMap, cell: Cell, radius: u32) -> f64 {
    let r = radius as i32;
    let mut best = 0.0f64;
    for dy in -r..=r {
        for dx in -r..=r {
            if let Some(&v) = unified.get(cell.offset(dx, dy)) {
                best = best.max(v);
            }
        }
    }
    best
}

pub fn score_frontiers(frontiers: &mut [Frontier], unified: &UnifiedMap, radius: u32) {
    for f in frontiers {
        f.score = frontier_score(unified, f.cell, radius);
    }
}

/// Highest-scoring frontier. Ties go to the smaller path distance from the
/// robot, then to the smaller cell. Frontiers without a distance are
/// unreachable and skipped.
pub fn select_frontier(frontiers: &[Frontier], distances: &Grid<Option<u32>>) -> Option<Frontier> {
    select_frontier_within(frontiers, distances, 0.0)
}

/// [`select_frontier`] treating every frontier whose score is within the
/// relative `tolerance` of the best as tied, so the nearest of them wins.
pub fn select_frontier_within(
    frontiers: &[Frontier],
    distances: &Grid<Option<u32>>,
    tolerance: f64,
) -> Option<Frontier> {
    let reachable: Vec<(&Frontier, u32)> = frontiers
        .iter()
        .filter_map(|f| distances.get(f.cell).copied().flatten().map(|d| (f, d)))
        .collect();
    let best = reachable.iter().map(|(f, _)| f.score).fold(f64::NEG_INFINITY, f64::max);
    let floor = if tolerance > 0.0 { (1.0 - tolerance) * best } else { best };
    reachable
        .into_iter()
        .filter(|(f, _)| f.score >= floor)
        .min_by(|(a, da), (b, db)| da.cmp(db).then(b.score.total_cmp(&a.score)).then(a.cell.cmp(&b.cell)))
        .map(|(f, _)| *f)
}

/// Nearest reachable frontier by path distance, ties to the smaller cell.
pub fn nearest_frontier(frontiers: &[Frontier], distances: &Grid<Option<u32>>) -> Option<Frontier> {
    frontiers
        .iter()
        .filter_map(|f| distances.get(f.cell).copied().flatten().map(|d| (f, d)))
        .min_by(|(a, da), (b, db)| da.cmp(db).then(a.cell.cmp(&b.cell)))
        .map(|(f, _)| *f)
}

/// Distance within which a frontier counts as the continuation of the
/// previous goal; frontiers shift as the area behind them is revealed.
pub const HOLD_RADIUS: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoldRule {
    /// Compare unified scores.
    Score,
    /// Compare path distances.
    Distance,
}

/// Keeps the frontier continuing `prev` unless `best` beats it by the
/// relative `margin`, in score or, at equal or lower score, in distance.
/// Otherwise returns `best`.
pub fn hold_frontier(
    frontiers: &[Frontier],
    distances: &Grid<Option<u32>>,
    prev: Cell,
    best: Frontier,
    margin: f64,
    rule: HoldRule,
) -> Frontier {
    let dist = |f: &Frontier| distances.get(f.cell).copied().flatten();
    let Some((held, d_held)) = frontiers
        .iter()
        .filter(|f| f.cell.chebyshev(prev) <= HOLD_RADIUS)
        .filter_map(|f| dist(f).map(|d| (f, d)))
        .min_by_key(|(f, _)| (f.cell.chebyshev(prev), f.cell))
    else {
        return best;
    };
    let near_enough = (1.0 - margin) * f64::from(d_held) <= f64::from(dist(&best).unwrap_or(0) + 1);
    let keep = match rule {
        // A held goal that scores no better must not be much farther either.
        HoldRule::Score => {
            held.score >= (1.0 - margin) * best.score && (held.score > best.score || near_enough)
        }
        HoldRule::Distance => near_enough,
    };
    if keep {
        *held
    } else {
        best
    }
}
