use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::grid::{Cell, Grid};
use crate::mapping::{Belief, OccupancyMap};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Node {
    f: f64,
    g: f64,
    cell: Cell,
    /// Index into `Cell::neighbors4` of the move that entered `cell`.
    dir: usize,
}

impl Eq for Node {}

impl Ord for Node {
    // BinaryHeap is a max-heap: smallest f first, then largest g, then cell.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.g.total_cmp(&other.g))
            .then(other.cell.cmp(&self.cell))
            .then(other.dir.cmp(&self.dir))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Extra cost of a change of direction. Small enough that it only breaks
/// ties between paths of equal length, so straight runs win over staircases.
const TURN_TIE: f64 = 1e-6;

/// A* over free and unknown cells, 4-connected. Entering a free cell costs
/// 1; entering an unknown cell costs `unknown_cost`. Returns the cell
/// sequence from `from` to `to` inclusive, or `None` when the goal is sealed
/// off by known obstacles.
pub fn plan_path(occ: &OccupancyMap, from: Cell, to: Cell, unknown_cost: f64) -> Option<Vec<Cell>> {
    plan_path_facing(occ, from, None, to, unknown_cost)
}

/// [`plan_path`] that, among shortest paths, prefers the one with the
/// fewest direction changes, counting a first move off the axis nearest to
/// `heading_deg` as one.
pub fn plan_path_facing(
    occ: &OccupancyMap,
    from: Cell,
    heading_deg: Option<u32>,
    to: Cell,
    unknown_cost: f64,
) -> Option<Vec<Cell>> {
    if !occ.is_traversable(from) || !occ.is_traversable(to) {
        return None;
    }
    if from == to {
        return Some(vec![from]);
    }
    let step_cost = |c: Cell| match occ.get(c) {
        Some(Belief::Free) => Some(1.0),
        Some(Belief::Unknown) => Some(unknown_cost),
        _ => None,
    };
    let h_scale = unknown_cost.min(1.0);
    let h = |c: Cell| c.manhattan(to) as f64 * h_scale;
    // Axis index 0..4 of the heading (E, N, W, S); 4 means no preference.
    let start_dir = heading_deg.map_or(4, |d| ((d % 360 + 45) / 90 % 4) as usize);

    let (w, ht) = (occ.width(), occ.height());
    let mut g_best: Vec<Grid<f64>> = vec![Grid::filled(w, ht, f64::INFINITY); 5];
    let mut parent: Vec<Grid<Option<(Cell, usize)>>> = vec![Grid::filled(w, ht, None); 5];
    let mut closed = vec![Grid::filled(w, ht, false); 5];
    let mut open = BinaryHeap::new();
    g_best[start_dir][from] = 0.0;
    open.push(Node { f: h(from), g: 0.0, cell: from, dir: start_dir });
    while let Some(Node { g, cell, dir, .. }) = open.pop() {
        if closed[dir][cell] {
            continue;
        }
        closed[dir][cell] = true;
        if cell == to {
            let mut path = vec![to];
            let mut cur = (to, dir);
            while let Some(p) = parent[cur.1][cur.0] {
                path.push(p.0);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for (nd, n) in cell.neighbors4().into_iter().enumerate() {
            let Some(cost) = step_cost(n) else { continue };
            if closed[nd][n] {
                continue;
            }
            let turn = if dir == 4 || dir == nd { 0.0 } else { TURN_TIE };
            let ng = g + cost + turn;
            if ng < g_best[nd][n] {
                g_best[nd][n] = ng;
                parent[nd][n] = Some((cell, dir));
                open.push(Node { f: ng + h(n), g: ng, cell: n, dir: nd });
            }
        }
    }
    None
}

/// Unweighted 4-connected distances over free and unknown cells.
pub fn plan_distances(occ: &OccupancyMap, from: Cell) -> Grid<Option<u32>> {
    let mut dist = Grid::filled(occ.width(), occ.height(), None);
    if !occ.is_traversable(from) {
        return dist;
    }
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        let d = dist[c].unwrap_or(0);
        for n in c.neighbors4() {
            if occ.is_traversable(n) && dist.get(n) == Some(&None) {
                dist[n] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}
