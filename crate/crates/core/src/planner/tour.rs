use crate::error::TourError;
use crate::grid::Cell;
use crate::world::{distance_field, GridWorld, MAX_TARGETS};

/// Shortest open tour from `start` through every cell of `targets`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tour {
    /// Total length in cells.
    pub length: u32,
    /// Visiting order as indices into `targets`.
    pub order: Vec<usize>,
}

/// Exact shortest open tour (start fixed, no return) using true 4-connected
/// distances. Solved by dynamic programming over visited subsets.
pub fn optimal_tour(world: &GridWorld, start: Cell, targets: &[Cell]) -> Result<Tour, TourError> {
    let k = targets.len();
    if k > MAX_TARGETS {
        return Err(TourError::TooManyTargets(k));
    }
    if k == 0 {
        return Ok(Tour { length: 0, order: Vec::new() });
    }
    // d[i][j] over nodes 0..k (targets) and k (start).
    let mut nodes = targets.to_vec();
    nodes.push(start);
    let mut d = vec![vec![0u32; k + 1]; k + 1];
    for (i, &a) in nodes.iter().enumerate() {
        let field = distance_field(world, a);
        for (j, &b) in nodes.iter().enumerate() {
            d[i][j] = field[b].ok_or(TourError::Unreachable(if j < k { j } else { i }))?;
        }
    }

    let full = 1usize << k;
    let mut cost = vec![vec![u32::MAX; k]; full];
    let mut prev = vec![vec![usize::MAX; k]; full];
    for j in 0..k {
        cost[1 << j][j] = d[k][j];
    }
    for set in 1..full {
        for last in 0..k {
            let c = cost[set][last];
            if set & (1 << last) == 0 || c == u32::MAX {
                continue;
            }
            for next in 0..k {
                if set & (1 << next) != 0 {
                    continue;
                }
                let s2 = set | (1 << next);
                let c2 = c + d[last][next];
                if c2 < cost[s2][next] {
                    cost[s2][next] = c2;
                    prev[s2][next] = last;
                }
            }
        }
    }
    let (mut last, length) = cost[full - 1]
        .iter()
        .copied()
        .enumerate()
        .min_by_key(|&(j, c)| (c, j))
        .unwrap_or((0, 0));
    let mut order = Vec::with_capacity(k);
    let mut set = full - 1;
    while set != 0 {
        order.push(last);
        let p = prev[set][last];
        set &= !(1 << last);
        last = p;
    }
    order.reverse();
    Ok(Tour { length, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::world::{SceneObject, Terrain};

    fn corridor(len: usize, objects: &[i32]) -> GridWorld {
        let occ = Grid::filled(len, 1, Terrain::Free);
        let labels = Grid::filled(len, 1, 0u8);
        let objs = objects.iter().enumerate().map(|(i, &x)| SceneObject { class_id: i, cell: Cell::new(x, 0) }).collect();
        let targets = (0..objects.len()).collect();
        GridWorld::new(occ, labels, 1, objects.len(), objs, targets, 1.0).unwrap()
    }

    #[test]
    fn single_target_is_shortest_path() {
        let w = corridor(10, &[7]);
        let t = optimal_tour(&w, Cell::new(2, 0), &w.target_cells()).unwrap();
        assert_eq!(t, Tour { length: 5, order: vec![0] });
    }

    #[test]
    fn collinear_corridor() {
        let w = corridor(10, &[7, 3]);
        let t = optimal_tour(&w, Cell::new(0, 0), &w.target_cells()).unwrap();
        assert_eq!(t, Tour { length: 7, order: vec![1, 0] });
    }

    #[test]
    fn start_between_targets() {
        // From x=4: left to 2 then right to 9 costs 2 + 7 = 9; right first costs 5 + 7 = 12.
        let w = corridor(10, &[9, 2]);
        let t = optimal_tour(&w, Cell::new(4, 0), &w.target_cells()).unwrap();
        assert_eq!(t, Tour { length: 9, order: vec![1, 0] });
    }

    #[test]
    fn too_many_targets() {
        let w = corridor(10, &[1]);
        let cells = vec![Cell::new(1, 0); 9];
        assert!(matches!(optimal_tour(&w, Cell::new(0, 0), &cells), Err(TourError::TooManyTargets(9))));
    }
}
