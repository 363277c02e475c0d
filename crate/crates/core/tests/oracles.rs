//! Library results checked against slow, independent reimplementations.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use finder_core::grid::{Cell, Grid};
use finder_core::mapping::{Belief, OccupancyMap};
use finder_core::planner::{extract_frontiers, optimal_tour, plan_path, plan_path_facing, sample_start};
use finder_core::world::{generate_world, observe, GridWorld, Kinematics, RobotState, SensorConfig, Terrain, WorldParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_world(seed: u64) -> GridWorld {
    let params = WorldParams { width: 32, height: 32, targets: 3, ..WorldParams::default() };
    generate_world(seed, &params).unwrap()
}

/// Dijkstra with per-cell entry costs; `None` cost means impassable.
fn dijkstra(w: usize, h: usize, from: Cell, cost: impl Fn(Cell) -> Option<u64>) -> Grid<Option<u64>> {
    let mut dist: Grid<Option<u64>> = Grid::filled(w, h, None);
    let mut heap = BinaryHeap::new();
    dist[from] = Some(0);
    heap.push(Reverse((0u64, from.y, from.x)));
    while let Some(Reverse((d, y, x))) = heap.pop() {
        let c = Cell { x, y };
        if dist[c].is_some_and(|best| best < d) {
            continue;
        }
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let n = Cell { x: x + dx, y: y + dy };
            if n.x < 0 || n.y < 0 || n.x >= w as i32 || n.y >= h as i32 {
                continue;
            }
            let Some(step) = cost(n) else { continue };
            let nd = d + step;
            if dist[n].map_or(true, |old| nd < old) {
                dist[n] = Some(nd);
                heap.push(Reverse((nd, n.y, n.x)));
            }
        }
    }
    dist
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

#[test]
fn tour_matches_permutation_oracle() {
    for seed in 0..50 {
        let world = small_world(seed);
        let start = sample_start(&world, &Kinematics::default(), seed ^ 0xabc).unwrap().cell;
        let targets = world.target_cells();
        let free = |c: Cell| (world.terrain(c) == Some(Terrain::Free)).then_some(1);
        let (w, h) = (world.width(), world.height());
        let from_start = dijkstra(w, h, start, free);
        let between: Vec<Grid<Option<u64>>> = targets.iter().map(|&t| dijkstra(w, h, t, free)).collect();
        let best = permutations(&(0..targets.len()).collect::<Vec<_>>())
            .into_iter()
            .map(|order| {
                let mut total = from_start[targets[order[0]]].unwrap();
                for pair in order.windows(2) {
                    total += between[pair[0]][targets[pair[1]]].unwrap();
                }
                total
            })
            .min()
            .unwrap();
        let tour = optimal_tour(&world, start, &targets).unwrap();
        assert_eq!(tour.length as u64, best, "world {seed}");
        let mut order = tour.order.clone();
        order.sort_unstable();
        assert_eq!(order, vec![0, 1, 2]);
    }
}

#[test]
fn collinear_corridor_tour() {
    let occ = Grid::filled(10, 1, Terrain::Free);
    let objects = vec![
        finder_core::world::SceneObject { class_id: 0, cell: Cell { x: 3, y: 0 } },
        finder_core::world::SceneObject { class_id: 1, cell: Cell { x: 7, y: 0 } },
    ];
    let world = GridWorld::new(occ, Grid::filled(10, 1, 0), 1, 2, objects, vec![0, 1], 1.0).unwrap();
    let tour = optimal_tour(&world, Cell { x: 0, y: 0 }, &world.target_cells()).unwrap();
    assert_eq!((tour.length, tour.order), (7, vec![0, 1]));
}

/// Random partially known map: each cell unknown, free or obstacle.
fn random_occupancy(rng: &mut ChaCha8Rng, w: usize, h: usize, p_obstacle: f64, p_unknown: f64) -> OccupancyMap {
    let mut occ = OccupancyMap::new(w, h);
    for y in 0..h as i32 {
        for x in 0..w as i32 {
            let r: f64 = rng.gen();
            if r < p_obstacle {
                occ.mark(Cell { x, y }, Belief::Obstacle);
            } else if r >= p_obstacle + p_unknown {
                occ.mark(Cell { x, y }, Belief::Free);
            }
        }
    }
    occ
}

#[test]
fn astar_matches_dijkstra() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..300 {
        let (w, h) = (rng.gen_range(2..20), rng.gen_range(2..20));
        let occ = random_occupancy(&mut rng, w, h, 0.3, 0.3);
        let pick = |rng: &mut ChaCha8Rng| Cell { x: rng.gen_range(0..w as i32), y: rng.gen_range(0..h as i32) };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        // Unknown cells cost 3, free cells 1; scaled to integers for the oracle.
        let unknown_cost = 3.0;
        let cost = |c: Cell| match occ.get(c) {
            Some(Belief::Free) => Some(1),
            Some(Belief::Unknown) => Some(3),
            _ => None,
        };
        let oracle = if occ.is_traversable(a) { dijkstra(w, h, a, cost)[b] } else { None };
        let heading = rng.gen_range(0..12) * 30;
        for path in [plan_path(&occ, a, b, unknown_cost), plan_path_facing(&occ, a, Some(heading), b, unknown_cost)] {
            match (path, oracle) {
                (None, None) => {}
                (Some(p), Some(d)) => {
                    assert_eq!((p[0], *p.last().unwrap()), (a, b), "case {case}");
                    for pair in p.windows(2) {
                        assert_eq!(pair[0].manhattan(pair[1]), 1, "case {case}");
                    }
                    let total: u64 = p[1..].iter().map(|&c| cost(c).unwrap()).sum();
                    assert_eq!(total, d, "case {case}");
                }
                (p, d) => panic!("case {case}: planner {p:?} vs oracle {d:?}"),
            }
        }
    }
}

/// Frontier segments by flood fill over boundary cells, as cell sets.
fn brute_segments(occ: &OccupancyMap) -> Vec<BTreeSet<Cell>> {
    let (w, h) = (occ.width() as i32, occ.height() as i32);
    let is_boundary = |c: Cell| {
        occ.get(c) == Some(Belief::Free)
            && [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|&(dx, dy)| occ.get(Cell { x: c.x + dx, y: c.y + dy }) == Some(Belief::Unknown))
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let c = Cell { x, y };
            if !is_boundary(c) || seen.contains(&c) {
                continue;
            }
            let mut seg = BTreeSet::new();
            let mut stack = vec![c];
            while let Some(p) = stack.pop() {
                if !seen.insert(p) {
                    continue;
                }
                seg.insert(p);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let n = Cell { x: p.x + dx, y: p.y + dy };
                        if (dx, dy) != (0, 0) && is_boundary(n) && !seen.contains(&n) {
                            stack.push(n);
                        }
                    }
                }
            }
            out.push(seg);
        }
    }
    out
}

fn adjacent8(a: Cell, b: Cell) -> bool {
    a != b && a.chebyshev(b) == 1
}

/// For a simple chain, the ordered cells from the end the extractor starts
/// at: the end farther (in hops) from the segment's first cell in (y, x)
/// order, the smaller cell on a tie.
fn chain_order(seg: &BTreeSet<Cell>) -> Option<Vec<Cell>> {
    let cells: Vec<Cell> = seg.iter().copied().collect();
    let degree = |c: Cell| cells.iter().filter(|&&o| adjacent8(c, o)).count();
    if cells.len() == 1 {
        return Some(cells);
    }
    if cells.iter().any(|&c| degree(c) > 2) {
        return None;
    }
    let ends: Vec<Cell> = cells.iter().copied().filter(|&c| degree(c) == 1).collect();
    if ends.len() != 2 {
        return None;
    }
    let walk = |from: Cell| {
        let mut order = vec![from];
        while order.len() < cells.len() {
            let last = *order.last().unwrap();
            let next = cells.iter().copied().find(|&c| adjacent8(last, c) && !order.contains(&c)).unwrap();
            order.push(next);
        }
        order
    };
    let first = cells[0];
    let hops = |e: Cell| {
        let o = walk(e);
        o.iter().position(|&c| c == first).unwrap()
    };
    let (e0, e1) = (ends[0], ends[1]);
    let start = match hops(e0).cmp(&hops(e1)) {
        std::cmp::Ordering::Greater => e0,
        std::cmp::Ordering::Less => e1,
        std::cmp::Ordering::Equal => e0.min(e1),
    };
    Some(walk(start))
}

fn check_frontiers(occ: &OccupancyMap, label: &str) -> usize {
    let segs = brute_segments(occ);
    let fronts = extract_frontiers(occ);
    assert_eq!(fronts.len(), segs.len(), "{label}");
    let mut chains = 0;
    for seg in &segs {
        let f: Vec<_> = fronts.iter().filter(|f| seg.contains(&f.cell)).collect();
        assert_eq!(f.len(), 1, "{label}: one frontier per segment");
        assert_eq!(f[0].segment_len, seg.len(), "{label}");
        if let Some(order) = chain_order(seg) {
            assert_eq!(f[0].cell, order[(order.len() - 1) / 2], "{label}: chain midpoint");
            chains += 1;
        }
    }
    chains
}

#[test]
fn frontiers_match_brute_force_on_random_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut chains = 0;
    for case in 0..300 {
        let (w, h) = (rng.gen_range(1..16), rng.gen_range(1..16));
        let occ = random_occupancy(&mut rng, w, h, 0.15, 0.4);
        chains += check_frontiers(&occ, &format!("random case {case}"));
    }
    assert!(chains > 100);
}

#[test]
fn frontiers_match_brute_force_on_explored_worlds() {
    let sensor = SensorConfig::default();
    for seed in 0..50 {
        let world = small_world(seed);
        let mut occ = OccupancyMap::new(world.width(), world.height());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let free: Vec<Cell> = world.free_cells().collect();
        for _ in 0..6 {
            let cell = free[rng.gen_range(0..free.len())];
            occ.update(&observe(&world, &RobotState::new(cell, rng.gen_range(0..12) * 30), &sensor));
        }
        check_frontiers(&occ, &format!("world {seed}"));
    }
}

#[test]
fn straight_boundary_midpoint() {
    // Row 0 unknown, row 1 free: one 5-cell segment with its midpoint at x = 2.
    let mut occ = OccupancyMap::new(5, 2);
    for x in 0..5 {
        occ.mark(Cell { x, y: 1 }, Belief::Free);
    }
    let f = extract_frontiers(&occ);
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].cell, Cell { x: 2, y: 1 });
}

// Exact geometry on doubled coordinates: cell centres are even, cell edges odd.

/// Entry parameter, as a fraction `num/den` with `den > 0`, at which the
/// segment from `a` to `b` meets the closed square of `sq`, if it does.
fn entry(a: Cell, b: Cell, sq: Cell) -> Option<(i64, i64)> {
    let (ax, ay) = (2 * a.x as i64, 2 * a.y as i64);
    let (dx, dy) = (2 * (b.x - a.x) as i64, 2 * (b.y - a.y) as i64);
    // [lo, hi] as fractions; start with [0, 1].
    let (mut lo, mut hi) = ((0i64, 1i64), (1i64, 1i64));
    let less = |p: (i64, i64), q: (i64, i64)| p.0 * q.1 < q.0 * p.1;
    for (p, d, c) in [(ax, dx, 2 * sq.x as i64), (ay, dy, 2 * sq.y as i64)] {
        let (min, max) = (c - 1, c + 1);
        if d == 0 {
            if p < min || p > max {
                return None;
            }
            continue;
        }
        let (mut t0, mut t1) = ((min - p, d), (max - p, d));
        if d < 0 {
            t0 = (p - min, -d);
            t1 = (p - max, -d);
            std::mem::swap(&mut t0, &mut t1);
        }
        if less(lo, t0) {
            lo = t0;
        }
        if less(t1, hi) {
            hi = t1;
        }
    }
    (!less(hi, lo)).then_some(lo)
}

fn in_view(robot: &RobotState, cell: Cell, sensor: &SensorConfig) -> bool {
    let (dx, dy) = ((cell.x - robot.cell.x) as f64, (cell.y - robot.cell.y) as f64);
    if dx * dx + dy * dy > sensor.range * sensor.range {
        return false;
    }
    if cell == robot.cell {
        return true;
    }
    let mut a = (-dy).atan2(dx) - (robot.heading_deg as f64).to_radians();
    while a <= -std::f64::consts::PI {
        a += 2.0 * std::f64::consts::PI;
    }
    while a > std::f64::consts::PI {
        a -= 2.0 * std::f64::consts::PI;
    }
    a.abs() <= sensor.fov_deg.to_radians() / 2.0
}

/// Obstacles strictly between the two centres that the segment touches,
/// with their entry parameters.
fn blockers(world: &GridWorld, a: Cell, b: Cell) -> Vec<(Cell, (i64, i64))> {
    let (x0, x1) = (a.x.min(b.x), a.x.max(b.x));
    let (y0, y1) = (a.y.min(b.y), a.y.max(b.y));
    let mut out = Vec::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            let c = Cell { x, y };
            if c == a || c == b || world.terrain(c) != Some(Terrain::Obstacle) {
                continue;
            }
            if let Some(t) = entry(a, b, c) {
                out.push((c, t));
            }
        }
    }
    out
}

#[test]
fn visibility_matches_geometric_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..20 {
        let world = small_world(seed);
        let free: Vec<Cell> = world.free_cells().collect();
        for _ in 0..5 {
            let robot = RobotState::new(free[rng.gen_range(0..free.len())], rng.gen_range(0..12) * 30);
            let fov = if rng.gen_bool(0.3) { 360.0 } else { 79.0 };
            let sensor = SensorConfig { range: 10.0, fov_deg: fov };
            let obs = observe(&world, &robot, &sensor);
            let seen: BTreeSet<Cell> = obs.visible_cells.iter().map(|v| v.cell).collect();
            let mut faces: BTreeSet<Cell> = BTreeSet::new();
            let mut must_see_one: Vec<Vec<Cell>> = Vec::new();
            for y in 0..world.height() as i32 {
                for x in 0..world.width() as i32 {
                    let c = Cell { x, y };
                    if !in_view(&robot, c, &sensor) {
                        continue;
                    }
                    let b = blockers(&world, robot.cell, c);
                    if b.is_empty() {
                        // A clear line of sight: visible whatever the terrain.
                        assert!(seen.contains(&c), "world {seed}: {c:?} has a clear view");
                        faces.insert(c);
                        continue;
                    }
                    let first = b.iter().map(|x| x.1).min_by(|p, q| (p.0 * q.1).cmp(&(q.0 * p.1))).unwrap();
                    let tied: Vec<Cell> =
                        b.iter().filter(|x| x.1 .0 * first.1 == first.0 * x.1 .1).map(|x| x.0).collect();
                    faces.extend(tied.iter().copied());
                    let in_cone: Vec<Cell> = tied.into_iter().filter(|&t| in_view(&robot, t, &sensor)).collect();
                    if !in_cone.is_empty() {
                        must_see_one.push(in_cone);
                    }
                }
            }
            for v in &obs.visible_cells {
                assert!(faces.contains(&v.cell), "world {seed}: {:?} should be hidden", v.cell);
                assert_eq!(v.occluding, world.terrain(v.cell) == Some(Terrain::Obstacle));
                if !v.occluding {
                    assert!(blockers(&world, robot.cell, v.cell).is_empty());
                }
            }
            for group in must_see_one {
                assert!(group.iter().any(|c| seen.contains(c)), "world {seed}: none of {group:?} seen");
            }
        }
    }
}
