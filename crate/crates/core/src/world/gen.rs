//! Seeded room-and-door world generation.
//!
//! The floor is split recursively into rectangular rooms separated by
//! one-cell walls. Every split gets one door, so the free space is a tree
//! of rooms plus a few optional extra doors. Each room is given a room type
//! and populated with objects drawn from the class-to-room affinity table.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GridWorld, SceneObject, Terrain, MAX_ROOM_TYPES, MAX_TARGETS};
use crate::error::GenerationError;
use crate::grid::{Cell, Grid};

/// `values[r][i]` is the affinity of class `i` for room type `r`, in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinityTable {
    pub room_names: Vec<String>,
    pub class_names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl AffinityTable {
    /// Five room types and twenty household classes.
    pub fn household() -> Self {
        const ROOMS: [&str; 5] = ["bedroom", "kitchen", "bathroom", "living_room", "office"];
        // bedroom, kitchen, bathroom, living_room, office
        const CLASSES: [(&str, [f64; 5]); 20] = [
            ("bed", [1.0, 0.0, 0.0, 0.0, 0.0]),
            ("nightstand", [1.0, 0.0, 0.0, 0.0, 0.0]),
            ("wardrobe", [1.0, 0.0, 0.0, 0.0, 0.1]),
            ("refrigerator", [0.0, 1.0, 0.0, 0.0, 0.0]),
            ("oven", [0.0, 1.0, 0.0, 0.0, 0.0]),
            ("microwave", [0.0, 1.0, 0.0, 0.0, 0.1]),
            ("dining_table", [0.0, 1.0, 0.0, 0.3, 0.0]),
            ("toilet", [0.0, 0.0, 1.0, 0.0, 0.0]),
            ("bathtub", [0.0, 0.0, 1.0, 0.0, 0.0]),
            ("towel", [0.1, 0.0, 1.0, 0.0, 0.0]),
            ("sink", [0.0, 0.6, 1.0, 0.0, 0.0]),
            ("sofa", [0.0, 0.0, 0.0, 1.0, 0.0]),
            ("tv", [0.2, 0.0, 0.0, 1.0, 0.0]),
            ("coffee_table", [0.0, 0.0, 0.0, 1.0, 0.0]),
            ("desk", [0.2, 0.0, 0.0, 0.0, 1.0]),
            ("monitor", [0.0, 0.0, 0.0, 0.0, 1.0]),
            ("bookshelf", [0.1, 0.0, 0.0, 0.3, 1.0]),
            ("chair", [0.1, 0.5, 0.0, 0.3, 0.7]),
            ("plant", [0.2, 0.2, 0.1, 0.5, 0.3]),
            ("lamp", [0.5, 0.0, 0.0, 0.5, 0.3]),
        ];
        let room_names = ROOMS.iter().map(|s| s.to_string()).collect();
        let class_names = CLASSES.iter().map(|(n, _)| n.to_string()).collect();
        let values = (0..ROOMS.len())
            .map(|r| CLASSES.iter().map(|(_, a)| a[r]).collect())
            .collect();
        Self { room_names, class_names, values }
    }

    /// A random sparse table: every class gets one primary room type with
    /// affinity 1 and, with probability one half, a secondary one.
    pub fn random(room_types: usize, classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![vec![0.0; classes]; room_types];
        for i in 0..classes {
            let primary = i % room_types;
            values[primary][i] = 1.0;
            if room_types > 1 && rng.gen_bool(0.5) {
                let secondary = (primary + rng.gen_range(1..room_types)) % room_types;
                values[secondary][i] = (rng.gen_range(1..=5) as f64) / 10.0;
            }
        }
        Self {
            room_names: (0..room_types).map(|r| format!("room{r}")).collect(),
            class_names: (0..classes).map(|i| format!("class{i:02}")).collect(),
            values,
        }
    }

    pub fn room_types(&self) -> usize {
        self.values.len()
    }

    pub fn classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn get(&self, room: usize, class: usize) -> f64 {
        self.values[room][class]
    }

    /// Probability of drawing `class` when sampling one object in a room of
    /// type `room`.
    pub fn class_probability(&self, room: usize, class: usize) -> f64 {
        let total: f64 = self.values[room].iter().sum();
        if total > 0.0 {
            self.values[room][class] / total
        } else {
            0.0
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.values.is_empty() || self.values.len() != self.room_names.len() {
            return Err("affinity rows must match room names".into());
        }
        if self.values.len() > MAX_ROOM_TYPES {
            return Err(format!("at most {MAX_ROOM_TYPES} room types"));
        }
        for row in &self.values {
            if row.len() != self.class_names.len() {
                return Err("affinity row width must match class names".into());
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(format!("affinity {v} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldParams {
    pub width: usize,
    pub height: usize,
    /// Number of target objects K.
    pub targets: usize,
    /// Range of the house's outer side lengths as fractions of the grid side,
    /// walls included. The house sits at a random offset; the rest of the
    /// grid is solid.
    pub house_frac: (f64, f64),
    /// Smallest room interior side, in cells.
    pub min_room: usize,
    /// Rooms with an interior side above this are always split further.
    pub max_room: usize,
    pub objects_per_room: (usize, usize),
    /// Probability of an additional door on each internal wall segment.
    pub extra_door_prob: f64,
    pub resolution: f64,
    pub max_attempts: u32,
    pub affinity: AffinityTable,
}

impl Default for WorldParams {
    fn default() -> Self {
        Self {
            width: 64,
            height: 64,
            targets: 3,
            house_frac: (0.5, 0.65),
            min_room: 6,
            max_room: 16,
            objects_per_room: (3, 6),
            extra_door_prob: 0.25,
            resolution: 0.25,
            max_attempts: 32,
            affinity: AffinityTable::household(),
        }
    }
}

impl WorldParams {
    pub fn room_types(&self) -> usize {
        self.affinity.room_types()
    }

    pub fn classes(&self) -> usize {
        self.affinity.classes()
    }

    fn validate(&self) -> Result<(), GenerationError> {
        let bad = |m: String| Err(GenerationError::InvalidParams(m));
        if self.targets == 0 || self.targets > MAX_TARGETS {
            return bad(format!("K out of range: {} (expected 1..={MAX_TARGETS})", self.targets));
        }
        if let Err(m) = self.affinity.validate() {
            return bad(m);
        }
        if self.targets > self.classes() {
            return bad(format!("K = {} exceeds the {} classes", self.targets, self.classes()));
        }
        if self.min_room < 2 || self.max_room < self.min_room {
            return bad("room size bounds must satisfy 2 <= min_room <= max_room".into());
        }
        let (lo, hi) = self.house_frac;
        if !(0.0 < lo && lo <= hi && hi <= 1.0) {
            return bad(format!("house_frac {lo}..={hi} must satisfy 0 < lo <= hi <= 1"));
        }
        let side = |frac: f64, n: usize| (frac * n as f64).round() as usize;
        if side(lo, self.width).min(side(lo, self.height)) < self.min_room + 2 {
            return bad(format!("{}x{} grid with house_frac {lo} cannot hold one room", self.width, self.height));
        }
        if self.objects_per_room.0 > self.objects_per_room.1 {
            return bad("objects_per_room range is inverted".into());
        }
        if !(0.0..=1.0).contains(&self.extra_door_prob) {
            return bad("extra_door_prob must lie in [0, 1]".into());
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return bad("resolution must be positive".into());
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1".into());
        }
        Ok(())
    }
}

/// Generates a world from `seed`. Identical inputs give identical worlds.
pub fn generate_world(seed: u64, params: &WorldParams) -> Result<GridWorld, GenerationError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::new();
    for _ in 0..params.max_attempts {
        match attempt(&mut rng, params) {
            Ok(world) => return Ok(world),
            Err(reason) => last = reason,
        }
    }
    Err(GenerationError::Exhausted { attempts: params.max_attempts, last })
}

/// Wall-inclusive rectangle: walls sit on x0, x1, y0, y1.
#[derive(Clone, Copy, Debug)]
struct Rect {
    x0: i32,
    y0: i32,
    x1: i32,
    y1: i32,
}

impl Rect {
    fn inner_w(&self) -> usize {
        (self.x1 - self.x0 - 1) as usize
    }

    fn inner_h(&self) -> usize {
        (self.y1 - self.y0 - 1) as usize
    }
}

/// A shared wall produced by one split: vertical walls have a fixed x.
#[derive(Clone, Copy, Debug)]
struct Wall {
    vertical: bool,
    at: i32,
    from: i32,
    to: i32,
}

fn split(rect: Rect, params: &WorldParams, rng: &mut ChaCha8Rng, rooms: &mut Vec<Rect>, walls: &mut Vec<Wall>) {
    let min = params.min_room as i32;
    let (w, h) = (rect.inner_w(), rect.inner_h());
    let can_v = w >= 2 * params.min_room + 1;
    let can_h = h >= 2 * params.min_room + 1;
    let must = w > params.max_room || h > params.max_room;
    if !(can_v || can_h) || (!must && rng.gen_bool(0.5)) {
        rooms.push(rect);
        return;
    }
    let vertical = match (can_v, can_h) {
        (true, true) => {
            if w != h {
                w > h
            } else {
                rng.gen_bool(0.5)
            }
        }
        (v, _) => v,
    };
    if vertical {
        let at = rng.gen_range(rect.x0 + min + 1..=rect.x1 - min - 1);
        walls.push(Wall { vertical, at, from: rect.y0 + 1, to: rect.y1 - 1 });
        split(Rect { x1: at, ..rect }, params, rng, rooms, walls);
        split(Rect { x0: at, ..rect }, params, rng, rooms, walls);
    } else {
        let at = rng.gen_range(rect.y0 + min + 1..=rect.y1 - min - 1);
        walls.push(Wall { vertical, at, from: rect.x0 + 1, to: rect.x1 - 1 });
        split(Rect { y1: at, ..rect }, params, rng, rooms, walls);
        split(Rect { y0: at, ..rect }, params, rng, rooms, walls);
    }
}

fn attempt(rng: &mut ChaCha8Rng, params: &WorldParams) -> Result<GridWorld, String> {
    let (width, height) = (params.width, params.height);
    let (lo, hi) = params.house_frac;
    let side = |n: usize, rng: &mut ChaCha8Rng| {
        let (a, b) = ((lo * n as f64).round() as i32, (hi * n as f64).round() as i32);
        rng.gen_range(a..=b)
    };
    let (hw, hh) = (side(width, rng), side(height, rng));
    let (ox, oy) = (rng.gen_range(0..=width as i32 - hw), rng.gen_range(0..=height as i32 - hh));
    let root = Rect { x0: ox, y0: oy, x1: ox + hw - 1, y1: oy + hh - 1 };
    let mut rooms = Vec::new();
    let mut walls = Vec::new();
    split(root, params, rng, &mut rooms, &mut walls);

    let mut occupancy = Grid::filled(width, height, Terrain::Obstacle);
    let mut room_id: Grid<Option<usize>> = Grid::filled(width, height, None);
    for (id, r) in rooms.iter().enumerate() {
        for y in r.y0 + 1..r.y1 {
            for x in r.x0 + 1..r.x1 {
                let c = Cell::new(x, y);
                occupancy[c] = Terrain::Free;
                room_id[c] = Some(id);
            }
        }
    }

    // Doors: one per split wall, plus optional extras.
    let mut doors = Vec::new();
    for wall in &walls {
        let candidates: Vec<Cell> = (wall.from..=wall.to)
            .map(|t| if wall.vertical { Cell::new(wall.at, t) } else { Cell::new(t, wall.at) })
            .filter(|&c| {
                let (a, b) = if wall.vertical {
                    (c.offset(-1, 0), c.offset(1, 0))
                } else {
                    (c.offset(0, -1), c.offset(0, 1))
                };
                room_id.get(a).copied().flatten().is_some() && room_id.get(b).copied().flatten().is_some()
            })
            .collect();
        let Some(&door) = candidates.choose(rng) else {
            return Err("split wall without a door position".into());
        };
        doors.push(door);
        if candidates.len() > 4 && rng.gen_bool(params.extra_door_prob) {
            if let Some(&extra) = candidates.choose(rng) {
                doors.push(extra);
            }
        }
    }
    for &door in &doors {
        occupancy[door] = Terrain::Free;
        let side = door
            .neighbors4()
            .into_iter()
            .filter_map(|n| room_id.get(n).copied().flatten())
            .min();
        room_id[door] = side;
    }

    // Room types: every type appears at least once when there are enough rooms.
    let types = params.room_types();
    let mut room_type: Vec<usize> = (0..rooms.len()).map(|i| i % types).collect();
    room_type.shuffle(rng);

    let room_label = room_id.map(|id| id.map_or(0, |id| room_type[id] as u8));

    // Interior cells per room, excluding cells next to doors.
    let mut interior: Vec<Vec<Cell>> = vec![Vec::new(); rooms.len()];
    for (c, id) in room_id.iter() {
        if let Some(id) = id {
            let near_door = doors.iter().any(|d| d.chebyshev(c) <= 1);
            if !near_door {
                interior[*id].push(c);
            }
        }
    }
    for cells in &mut interior {
        cells.shuffle(rng);
    }

    // Targets are distinct classes; other instances of those classes are withheld.
    let mut classes: Vec<usize> = (0..params.classes()).collect();
    classes.shuffle(rng);
    let target_classes: Vec<usize> = classes[..params.targets].to_vec();
    let aff = &params.affinity;

    let mut objects: Vec<SceneObject> = Vec::new();
    let mut cursor = vec![0usize; rooms.len()];
    for (room, &rt) in room_type.iter().enumerate() {
        let weights: Vec<f64> = (0..params.classes())
            .map(|i| if target_classes.contains(&i) { 0.0 } else { aff.get(rt, i) })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            continue;
        }
        let n = rng.gen_range(params.objects_per_room.0..=params.objects_per_room.1);
        for _ in 0..n {
            let Some(&cell) = interior[room].get(cursor[room]) else {
                break;
            };
            cursor[room] += 1;
            let class_id = sample_weighted(rng, &weights, total);
            objects.push(SceneObject { class_id, cell });
        }
    }

    let mut targets = Vec::with_capacity(params.targets);
    for &t in &target_classes {
        let weights: Vec<f64> = room_type
            .iter()
            .enumerate()
            .map(|(room, &rt)| {
                if cursor[room] < interior[room].len() {
                    aff.class_probability(rt, t)
                } else {
                    0.0
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(format!("no room can host target class {t}"));
        }
        let room = sample_weighted(rng, &weights, total);
        let cell = interior[room][cursor[room]];
        cursor[room] += 1;
        targets.push(objects.len());
        objects.push(SceneObject { class_id: t, cell });
    }

    let world = GridWorld::new(
        occupancy,
        room_label,
        types,
        params.classes(),
        objects,
        targets,
        params.resolution,
    )
    .map_err(|e| e.to_string())?;
    if world.spawn_cells().len() != world.free_cells().count() {
        return Err("free space is not connected".into());
    }
    Ok(world)
}

fn sample_weighted(rng: &mut ChaCha8Rng, weights: &[f64], total: f64) -> usize {
    let mut u = rng.gen_range(0.0..total);
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
