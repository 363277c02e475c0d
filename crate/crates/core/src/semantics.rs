//! Similarity model standing in for a vision-language model.
//!
//! Two quantities are provided: a scene-level score comparing what the
//! robot currently sees with each target, and an object-level table `W`
//! relating every scene class to every target. Scene content is summarised
//! by the histogram of room labels in view, so the scene score is the
//! histogram-weighted mean of per-room target affinities.
//!
//! All similarities live in `[0, 1]`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GenerationError, SimilarityError};
use crate::world::{generate_world, AffinityTable, GridWorld, Observation, WorldParams};

pub const SIMILARITY_MAGIC: &str = "finder-similarity v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityTable {
    class_names: Vec<String>,
    target_names: Vec<String>,
    /// `w[i][j]`: class `i` against target `j`.
    w: Vec<Vec<f64>>,
    /// `room_affinity[r][j]`: room type `r` against target `j`.
    room_affinity: Vec<Vec<f64>>,
}

impl SimilarityTable {
    pub fn new(
        class_names: Vec<String>,
        target_names: Vec<String>,
        w: Vec<Vec<f64>>,
        room_affinity: Vec<Vec<f64>>,
    ) -> Result<Self, SimilarityError> {
        let table = Self { class_names, target_names, w, room_affinity };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<(), SimilarityError> {
        let (l, k) = (self.class_names.len(), self.target_names.len());
        for names in [&self.class_names, &self.target_names] {
            let mut seen = BTreeSet::new();
            for n in names {
                if n.is_empty() || n.contains(char::is_whitespace) {
                    return Err(SimilarityError::Parse { line: 0, msg: format!("bad name {n:?}") });
                }
                if !seen.insert(n) {
                    return Err(SimilarityError::DuplicateName(n.clone()));
                }
            }
        }
        if self.w.len() != l {
            return Err(SimilarityError::DimensionMismatch { what: "W rows", table: self.w.len(), world: l });
        }
        if self.room_affinity.is_empty() {
            return Err(SimilarityError::DimensionMismatch { what: "A rows", table: 0, world: 1 });
        }
        for (block, rows) in [('W', &self.w), ('A', &self.room_affinity)] {
            for (row, vals) in rows.iter().enumerate() {
                if vals.len() != k {
                    return Err(SimilarityError::DimensionMismatch { what: "row width", table: vals.len(), world: k });
                }
                for (col, &value) in vals.iter().enumerate() {
                    if !(0.0..=1.0).contains(&value) {
                        return Err(SimilarityError::OutOfRange { block, row, col, value });
                    }
                }
            }
        }
        for (j, t) in self.target_names.iter().enumerate() {
            let i = self
                .class_names
                .iter()
                .position(|c| c == t)
                .ok_or_else(|| SimilarityError::UnknownTargetClass(t.clone()))?;
            if self.w[i][j] != 1.0 {
                return Err(SimilarityError::SelfSimilarity { target: t.clone(), value: self.w[i][j] });
            }
        }
        Ok(())
    }

    pub fn classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn targets(&self) -> usize {
        self.target_names.len()
    }

    pub fn room_types(&self) -> usize {
        self.room_affinity.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn target_names(&self) -> &[String] {
        &self.target_names
    }

    pub fn room_affinity(&self, room: usize, j: usize) -> f64 {
        self.room_affinity[room][j]
    }

    /// Checks the table against a world: class, target and room-type counts
    /// must agree, and target slot `j` must name the class of world target `j`.
    pub fn bind(&self, world: &GridWorld) -> Result<(), SimilarityError> {
        let dims = [
            ("classes L", self.classes(), world.num_classes()),
            ("targets K", self.targets(), world.num_targets()),
            ("room types R", self.room_types(), world.room_types()),
        ];
        for (what, table, world) in dims {
            if table != world {
                return Err(SimilarityError::DimensionMismatch { what, table, world });
            }
        }
        for j in 0..self.targets() {
            let class = world.target_object(j).map(|o| o.class_id).unwrap_or(usize::MAX);
            let table_class = self.class_names.iter().position(|c| *c == self.target_names[j]);
            if table_class != Some(class) {
                return Err(SimilarityError::TargetMismatch {
                    slot: j,
                    table: self.target_names[j].clone(),
                    world: self.class_names.get(class).cloned().unwrap_or_default(),
                });
            }
        }
        Ok(())
    }

    fn check_target(&self, j: usize) -> Result<(), SimilarityError> {
        if j >= self.targets() {
            return Err(SimilarityError::IndexOutOfRange { what: "target", index: j, size: self.targets() });
        }
        Ok(())
    }
}

/// Scene-level score of the current view for target `j`: the mean room
/// affinity over visible free cells. An empty view scores 0.
pub fn scene_score(obs: &Observation, j: usize, table: &SimilarityTable) -> Result<f64, SimilarityError> {
    table.check_target(j)?;
    if obs.room_histogram.len() > table.room_types() {
        return Err(SimilarityError::DimensionMismatch {
            what: "room types R",
            table: table.room_types(),
            world: obs.room_histogram.len(),
        });
    }
    let total: u64 = obs.room_histogram.iter().map(|&n| n as u64).sum();
    if total == 0 {
        return Ok(0.0);
    }
    let weighted: f64 = obs
        .room_histogram
        .iter()
        .enumerate()
        .map(|(r, &n)| n as f64 * table.room_affinity[r][j])
        .sum();
    Ok(weighted / total as f64)
}

pub fn object_similarity(class_id: usize, j: usize, table: &SimilarityTable) -> Result<f64, SimilarityError> {
    table.check_target(j)?;
    table
        .w
        .get(class_id)
        .map(|row| row[j])
        .ok_or(SimilarityError::IndexOutOfRange { what: "class", index: class_id, size: table.classes() })
}

fn write_row(out: &mut String, row: &[f64]) {
    let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
}

pub fn write_similarity(table: &SimilarityTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SIMILARITY_MAGIC}");
    let _ = writeln!(out, "dims {} {} {}", table.classes(), table.targets(), table.room_types());
    for c in &table.class_names {
        let _ = writeln!(out, "class {c}");
    }
    for t in &table.target_names {
        let _ = writeln!(out, "target {t}");
    }
    out.push_str("W\n");
    for row in &table.w {
        write_row(&mut out, row);
    }
    out.push_str("A\n");
    for row in &table.room_affinity {
        write_row(&mut out, row);
    }
    out.push_str("end\n");
    out
}

pub fn parse_similarity(text: &str) -> Result<SimilarityTable, SimilarityError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with(';'));
    let mut last = 0;
    let mut next = |what: &str| -> Result<(usize, &str), SimilarityError> {
        let item = lines.next().ok_or_else(|| SimilarityError::Parse {
            line: last,
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        last = item.0;
        Ok(item)
    };
    let perr = |line: usize, msg: String| SimilarityError::Parse { line, msg };

    let (n, magic) = next("magic")?;
    if magic != SIMILARITY_MAGIC {
        return Err(perr(n, format!("expected `{SIMILARITY_MAGIC}`")));
    }
    let (n, dims) = next("dims")?;
    let parts: Vec<&str> = dims.split_whitespace().collect();
    let [ "dims", l, k, r ] = parts.as_slice() else {
        return Err(perr(n, "expected `dims <L> <K> <R>`".into()));
    };
    let parse_dim = |s: &str| s.parse::<usize>().map_err(|_| perr(n, format!("bad dimension `{s}`")));
    let (l, k, r) = (parse_dim(l)?, parse_dim(k)?, parse_dim(r)?);

    let mut named = |key: &str, count: usize| -> Result<Vec<String>, SimilarityError> {
        (0..count)
            .map(|_| {
                let (n, line) = next(key)?;
                match line.split_whitespace().collect::<Vec<_>>().as_slice() {
                    [kw, name] if *kw == key => Ok(name.to_string()),
                    _ => Err(perr(n, format!("expected `{key} <name>`"))),
                }
            })
            .collect()
    };
    let class_names = named("class", l)?;
    let target_names = named("target", k)?;

    let mut block = |tag: char, rows: usize| -> Result<Vec<Vec<f64>>, SimilarityError> {
        let (n, line) = next("block tag")?;
        if line != tag.to_string() {
            return Err(perr(n, format!("expected block `{tag}`")));
        }
        (0..rows)
            .map(|row| {
                let (n, line) = next("matrix row")?;
                let vals = line
                    .split_whitespace()
                    .map(|s| s.parse::<f64>().map_err(|_| perr(n, format!("bad number `{s}`"))))
                    .collect::<Result<Vec<f64>, _>>()?;
                if vals.len() != k {
                    return Err(perr(n, format!("row needs {k} values, found {}", vals.len())));
                }
                if let Some((col, &value)) = vals.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
                    return Err(SimilarityError::OutOfRange { block: tag, row, col, value });
                }
                Ok(vals)
            })
            .collect()
    };
    let w = block('W', l)?;
    let room_affinity = block('A', r)?;
    let (n, end) = next("end")?;
    if end != "end" {
        return Err(perr(n, "expected `end`".into()));
    }
    SimilarityTable::new(class_names, target_names, w, room_affinity)
}

pub fn save_similarity(table: &SimilarityTable, path: impl AsRef<Path>) -> Result<(), SimilarityError> {
    std::fs::write(path, write_similarity(table))?;
    Ok(())
}

pub fn load_similarity(path: impl AsRef<Path>) -> Result<SimilarityTable, SimilarityError> {
    parse_similarity(&std::fs::read_to_string(path)?)
}

/// Normalised co-placement of two classes under the generator's
/// distribution: rooms are drawn uniformly over room types and objects are
/// drawn from each type's class distribution. The result is
/// `c_ab / sqrt(c_aa c_bb)` where `c_ab` is the probability that two objects
/// drawn from the same room are `a` and `b`.
pub fn cooccurrence(affinity: &AffinityTable, a: usize, b: usize) -> f64 {
    let r = affinity.room_types();
    let c = |x: usize, y: usize| -> f64 {
        (0..r)
            .map(|room| affinity.class_probability(room, x) * affinity.class_probability(room, y))
            .sum::<f64>()
            / r as f64
    };
    let norm = (c(a, a) * c(b, b)).sqrt();
    if norm > 0.0 {
        (c(a, b) / norm).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Builds the similarity table for `classes` as targets from a generator
/// affinity table. Self-similarity is pinned to exactly 1.
pub fn similarity_for_targets(affinity: &AffinityTable, target_classes: &[usize]) -> SimilarityTable {
    let w = (0..affinity.classes())
        .map(|i| {
            target_classes
                .iter()
                .map(|&t| if i == t { 1.0 } else { cooccurrence(affinity, i, t) })
                .collect()
        })
        .collect();
    let room_affinity = (0..affinity.room_types())
        .map(|r| target_classes.iter().map(|&t| affinity.get(r, t)).collect())
        .collect();
    SimilarityTable {
        class_names: affinity.class_names.clone(),
        target_names: target_classes.iter().map(|&t| affinity.class_names[t].clone()).collect(),
        w,
        room_affinity,
    }
}

/// The synthetic similarity table bound to the world generated from
/// `(seed, params)`.
pub fn synthetic_similarity(seed: u64, params: &WorldParams) -> Result<SimilarityTable, GenerationError> {
    let world = generate_world(seed, params)?;
    Ok(similarity_for_world(&world, &params.affinity))
}

pub fn similarity_for_world(world: &GridWorld, affinity: &AffinityTable) -> SimilarityTable {
    let classes: Vec<usize> = world.targets().iter().map(|&t| world.scene_objects()[t].class_id).collect();
    similarity_for_targets(affinity, &classes)
}
