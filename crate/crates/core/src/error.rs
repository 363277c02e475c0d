use thiserror::Error;

use crate::grid::Cell;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("grid has zero width or height")]
    EmptyGrid,
    #[error("room raster and occupancy raster differ in shape")]
    ShapeMismatch,
    #[error("room type count {0} out of range 1..=16")]
    RoomTypesOutOfRange(usize),
    #[error("room label {0} exceeds declared room type count")]
    RoomLabelOutOfRange(usize),
    #[error("K out of range: {0} targets (expected 1..=8)")]
    TargetCountOutOfRange(usize),
    #[error("resolution must be positive and finite, got {0}")]
    BadResolution(f64),
    #[error("scene object {index} has class {class_id} outside the class range")]
    ClassOutOfRange { index: usize, class_id: usize },
    #[error("scene object {index} sits on non-free cell {cell}")]
    ObjectNotOnFree { index: usize, cell: Cell },
    #[error("two scene objects share cell {0}")]
    StackedObjects(Cell),
    #[error("target index {0} does not name a scene object")]
    TargetIndexOutOfRange(usize),
    #[error("target object {0} listed twice")]
    DuplicateTarget(usize),
    #[error("targets are not mutually reachable")]
    Disconnected,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerationError {
    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("world generation failed after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: String },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    World(#[from] WorldError),
}

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("similarity out of range: {value} at {block}[{row}][{col}]")]
    OutOfRange { block: char, row: usize, col: usize, value: f64 },
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("dimension mismatch: {what} is {table} in the table but {world} in the world")]
    DimensionMismatch { what: &'static str, table: usize, world: usize },
    #[error("target {0:?} is not one of the declared classes")]
    UnknownTargetClass(String),
    #[error("self-similarity of target {target:?} is {value}, expected 1")]
    SelfSimilarity { target: String, value: f64 },
    #[error("target name {table:?} in slot {slot} does not match world target class {world:?}")]
    TargetMismatch { slot: usize, table: String, world: String },
    #[error("index out of range: {what} {index} (size {size})")]
    IndexOutOfRange { what: &'static str, index: usize, size: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("class {class_id} outside the {classes} semantic channels")]
    ClassOutOfRange { class_id: usize, classes: usize },
    #[error("map shapes differ: {0}")]
    ShapeMismatch(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoreError {
    #[error("expected {expected} per-target scores, got {got}")]
    ScoreCount { expected: usize, got: usize },
    #[error("stack channel counts differ: {0} vs {1}")]
    ChannelMismatch(usize, usize),
    #[error("stacks cover different targets")]
    TargetMismatch,
    #[error("target {0} is not a remaining target")]
    NotRemaining(usize),
    #[error("map shapes differ: {0}")]
    ShapeMismatch(&'static str),
    #[error("score {0} is not a finite value in [0, 1]")]
    BadScore(f64),
}

#[derive(Debug, Error)]
pub enum TourError {
    #[error("target {0} is unreachable from the start or another target")]
    Unreachable(usize),
    #[error("tour over {0} targets exceeds the limit of 8")]
    TooManyTargets(usize),
}

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("invalid policy config: {0}")]
    Config(String),
    #[error("spawn cell {0} cannot reach every target")]
    BadSpawn(Cell),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Tour(#[from] TourError),
}
