//! Per-target score maps and their fusion into one unified map.
//!
//! The scene-to-object (StO) stack paints each view's scene score onto the
//! cells in view, weighted by the cone confidence, and blends it with what
//! was there before using the accumulated confidence as weights. The
//! object-to-object (OtO) stack is rebuilt from the semantic map on every
//! call: each detected class contributes its similarity to each target at
//! the cells where it was seen. Fusion min-max normalises every channel of
//! both stacks independently and sums them.

use serde::{Deserialize, Serialize};

use crate::error::ScoreError;
use crate::grid::Grid;
use crate::mapping::{fuse_confidence_value, ConfidenceMap, SemanticMap};
use crate::semantics::SimilarityTable;

pub type UnifiedMap = Grid<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StackKind {
    SceneToObject,
    ObjectToObject,
}

/// `K` channels of `H × W` non-negative scores, one per remaining target.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreStack {
    kind: StackKind,
    targets: Vec<usize>,
    channels: Vec<Grid<f64>>,
    /// Accumulated confidence; only the StO stack carries one.
    confidence: Option<ConfidenceMap>,
}

impl ScoreStack {
    /// Empty StO stack for the given target ids.
    pub fn scene_to_object(targets: Vec<usize>, width: usize, height: usize) -> Self {
        Self {
            kind: StackKind::SceneToObject,
            channels: vec![Grid::filled(width, height, 0.0); targets.len()],
            targets,
            confidence: Some(Grid::filled(width, height, 0.0)),
        }
    }

    /// Builds a stack from explicit channels. Values must be finite and ≥ 0.
    pub fn from_channels(kind: StackKind, targets: Vec<usize>, channels: Vec<Grid<f64>>) -> Result<Self, ScoreError> {
        if targets.len() != channels.len() {
            return Err(ScoreError::ChannelMismatch(targets.len(), channels.len()));
        }
        if let Some(first) = channels.first() {
            if channels.iter().any(|c| !c.same_shape(first)) {
                return Err(ScoreError::ShapeMismatch("channels"));
            }
        }
        if let Some(&bad) = channels
            .iter()
            .flat_map(|c| c.as_slice())
            .find(|v| !(v.is_finite() && **v >= 0.0))
        {
            return Err(ScoreError::BadScore(bad));
        }
        let confidence = match kind {
            StackKind::SceneToObject => channels.first().map(|c| Grid::filled(c.width(), c.height(), 0.0)),
            StackKind::ObjectToObject => None,
        };
        Ok(Self { kind, targets, channels, confidence })
    }

    pub fn kind(&self) -> StackKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Target ids, one per channel.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn channels(&self) -> &[Grid<f64>] {
        &self.channels
    }

    pub fn channel_for(&self, target: usize) -> Option<&Grid<f64>> {
        self.targets.iter().position(|&t| t == target).map(|i| &self.channels[i])
    }

    pub fn confidence(&self) -> Option<&ConfidenceMap> {
        self.confidence.as_ref()
    }

    /// Scales every channel by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for ch in &mut out.channels {
            for v in ch.as_mut_slice() {
                *v *= factor;
            }
        }
        out
    }
}

/// One StO step. `scores[k]` is the current scene score for channel `k`.
///
/// Per channel: the view estimate is `cone · s`, blended with the previous
/// value as `(C_new·est + C_prev·prev) / (C_new + C_prev)` (0 where both
/// confidences are 0). The accumulated confidence then advances by the
/// confidence fusion rule.
pub fn sto_update(stack: &mut ScoreStack, cone: &ConfidenceMap, scores: &[f64]) -> Result<(), ScoreError> {
    if scores.len() != stack.len() {
        return Err(ScoreError::ScoreCount { expected: stack.len(), got: scores.len() });
    }
    if let Some(&bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(ScoreError::BadScore(bad));
    }
    let prev_conf = stack
        .confidence
        .as_mut()
        .ok_or(ScoreError::ShapeMismatch("StO update on a stack without confidence"))?;
    if !prev_conf.same_shape(cone) {
        return Err(ScoreError::ShapeMismatch("cone vs stack"));
    }
    for (channel, &s) in stack.channels.iter_mut().zip(scores) {
        for ((v, &c_new), &c_prev) in channel
            .as_mut_slice()
            .iter_mut()
            .zip(cone.as_slice())
            .zip(prev_conf.as_slice())
        {
            let denom = c_new + c_prev;
            if denom > 0.0 {
                let estimate = c_new * s;
                *v = (c_new * estimate + c_prev * *v) / denom;
            }
        }
    }
    for (c_prev, &c_new) in prev_conf.as_mut_slice().iter_mut().zip(cone.as_slice()) {
        *c_prev = fuse_confidence_value(c_new, *c_prev);
    }
    Ok(())
}

/// Rebuilds the OtO stack for `targets` from scratch: channel `j` holds
/// `Σ_i bit_i · w_ij`.
pub fn oto_compute(sem: &SemanticMap, table: &SimilarityTable, targets: &[usize]) -> Result<ScoreStack, ScoreError> {
    if sem.classes() != table.classes() {
        return Err(ScoreError::ShapeMismatch("semantic classes vs similarity table"));
    }
    if let Some(&bad) = targets.iter().find(|&&t| t >= table.targets()) {
        return Err(ScoreError::NotRemaining(bad));
    }
    let (w, h) = (sem.width(), sem.height());
    let mut channels = vec![Grid::filled(w, h, 0.0); targets.len()];
    for class in 0..sem.classes() {
        for &cell in sem.marked(class) {
            for (ch, &t) in channels.iter_mut().zip(targets) {
                let sim = crate::semantics::object_similarity(class, t, table).unwrap_or(0.0);
                ch[cell] += sim;
            }
        }
    }
    Ok(ScoreStack {
        kind: StackKind::ObjectToObject,
        targets: targets.to_vec(),
        channels,
        confidence: None,
    })
}

/// Min-max normalisation to `[0, 1]`. A constant channel maps to zeros.
pub fn normalize_channel(channel: &Grid<f64>) -> Grid<f64> {
    let (lo, hi) = channel
        .as_slice()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return Grid::filled(channel.width(), channel.height(), 0.0);
    }
    channel.map(|&v| ((v - lo) / span).clamp(0.0, 1.0))
}

fn accumulate(into: &mut Grid<f64>, stack: &ScoreStack) {
    for ch in &stack.channels {
        let n = normalize_channel(ch);
        for (u, v) in into.as_mut_slice().iter_mut().zip(n.as_slice()) {
            *u += v;
        }
    }
}

/// Sum of the normalised channels of both stacks.
pub fn fuse(sto: &ScoreStack, oto: &ScoreStack) -> Result<UnifiedMap, ScoreError> {
    if sto.len() != oto.len() {
        return Err(ScoreError::ChannelMismatch(sto.len(), oto.len()));
    }
    let mut a = sto.targets.clone();
    let mut b = oto.targets.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(ScoreError::TargetMismatch);
    }
    if let (Some(x), Some(y)) = (sto.channels.first(), oto.channels.first()) {
        if !x.same_shape(y) {
            return Err(ScoreError::ShapeMismatch("StO vs OtO"));
        }
    }
    let Some(shape) = sto.channels.first() else {
        return Ok(Grid::filled(0, 0, 0.0));
    };
    let mut u = Grid::filled(shape.width(), shape.height(), 0.0);
    accumulate(&mut u, sto);
    accumulate(&mut u, oto);
    Ok(u)
}

/// Unified map from a single stack, for the ablated planners.
pub fn fuse_single(stack: &ScoreStack, width: usize, height: usize) -> UnifiedMap {
    let mut u = Grid::filled(width, height, 0.0);
    accumulate(&mut u, stack);
    u
}

/// Removes the channel of a found target.
pub fn drop_target_channel(stack: &mut ScoreStack, target: usize) -> Result<(), ScoreError> {
    let idx = stack
        .targets
        .iter()
        .position(|&t| t == target)
        .ok_or(ScoreError::NotRemaining(target))?;
    stack.targets.remove(idx);
    stack.channels.remove(idx);
    Ok(())
}
