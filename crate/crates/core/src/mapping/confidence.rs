use std::f64::consts::FRAC_PI_2;

use crate::error::MapError;
use crate::grid::Grid;
use crate::world::{Observation, SensorConfig};

/// Per-cell observation confidence in `[0, 1]`.
pub type ConfidenceMap = Grid<f64>;

/// Confidence of a ray at `angle` radians off the optical axis:
/// `cos²(angle / (fov/2) · π/2)`, zero outside the cone.
pub fn cone_value(angle: f64, sensor: &SensorConfig) -> f64 {
    let half = sensor.half_fov_rad();
    if angle.abs() >= half {
        return 0.0;
    }
    let c = (angle / half * FRAC_PI_2).cos();
    c * c
}

/// Cone-shaped confidence of a single view. Obstacle faces and cells that
/// are not visible get 0.
pub fn cone_mask(obs: &Observation, sensor: &SensorConfig, width: usize, height: usize) -> ConfidenceMap {
    let mut mask = Grid::filled(width, height, 0.0);
    for v in obs.visible_cells.iter().filter(|v| !v.occluding) {
        mask.set(v.cell, cone_value(v.angle, sensor));
    }
    mask
}

/// `(a² + b²) / (a + b)`, or 0 when both are 0.
pub fn fuse_confidence_value(current: f64, previous: f64) -> f64 {
    let sum = current + previous;
    if sum > 0.0 {
        (current * current + previous * previous) / sum
    } else {
        0.0
    }
}

pub fn fuse_confidence(current: &ConfidenceMap, previous: &ConfidenceMap) -> Result<ConfidenceMap, MapError> {
    if !current.same_shape(previous) {
        return Err(MapError::ShapeMismatch("confidence maps"));
    }
    let data = current
        .as_slice()
        .iter()
        .zip(previous.as_slice())
        .map(|(&a, &b)| fuse_confidence_value(a, b))
        .collect();
    Ok(Grid::from_vec(current.width(), current.height(), data).expect("shape checked"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;
    use crate::world::VisibleCell;

    fn rel_eq(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-300) || a == b
    }

    #[test]
    fn cone_law_fixtures() {
        let s = SensorConfig { range: 10.0, fov_deg: 79.0 };
        let half = s.half_fov_rad();
        assert_eq!(cone_value(0.0, &s), 1.0);
        assert_eq!(cone_value(half, &s), 0.0);
        assert!(rel_eq(cone_value(half / 2.0, &s), 0.5));
        assert!(rel_eq(cone_value(-half / 2.0, &s), 0.5));
    }

    #[test]
    fn mask_zeroes_obstacles_and_unseen() {
        let obs = Observation {
            visible_cells: vec![
                VisibleCell { cell: Cell::new(0, 0), angle: 0.0, occluding: false },
                VisibleCell { cell: Cell::new(1, 0), angle: 0.0, occluding: true },
            ],
            ..Observation::empty(1)
        };
        let m = cone_mask(&obs, &SensorConfig::default(), 3, 1);
        assert_eq!(m.as_slice(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn fuse_fixtures() {
        assert_eq!(fuse_confidence_value(1.0, 0.0), 1.0);
        assert_eq!(fuse_confidence_value(0.0, 0.0), 0.0);
        for c in [0.1, 0.37, 0.5, 1.0] {
            assert!(rel_eq(fuse_confidence_value(c, c), c));
        }
        assert!(rel_eq(fuse_confidence_value(0.5, 1.0), 1.25 / 1.5));
    }

    #[test]
    fn fuse_shape_mismatch() {
        let a = Grid::filled(2, 2, 0.0);
        let b = Grid::filled(3, 2, 0.0);
        assert!(fuse_confidence(&a, &b).is_err());
    }
}
