//! Plain-text portable greymap (`P2`) output for map inspection and golden
//! tests.

use std::fmt::Write as _;

use super::{Belief, OccupancyMap};
use crate::grid::Grid;

pub const PGM_MAXVAL: u16 = 255;

/// Scales `values` by `max_value` onto `0..=PGM_MAXVAL`. Values are clamped;
/// a non-positive `max_value` writes an all-black image.
pub fn write_pgm(values: &Grid<f64>, max_value: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "P2\n{} {}\n{}", values.width(), values.height(), PGM_MAXVAL);
    for row in values.as_slice().chunks(values.width().max(1)) {
        let px: Vec<String> = row
            .iter()
            .map(|&v| {
                let scaled = if max_value > 0.0 && v.is_finite() {
                    (v / max_value * PGM_MAXVAL as f64).round().clamp(0.0, PGM_MAXVAL as f64)
                } else {
                    0.0
                };
                (scaled as u16).to_string()
            })
            .collect();
        out.push_str(&px.join(" "));
        out.push('\n');
    }
    out
}

/// Obstacles black, unknown mid-grey, free white.
pub fn occupancy_pgm(map: &OccupancyMap) -> String {
    let g = map.grid().map(|b| match b {
        Belief::Obstacle => 0.0,
        Belief::Unknown => 128.0,
        Belief::Free => 255.0,
    });
    write_pgm(&g, 255.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

/// Reads a plain `P2` greymap. Comments (`#` to end of line) are allowed.
pub fn parse_pgm(text: &str) -> Option<Pgm> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    if tokens.next()? != "P2" {
        return None;
    }
    let width: usize = tokens.next()?.parse().ok()?;
    let height: usize = tokens.next()?.parse().ok()?;
    let maxval: u16 = tokens.next()?.parse().ok()?;
    let pixels: Vec<u16> = tokens.map(|t| t.parse().ok()).collect::<Option<_>>()?;
    (pixels.len() == width * height && pixels.iter().all(|&p| p <= maxval)).then_some(Pgm {
        width,
        height,
        maxval,
        pixels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;

    #[test]
    fn golden_small_image() {
        let g = Grid::from_vec(3, 2, vec![0.0, 0.5, 1.0, 2.0, -1.0, 0.25]).unwrap();
        let expected = "P2\n3 2\n255\n0 128 255\n255 0 64\n";
        assert_eq!(write_pgm(&g, 1.0), expected);
        let back = parse_pgm(expected).unwrap();
        assert_eq!(back.pixels, vec![0, 128, 255, 255, 0, 64]);
    }

    #[test]
    fn golden_occupancy() {
        let mut m = OccupancyMap::new(3, 1);
        m.mark(Cell::new(0, 0), Belief::Free);
        m.mark(Cell::new(2, 0), Belief::Obstacle);
        assert_eq!(occupancy_pgm(&m), "P2\n3 1\n255\n255 128 0\n");
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_pgm("P5\n1 1\n255\n0\n").is_none());
        assert!(parse_pgm("P2\n2 1\n255\n0\n").is_none());
    }
}
