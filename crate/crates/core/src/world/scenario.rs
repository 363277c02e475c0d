//! Line-oriented scenario files.
//!
//! ```text
//! finder-scenario v1
//! size <width> <height>
//! rooms <R>
//! classes <L>
//! targets <K>
//! resolution <meters-per-cell>
//! occupancy
//! <height lines of width chars: '.' free, '#' obstacle>
//! labels
//! <height lines of width hex digits: room type per cell>
//! obj <class_id> <x> <y>        (one line per scene object, index order)
//! tgt <object_index>            (exactly K lines, target order)
//! end
//! ```
//!
//! Blank lines and lines starting with `;` are ignored outside the rasters.

use std::fmt::Write as _;
use std::path::Path;

use super::{GridWorld, SceneObject, Terrain};
use crate::error::ScenarioError;
use crate::grid::{Cell, Grid};

pub const SCENARIO_MAGIC: &str = "finder-scenario v1";

pub fn write_scenario(world: &GridWorld) -> String {
    let mut out = String::new();
    let (w, h) = (world.width(), world.height());
    let _ = writeln!(out, "{SCENARIO_MAGIC}");
    let _ = writeln!(out, "size {w} {h}");
    let _ = writeln!(out, "rooms {}", world.room_types());
    let _ = writeln!(out, "classes {}", world.num_classes());
    let _ = writeln!(out, "targets {}", world.num_targets());
    let _ = writeln!(out, "resolution {}", world.resolution());
    out.push_str("occupancy\n");
    for y in 0..h {
        for x in 0..w {
            out.push(match world.occupancy()[Cell::new(x as i32, y as i32)] {
                Terrain::Free => '.',
                Terrain::Obstacle => '#',
            });
        }
        out.push('\n');
    }
    out.push_str("labels\n");
    for y in 0..h {
        for x in 0..w {
            let l = world.room_labels()[Cell::new(x as i32, y as i32)];
            out.push(char::from_digit(l as u32, 16).unwrap_or('0'));
        }
        out.push('\n');
    }
    for o in world.scene_objects() {
        let _ = writeln!(out, "obj {} {} {}", o.class_id, o.cell.x, o.cell.y);
    }
    for t in world.targets() {
        let _ = writeln!(out, "tgt {t}");
    }
    out.push_str("end\n");
    out
}

pub fn save_scenario(world: &GridWorld, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    std::fs::write(path, write_scenario(world))?;
    Ok(())
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<GridWorld, ScenarioError> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, msg: impl Into<String>) -> ScenarioError {
        ScenarioError::Parse { line: self.line, msg: msg.into() }
    }

    fn raw(&mut self) -> Result<&'a str, ScenarioError> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim_end_matches('\r'))
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    /// Next line that is not blank or a comment.
    fn content(&mut self) -> Result<&'a str, ScenarioError> {
        loop {
            let l = self.raw()?.trim();
            if !l.is_empty() && !l.starts_with(';') {
                return Ok(l);
            }
        }
    }

    fn keyed<const N: usize>(&mut self, key: &str) -> Result<[&'a str; N], ScenarioError> {
        let l = self.content()?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`, found `{l}`")));
        }
        let vals: Vec<&str> = parts.collect();
        vals.try_into()
            .map_err(|_| self.err(format!("`{key}` takes {N} value(s)")))
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T, ScenarioError> {
        s.parse().map_err(|_| self.err(format!("bad number `{s}`")))
    }
}

pub fn parse_scenario(text: &str) -> Result<GridWorld, ScenarioError> {
    let mut lines = Lines { inner: text.lines().enumerate(), line: 0 };
    let magic = lines.content()?;
    if magic != SCENARIO_MAGIC {
        return Err(lines.err(format!("expected `{SCENARIO_MAGIC}`")));
    }
    let [w, h] = lines.keyed("size")?;
    let (w, h): (usize, usize) = (lines.num(w)?, lines.num(h)?);
    let [r] = lines.keyed("rooms")?;
    let rooms: usize = lines.num(r)?;
    let [l] = lines.keyed("classes")?;
    let classes: usize = lines.num(l)?;
    let [k] = lines.keyed("targets")?;
    let k: usize = lines.num(k)?;
    let [res] = lines.keyed("resolution")?;
    let resolution: f64 = lines.num(res)?;
    if w == 0 || h == 0 {
        return Err(lines.err("grid must be non-empty"));
    }

    lines.keyed::<0>("occupancy")?;
    let mut occ = Vec::with_capacity(w * h);
    for _ in 0..h {
        let row = lines.raw()?;
        if row.chars().count() != w {
            return Err(lines.err(format!("occupancy row must have {w} cells")));
        }
        for ch in row.chars() {
            occ.push(match ch {
                '.' => Terrain::Free,
                '#' => Terrain::Obstacle,
                other => return Err(lines.err(format!("bad occupancy char `{other}`"))),
            });
        }
    }
    lines.keyed::<0>("labels")?;
    let mut labels = Vec::with_capacity(w * h);
    for _ in 0..h {
        let row = lines.raw()?;
        if row.chars().count() != w {
            return Err(lines.err(format!("label row must have {w} cells")));
        }
        for ch in row.chars() {
            let d = ch
                .to_digit(16)
                .ok_or_else(|| lines.err(format!("bad room label `{ch}`")))?;
            labels.push(d as u8);
        }
    }

    let mut objects = Vec::new();
    let mut targets = Vec::new();
    loop {
        let l = lines.content()?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        match parts.as_slice() {
            ["obj", c, x, y] => {
                if !targets.is_empty() {
                    return Err(lines.err("`obj` after `tgt`"));
                }
                objects.push(SceneObject {
                    class_id: lines.num(c)?,
                    cell: Cell::new(lines.num(x)?, lines.num(y)?),
                });
            }
            ["tgt", i] => targets.push(lines.num(i)?),
            ["end"] => break,
            _ => return Err(lines.err(format!("unexpected line `{l}`"))),
        }
    }
    if targets.len() != k {
        return Err(lines.err(format!("header declares {k} targets, found {}", targets.len())));
    }

    let occupancy = Grid::from_vec(w, h, occ).ok_or_else(|| lines.err("occupancy size"))?;
    let room_label = Grid::from_vec(w, h, labels).ok_or_else(|| lines.err("label size"))?;
    Ok(GridWorld::new(occupancy, room_label, rooms, classes, objects, targets, resolution)?)
}
