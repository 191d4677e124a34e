//! Plain-text layout files.
//!
//! ```text
//! ; comment lines start with a semicolon
//! battery_max = 2
//! reference = right right pickup
//! grid:
//! #####
//! #S.G#
//! #####
//! ```
//!
//! Parameters come first as `name = value` lines; `grid:` starts the map,
//! which runs to the end of the file. All rows must have the same width.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("layout has no `grid:` section")]
    MissingGrid,
    #[error("grid rows have different widths")]
    Ragged,
    #[error("unknown glyph `{glyph}` at row {row}, column {col}")]
    UnknownGlyph { glyph: char, row: usize, col: usize },
    #[error("expected exactly {expected} `{glyph}` cell(s), found {found}")]
    GlyphCount { glyph: char, expected: usize, found: usize },
    #[error("parameter `{0}` is missing")]
    MissingParam(String),
    #[error("parameter `{name}` has invalid value `{value}`")]
    BadParam { name: String, value: String },
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("unknown action `{0}` in reference script")]
    UnknownAction(String),
    #[error("{0}")]
    Geometry(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub row: u8,
    pub col: u8,
}

impl Pos {
    pub const fn new(row: u8, col: u8) -> Self {
        Self { row, col }
    }

    /// The cell one step in direction `dir` (0 up, 1 down, 2 left, 3 right).
    pub fn moved(self, dir: usize) -> Self {
        let (r, c) = (self.row, self.col);
        match dir {
            0 => Self::new(r.wrapping_sub(1), c),
            1 => Self::new(r + 1, c),
            2 => Self::new(r, c.wrapping_sub(1)),
            _ => Self::new(r, c + 1),
        }
    }

    pub fn is_adjacent(self, other: Self) -> bool {
        self.row.abs_diff(other.row) as u16 + self.col.abs_diff(other.col) as u16 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub params: Vec<(String, String)>,
    pub rows: Vec<Vec<char>>,
}

impl Layout {
    pub fn parse(text: &str) -> Result<Self, LayoutError> {
        let mut params = Vec::new();
        let mut lines = text.lines().enumerate();
        let mut found_grid = false;
        for (i, raw) in lines.by_ref() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            if line == "grid:" {
                found_grid = true;
                break;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(LayoutError::Syntax {
                    line: i + 1,
                    msg: "expected `name = value` or `grid:`".to_string(),
                });
            };
            params.push((k.trim().to_string(), v.trim().to_string()));
        }
        if !found_grid {
            return Err(LayoutError::MissingGrid);
        }
        let rows: Vec<Vec<char>> = lines
            .map(|(_, l)| l.trim_end())
            .filter(|l| !l.is_empty())
            .map(|l| l.chars().collect())
            .collect();
        if rows.is_empty() {
            return Err(LayoutError::MissingGrid);
        }
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(LayoutError::Ragged);
        }
        if rows.len() > 64 || rows[0].len() > 64 {
            return Err(LayoutError::Geometry("grids are limited to 64x64".into()));
        }
        Ok(Self { params, rows })
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn param(&self, name: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn number(&self, name: &str) -> Result<u8, LayoutError> {
        let v = self
            .param(name)
            .ok_or_else(|| LayoutError::MissingParam(name.to_string()))?;
        v.parse().map_err(|_| LayoutError::BadParam {
            name: name.to_string(),
            value: v.to_string(),
        })
    }

    /// Fails on any parameter not in `known`.
    pub fn check_params(&self, known: &[&str]) -> Result<(), LayoutError> {
        match self.params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            Some((k, _)) => Err(LayoutError::UnknownParam(k.clone())),
            None => Ok(()),
        }
    }

    /// Fails on glyphs outside `legend`.
    pub fn check_glyphs(&self, legend: &str) -> Result<(), LayoutError> {
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &g) in row.iter().enumerate() {
                if !legend.contains(g) {
                    return Err(LayoutError::UnknownGlyph { glyph: g, row: r, col: c });
                }
            }
        }
        Ok(())
    }

    pub fn find_all(&self, glyph: char) -> Vec<Pos> {
        let mut out = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &g) in row.iter().enumerate() {
                if g == glyph {
                    out.push(Pos::new(r as u8, c as u8));
                }
            }
        }
        out
    }

    pub fn find_one(&self, glyph: char) -> Result<Pos, LayoutError> {
        let all = self.find_all(glyph);
        if all.len() != 1 {
            return Err(LayoutError::GlyphCount {
                glyph,
                expected: 1,
                found: all.len(),
            });
        }
        Ok(all[0])
    }

    /// Reference action script, resolved against an action table.
    pub fn reference(&self, actions: &[&str]) -> Result<Vec<usize>, LayoutError> {
        let Some(script) = self.param("reference") else {
            return Ok(Vec::new());
        };
        script
            .split_whitespace()
            .map(|w| {
                actions
                    .iter()
                    .position(|a| *a == w)
                    .ok_or_else(|| LayoutError::UnknownAction(w.to_string()))
            })
            .collect()
    }
}

/// Wall map with bounds checking shared by the domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub height: usize,
    pub width: usize,
    walls: Vec<bool>,
}

impl Grid {
    pub fn from_layout(layout: &Layout, wall: char) -> Self {
        let walls = layout.rows.iter().flatten().map(|&g| g == wall).collect();
        Self {
            height: layout.height(),
            width: layout.width(),
            walls,
        }
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        (p.row as usize) < self.height && (p.col as usize) < self.width
    }

    pub fn is_wall(&self, p: Pos) -> bool {
        !self.in_bounds(p) || self.walls[p.row as usize * self.width + p.col as usize]
    }

    pub fn index(&self, p: Pos) -> usize {
        p.row as usize * self.width + p.col as usize
    }

    /// Cells reachable from `from` by moves, never entering cells for which
    /// `blocked` holds.
    pub fn flood(&self, from: Pos, blocked: impl Fn(Pos) -> bool) -> Vec<bool> {
        let mut seen = alloc::vec![false; self.height * self.width];
        let mut stack = alloc::vec![from];
        seen[self.index(from)] = true;
        while let Some(p) = stack.pop() {
            for d in 0..4 {
                let q = p.moved(d);
                if self.is_wall(q) || blocked(q) || seen[self.index(q)] {
                    continue;
                }
                seen[self.index(q)] = true;
                stack.push(q);
            }
        }
        seen
    }
}
