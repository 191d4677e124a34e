//! Mario: open the door on the upper platform with two keys found below.
//!
//! The ladder breaks after a single traversal and the tube only leads down,
//! so the robot has to take the tube, collect the key on the floor and the
//! one hidden in the red rock, and climb back up the ladder.

use alloc::vec::Vec;

use super::layout::{Grid, Layout, LayoutError, Pos};
use super::pixels::{PixelObs, CELL_PX};
use super::validate::{StateGraph, TrapCheck};
use super::{Environment, KeyPacker, Probe, StateKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Zone {
    Upper,
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarioState {
    pub pos: Pos,
    pub keys: u8,
    pub key1_taken: bool,
    pub rock_broken: bool,
    pub key2_taken: bool,
    pub ladder_uses_left: u8,
    pub door_open: bool,
}

#[derive(Clone, Debug)]
pub struct Mario {
    grid: Grid,
    start: Pos,
    ladder_top: Pos,
    ladder_bottom: Pos,
    tube_top: Pos,
    tube_bottom: Pos,
    key1: Pos,
    rock: Pos,
    door: Pos,
    upper: Vec<bool>,
    pub ladder_uses: u8,
    reference: Vec<usize>,
}

const ACTIONS: [&str; 7] = ["up", "down", "left", "right", "pickup", "toggle", "break"];
const PICKUP: usize = 4;
const TOGGLE: usize = 5;
const BREAK: usize = 6;

const PROBES: [&str; 8] = [
    "at-upper-platform",
    "at-bottom",
    "has-key",
    "at-upper-platform-with-key",
    "door-open",
    "at-bottom-ladder-intact",
    "has-both-keys",
    "at-upper-platform-with-keys",
];

pub const LEGEND: &str = "#.SLlTtkRD";

impl Mario {
    pub fn from_layout(text: &str) -> Result<Self, LayoutError> {
        let layout = Layout::parse(text)?;
        layout.check_params(&["ladder_uses", "reference"])?;
        layout.check_glyphs(LEGEND)?;
        let grid = Grid::from_layout(&layout, '#');
        let start = layout.find_one('S')?;
        let door = layout.find_one('D')?;
        let rock = layout.find_one('R')?;
        let env = Self {
            start,
            ladder_top: layout.find_one('L')?,
            ladder_bottom: layout.find_one('l')?,
            tube_top: layout.find_one('T')?,
            tube_bottom: layout.find_one('t')?,
            key1: layout.find_one('k')?,
            rock,
            door,
            upper: grid.flood(start, |p| p == door || p == rock),
            ladder_uses: layout.number("ladder_uses")?,
            reference: layout.reference(&ACTIONS)?,
            grid,
        };
        let up = |p: Pos| env.upper[env.grid.index(p)];
        if !up(env.ladder_top) || !up(env.tube_top) {
            return Err(LayoutError::Geometry(
                "ladder top and tube entrance must be on the upper platform".into(),
            ));
        }
        if up(env.ladder_bottom) || up(env.tube_bottom) || up(env.key1) {
            return Err(LayoutError::Geometry(
                "ladder bottom, tube exit and key must be below the platform".into(),
            ));
        }
        Ok(env)
    }

    pub fn zone(&self, p: Pos) -> Zone {
        if self.upper[self.grid.index(p)] {
            Zone::Upper
        } else {
            Zone::Bottom
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Each cell becomes a `CELL_PX`-square block; the robot is drawn as a
    /// smaller square on top of its cell so the cell stays visible.
    pub fn render(&self, s: &MarioState) -> PixelObs {
        let (h, w) = (self.grid.height, self.grid.width);
        let mut obs = PixelObs::new(h * CELL_PX, w * CELL_PX);
        for r in 0..h {
            for c in 0..w {
                let p = Pos::new(r as u8, c as u8);
                obs.fill_cell(r, c, 0, CELL_PX, self.cell_color(s, p));
            }
        }
        obs.fill_cell(s.pos.row as usize, s.pos.col as usize, 1, CELL_PX - 1, [255, 255, 255]);
        obs
    }

    fn cell_color(&self, s: &MarioState, p: Pos) -> [u8; 3] {
        if p == self.door {
            return if s.door_open { [120, 170, 255] } else { [30, 60, 200] };
        }
        if p == self.ladder_top || p == self.ladder_bottom {
            return if s.ladder_uses_left > 0 { [160, 100, 40] } else { [70, 45, 20] };
        }
        if p == self.tube_top || p == self.tube_bottom {
            return [40, 170, 60];
        }
        if p == self.key1 && !s.key1_taken {
            return [240, 220, 0];
        }
        if p == self.rock {
            return match (s.rock_broken, s.key2_taken) {
                (false, _) => [200, 30, 30],
                (true, false) => [240, 220, 0],
                (true, true) => [0, 0, 0],
            };
        }
        if self.grid.is_wall(p) {
            return [110, 110, 110];
        }
        [0, 0, 0]
    }
}

impl Environment for Mario {
    type State = MarioState;

    fn name(&self) -> &'static str {
        "mario"
    }

    fn actions(&self) -> &'static [&'static str] {
        &ACTIONS
    }

    fn reset(&self) -> MarioState {
        MarioState {
            pos: self.start,
            keys: 0,
            key1_taken: false,
            rock_broken: false,
            key2_taken: false,
            ladder_uses_left: self.ladder_uses,
            door_open: false,
        }
    }

    fn step(&self, s: &MarioState, a: usize) -> MarioState {
        if self.is_goal(s) {
            return s.clone();
        }
        let mut n = s.clone();
        match a {
            0..=3 => {
                let to = s.pos.moved(a);
                let blocked = self.grid.is_wall(to)
                    || to == self.door
                    || (to == self.rock && !s.rock_broken);
                if !blocked {
                    n.pos = to;
                }
            }
            PICKUP => {
                if s.pos == self.key1 && !s.key1_taken {
                    n.key1_taken = true;
                    n.keys += 1;
                } else if s.pos == self.rock && s.rock_broken && !s.key2_taken {
                    n.key2_taken = true;
                    n.keys += 1;
                }
            }
            TOGGLE => {
                if s.ladder_uses_left > 0 && s.pos == self.ladder_top {
                    n.pos = self.ladder_bottom;
                    n.ladder_uses_left -= 1;
                } else if s.ladder_uses_left > 0 && s.pos == self.ladder_bottom {
                    n.pos = self.ladder_top;
                    n.ladder_uses_left -= 1;
                } else if s.pos == self.tube_top {
                    n.pos = self.tube_bottom;
                } else if s.pos.is_adjacent(self.door) && s.keys == 2 {
                    n.door_open = true;
                }
            }
            BREAK => {
                if s.pos.is_adjacent(self.rock) {
                    n.rock_broken = true;
                }
            }
            _ => {}
        }
        n
    }

    fn is_goal(&self, s: &MarioState) -> bool {
        s.door_open
    }

    fn encode(&self, s: &MarioState) -> StateKey {
        KeyPacker::default()
            .push(s.pos.row as u64, 8)
            .push(s.pos.col as u64, 8)
            .push(s.keys as u64, 2)
            .push(s.key1_taken as u64, 1)
            .push(s.rock_broken as u64, 1)
            .push(s.key2_taken as u64, 1)
            .push(s.ladder_uses_left as u64, 8)
            .push(s.door_open as u64, 1)
            .finish()
    }

    fn probes(&self) -> &'static [&'static str] {
        &PROBES
    }

    fn test(&self, s: &MarioState, p: Probe) -> bool {
        let upper = self.zone(s.pos) == Zone::Upper;
        match p.0 {
            0 => upper,
            1 => !upper,
            2 => s.keys >= 1,
            3 => upper && s.keys >= 1,
            4 => s.door_open,
            5 => !upper && s.ladder_uses_left == self.ladder_uses,
            6 => s.keys == 2,
            7 => upper && s.keys == 2,
            _ => false,
        }
    }

    fn pixels(&self, s: &MarioState) -> Option<PixelObs> {
        Some(self.render(s))
    }

    fn reference(&self) -> &[usize] {
        &self.reference
    }

    fn trap_checks(&self, g: &StateGraph<MarioState>) -> Vec<TrapCheck> {
        let used_below: Vec<usize> = (0..g.len())
            .filter(|&i| {
                let s = &g.states[i];
                self.zone(s.pos) == Zone::Bottom && s.ladder_uses_left < self.ladder_uses
            })
            .collect();
        let goals_have_both = g.states.iter().filter(|s| self.is_goal(s)).all(|s| s.keys == 2);
        let one_key_up = g
            .states
            .iter()
            .any(|s| self.zone(s.pos) == Zone::Upper && s.keys == 1);
        let mut one_way = true;
        for (i, s) in g.states.iter().enumerate() {
            for &j in &g.edges[i] {
                let t = &g.states[j];
                if self.zone(s.pos) == Zone::Bottom
                    && self.zone(t.pos) == Zone::Upper
                    && s.pos != self.ladder_bottom
                {
                    one_way = false;
                }
            }
        }
        alloc::vec![
            TrapCheck::new(
                "ladder-single-use",
                !used_below.is_empty() && used_below.iter().all(|&i| !g.goal_reachable[i]),
            ),
            TrapCheck::new("both-keys-required", goals_have_both && one_key_up),
            TrapCheck::new("tube-one-way", one_way),
        ]
    }
}
