//! MineCraft: gather wood, process it once at workshop 1, then craft a plank
//! (workshop 2, two processed wood), a stick (workshop 3, one processed
//! wood) and finally the ladder at either crafting workshop.
//!
//! Wood tiles never run out, the robot carries at most `wood_capacity`
//! pieces, and workshop 1 converts everything carried in a single use.

use alloc::vec::Vec;

use super::layout::{Grid, Layout, LayoutError, Pos};
use super::validate::{StateGraph, TrapCheck};
use super::{Environment, KeyPacker, Probe, StateKey};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MineCraftState {
    pub pos: Pos,
    pub wood: u8,
    pub processed: u8,
    pub workshop_used: bool,
    pub plank: bool,
    pub stick: bool,
    pub ladder: bool,
}

#[derive(Clone, Debug)]
pub struct MineCraft {
    grid: Grid,
    start: Pos,
    wood: Vec<Pos>,
    processor: Pos,
    plank_bench: Pos,
    stick_bench: Pos,
    pub wood_capacity: u8,
    reference: Vec<usize>,
}

const ACTIONS: [&str; 7] = ["up", "down", "left", "right", "pickup", "process", "craft"];
const PICKUP: usize = 4;
const PROCESS: usize = 5;
const CRAFT: usize = 6;

pub const PLANK_COST: u8 = 2;
pub const STICK_COST: u8 = 1;

const PROBES: [&str; 6] = [
    "at-starting-location",
    "wood-processed",
    "enough-wood-processed",
    "plank_made",
    "stick_made",
    "ladder_made",
];

pub const LEGEND: &str = "#.Sw123";

impl MineCraft {
    pub fn from_layout(text: &str) -> Result<Self, LayoutError> {
        let layout = Layout::parse(text)?;
        layout.check_params(&["wood_capacity", "reference"])?;
        layout.check_glyphs(LEGEND)?;
        let wood = layout.find_all('w');
        if wood.is_empty() {
            return Err(LayoutError::GlyphCount {
                glyph: 'w',
                expected: 1,
                found: 0,
            });
        }
        Ok(Self {
            grid: Grid::from_layout(&layout, '#'),
            start: layout.find_one('S')?,
            wood,
            processor: layout.find_one('1')?,
            plank_bench: layout.find_one('2')?,
            stick_bench: layout.find_one('3')?,
            wood_capacity: layout.number("wood_capacity")?,
            reference: layout.reference(&ACTIONS)?,
        })
    }

    /// Processed wood the two tools need together.
    pub const fn wood_needed() -> u8 {
        PLANK_COST + STICK_COST
    }
}

impl Environment for MineCraft {
    type State = MineCraftState;

    fn name(&self) -> &'static str {
        "minecraft"
    }

    fn actions(&self) -> &'static [&'static str] {
        &ACTIONS
    }

    fn reset(&self) -> MineCraftState {
        MineCraftState {
            pos: self.start,
            wood: 0,
            processed: 0,
            workshop_used: false,
            plank: false,
            stick: false,
            ladder: false,
        }
    }

    fn step(&self, s: &MineCraftState, a: usize) -> MineCraftState {
        if self.is_goal(s) {
            return s.clone();
        }
        let mut n = s.clone();
        match a {
            0..=3 => {
                let to = s.pos.moved(a);
                if !self.grid.is_wall(to) {
                    n.pos = to;
                }
            }
            PICKUP => {
                if self.wood.contains(&s.pos) && s.wood < self.wood_capacity {
                    n.wood += 1;
                }
            }
            PROCESS => {
                if s.pos == self.processor && !s.workshop_used && s.wood > 0 {
                    n.processed += s.wood;
                    n.wood = 0;
                    n.workshop_used = true;
                }
            }
            CRAFT => {
                let at_bench = s.pos == self.plank_bench || s.pos == self.stick_bench;
                if at_bench && s.plank && s.stick {
                    n.ladder = true;
                } else if s.pos == self.plank_bench && !s.plank && s.processed >= PLANK_COST {
                    n.plank = true;
                    n.processed -= PLANK_COST;
                } else if s.pos == self.stick_bench && !s.stick && s.processed >= STICK_COST {
                    n.stick = true;
                    n.processed -= STICK_COST;
                }
            }
            _ => {}
        }
        n
    }

    fn is_goal(&self, s: &MineCraftState) -> bool {
        s.ladder
    }

    fn encode(&self, s: &MineCraftState) -> StateKey {
        KeyPacker::default()
            .push(s.pos.row as u64, 8)
            .push(s.pos.col as u64, 8)
            .push(s.wood as u64, 8)
            .push(s.processed as u64, 8)
            .push(s.workshop_used as u64, 1)
            .push(s.plank as u64, 1)
            .push(s.stick as u64, 1)
            .push(s.ladder as u64, 1)
            .finish()
    }

    fn probes(&self) -> &'static [&'static str] {
        &PROBES
    }

    fn test(&self, s: &MineCraftState, p: Probe) -> bool {
        match p.0 {
            0 => s.pos == self.start,
            1 => s.processed >= 1,
            2 => s.processed >= Self::wood_needed(),
            3 => s.plank,
            4 => s.stick,
            5 => s.ladder,
            _ => false,
        }
    }

    fn reference(&self) -> &[usize] {
        &self.reference
    }

    fn trap_checks(&self, g: &StateGraph<MineCraftState>) -> Vec<TrapCheck> {
        // wood converted at the workshop, whether or not already spent
        let converted = |s: &MineCraftState| {
            s.processed + PLANK_COST * s.plank as u8 + STICK_COST * s.stick as u8
        };
        let short: Vec<usize> = (0..g.len())
            .filter(|&i| {
                let s = &g.states[i];
                s.workshop_used && converted(s) < Self::wood_needed()
            })
            .collect();
        let one_wood = g
            .states
            .iter()
            .any(|s| s.workshop_used && converted(s) == 1);
        alloc::vec![TrapCheck::new(
            "one-wood-insufficient",
            one_wood && short.iter().all(|&i| !g.goal_reachable[i]),
        )]
    }
}
