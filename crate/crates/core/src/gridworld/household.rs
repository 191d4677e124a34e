//! Household: fetch the right key, recharge, unlock the door and reach the
//! destination in the next room.
//!
//! Battery is measured in units. Moving is free; unlocking the door and
//! rolling onto the destination cost one unit each and are no-ops with an
//! empty battery. Toggling while standing on the dock refills the battery.
//! Only the red key opens the door, the robot holds at most one key and
//! cannot drop it, and the door shuts behind the robot once it enters the
//! final room.

use alloc::vec::Vec;

use super::layout::{Grid, Layout, LayoutError, Pos};
use super::validate::{StateGraph, TrapCheck};
use super::{Environment, KeyPacker, Probe, StateKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeyColor {
    Yellow,
    Green,
    Red,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HouseholdState {
    pub pos: Pos,
    pub key: Option<KeyColor>,
    pub battery: u8,
    pub door_open: bool,
    pub visited_final_room: bool,
}

#[derive(Clone, Debug)]
pub struct Household {
    grid: Grid,
    start: Pos,
    keys: [(Pos, KeyColor); 3],
    dock: Option<Pos>,
    door: Pos,
    destination: Pos,
    final_room: Vec<bool>,
    start_room: Vec<bool>,
    pub battery_max: u8,
    pub start_battery: u8,
    reference: Vec<usize>,
}

const ACTIONS: [&str; 6] = ["up", "down", "left", "right", "pickup", "toggle"];
const PICKUP: usize = 4;
const TOGGLE: usize = 5;

const PROBES: [&str; 11] = [
    "has-key",
    "holding yellow",
    "holding green",
    "holding red",
    "holding-red-key",
    "charged",
    "door-open",
    "door-ajar",
    "at-final-room",
    "at-destination",
    "at-starting-room",
];

pub const LEGEND: &str = "#.SygrCDG";

impl Household {
    pub fn from_layout(text: &str) -> Result<Self, LayoutError> {
        let layout = Layout::parse(text)?;
        layout.check_params(&["battery_max", "start_battery", "reference"])?;
        layout.check_glyphs(LEGEND)?;
        let grid = Grid::from_layout(&layout, '#');
        let start = layout.find_one('S')?;
        let door = layout.find_one('D')?;
        let destination = layout.find_one('G')?;
        let keys = [
            (layout.find_one('y')?, KeyColor::Yellow),
            (layout.find_one('g')?, KeyColor::Green),
            (layout.find_one('r')?, KeyColor::Red),
        ];
        let docks = layout.find_all('C');
        if docks.len() > 1 {
            return Err(LayoutError::GlyphCount {
                glyph: 'C',
                expected: 1,
                found: docks.len(),
            });
        }
        let battery_max = layout.number("battery_max")?;
        let start_battery = layout.number("start_battery")?;
        if start_battery > battery_max {
            return Err(LayoutError::BadParam {
                name: "start_battery".into(),
                value: alloc::format!("{start_battery}"),
            });
        }
        let start_room = grid.flood(start, |p| p == door);
        if start_room[grid.index(destination)] {
            return Err(LayoutError::Geometry(
                "destination must lie behind the door".into(),
            ));
        }
        let final_room: Vec<bool> = (0..grid.height * grid.width)
            .map(|i| {
                let p = Pos::new((i / grid.width) as u8, (i % grid.width) as u8);
                !grid.is_wall(p) && p != door && !start_room[i]
            })
            .collect();
        let reference = layout.reference(&ACTIONS)?;
        Ok(Self {
            grid,
            start,
            keys,
            dock: docks.first().copied(),
            door,
            destination,
            final_room,
            start_room,
            battery_max,
            start_battery,
            reference,
        })
    }

    pub fn in_final_room(&self, p: Pos) -> bool {
        self.final_room[self.grid.index(p)]
    }

    pub fn in_start_room(&self, p: Pos) -> bool {
        self.start_room[self.grid.index(p)]
    }

    pub fn door(&self) -> Pos {
        self.door
    }

    pub fn dock(&self) -> Option<Pos> {
        self.dock
    }
}

impl Environment for Household {
    type State = HouseholdState;

    fn name(&self) -> &'static str {
        "household"
    }

    fn actions(&self) -> &'static [&'static str] {
        &ACTIONS
    }

    fn reset(&self) -> HouseholdState {
        HouseholdState {
            pos: self.start,
            key: None,
            battery: self.start_battery,
            door_open: false,
            visited_final_room: false,
        }
    }

    fn step(&self, s: &HouseholdState, a: usize) -> HouseholdState {
        if self.is_goal(s) {
            return s.clone();
        }
        let mut n = s.clone();
        match a {
            0..=3 => {
                let to = s.pos.moved(a);
                let blocked = self.grid.is_wall(to)
                    || (to == self.door && !s.door_open)
                    || (to == self.destination && s.battery == 0);
                if !blocked {
                    n.pos = to;
                    if to == self.destination {
                        n.battery -= 1;
                    }
                    if s.pos == self.door && self.in_final_room(to) {
                        n.door_open = false;
                        n.visited_final_room = true;
                    }
                }
            }
            PICKUP => {
                if s.key.is_none() {
                    n.key = self.keys.iter().find(|(p, _)| *p == s.pos).map(|(_, k)| *k);
                }
            }
            TOGGLE => {
                if Some(s.pos) == self.dock {
                    n.battery = self.battery_max;
                } else if !s.door_open
                    && s.pos.is_adjacent(self.door)
                    && s.key == Some(KeyColor::Red)
                    && s.battery > 0
                {
                    n.door_open = true;
                    n.battery -= 1;
                }
            }
            _ => {}
        }
        n
    }

    fn is_goal(&self, s: &HouseholdState) -> bool {
        s.pos == self.destination
    }

    fn encode(&self, s: &HouseholdState) -> StateKey {
        let key = match s.key {
            None => 0,
            Some(KeyColor::Yellow) => 1,
            Some(KeyColor::Green) => 2,
            Some(KeyColor::Red) => 3,
        };
        KeyPacker::default()
            .push(s.pos.row as u64, 8)
            .push(s.pos.col as u64, 8)
            .push(key, 2)
            .push(s.battery as u64, 8)
            .push(s.door_open as u64, 1)
            .push(s.visited_final_room as u64, 1)
            .finish()
    }

    fn probes(&self) -> &'static [&'static str] {
        &PROBES
    }

    fn test(&self, s: &HouseholdState, p: Probe) -> bool {
        match p.0 {
            0 => s.key.is_some(),
            1 => s.key == Some(KeyColor::Yellow),
            2 => s.key == Some(KeyColor::Green),
            3 | 4 => s.key == Some(KeyColor::Red),
            5 => s.battery == self.battery_max,
            6 => s.door_open,
            7 => s.door_open && s.pos == self.door,
            8 => self.in_final_room(s.pos),
            9 => s.pos == self.destination,
            10 => self.in_start_room(s.pos),
            _ => false,
        }
    }

    fn reference(&self) -> &[usize] {
        &self.reference
    }

    fn trap_checks(&self, g: &StateGraph<HouseholdState>) -> Vec<TrapCheck> {
        let stranded: Vec<usize> = (0..g.len())
            .filter(|&i| {
                let s = &g.states[i];
                self.in_final_room(s.pos) && s.battery == 0 && !s.door_open && !self.is_goal(s)
            })
            .collect();
        let wrong_key_open = g
            .states
            .iter()
            .any(|s| s.door_open && s.key != Some(KeyColor::Red));
        let mut closes = true;
        for (i, s) in g.states.iter().enumerate() {
            for &j in &g.edges[i] {
                let t = &g.states[j];
                if s.pos == self.door && self.in_final_room(t.pos) && t.door_open {
                    closes = false;
                }
            }
        }
        alloc::vec![
            TrapCheck::new(
                "entering-without-recharge-strands",
                !stranded.is_empty() && stranded.iter().all(|&i| !g.goal_reachable[i]),
            ),
            TrapCheck::new("wrong-keys-never-open-door", !wrong_key_open),
            TrapCheck::new("door-closes-after-entry", closes),
            TrapCheck::new(
                "goal-requires-recharge",
                g.goal_reachable[0] && !g.goal_reachable_avoiding(|s| Some(s.pos) == self.dock),
            ),
        ]
    }
}
