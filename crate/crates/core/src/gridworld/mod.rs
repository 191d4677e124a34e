//! Deterministic gridworlds and the fluent detectors that connect them to
//! symbolic models.

mod household;
mod layout;
mod mario;
mod minecraft;
mod pixels;
mod validate;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::hash::Hash;

use thiserror::Error;

use crate::symbolic::{FluentSet, SymbolicModel};

pub use household::{Household, HouseholdState, KeyColor};
pub use layout::{Grid, Layout, LayoutError, Pos};
pub use mario::{Mario, MarioState, Zone};
pub use minecraft::{MineCraft, MineCraftState};
pub use pixels::{fingerprint, PixelMario, PixelObs, CELL_PX};
pub use validate::{
    reachable_states, validate_layout, LayoutReport, StateGraph, TrapCheck, ValidateError, MAX_STATES,
};

/// Largest primitive action set of any environment.
pub const MAX_ACTIONS: usize = 8;

/// Compact, injective encoding of an environment state, used as the
/// Q-table key. Fields are packed into the integer by [`KeyPacker`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StateKey(pub u128);

/// Packs small unsigned fields into a [`StateKey`], least significant first.
#[derive(Default)]
pub struct KeyPacker {
    bits: u128,
    used: u32,
}

impl KeyPacker {
    pub fn push(mut self, value: u64, width: u32) -> Self {
        debug_assert!(width == 64 || value < 1 << width);
        debug_assert!(self.used + width <= 128);
        self.bits |= (value as u128) << self.used;
        self.used += width;
        self
    }

    pub fn finish(self) -> StateKey {
        StateKey(self.bits)
    }
}

/// Index of a named fluent predicate implemented by an environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Probe(pub u8);

pub trait Environment {
    type State: Clone + Eq + Hash + Debug;

    fn name(&self) -> &'static str;
    fn actions(&self) -> &'static [&'static str];
    /// The fixed start state.
    fn reset(&self) -> Self::State;
    /// Successor of `s` under action `a`; goal states are absorbing.
    fn step(&self, s: &Self::State, a: usize) -> Self::State;
    fn is_goal(&self, s: &Self::State) -> bool;
    fn encode(&self, s: &Self::State) -> StateKey;
    /// Names of every fluent this environment can evaluate.
    fn probes(&self) -> &'static [&'static str];
    fn test(&self, s: &Self::State, p: Probe) -> bool;

    /// Pixel rendering, for environments that have one.
    fn pixels(&self, _s: &Self::State) -> Option<PixelObs> {
        None
    }

    /// Named trap properties checked over the reachable state graph.
    fn trap_checks(&self, _graph: &StateGraph<Self::State>) -> Vec<TrapCheck> {
        Vec::new()
    }

    /// Scripted goal-reaching action sequence bundled with the layout.
    fn reference(&self) -> &[usize] {
        &[]
    }

    fn probe(&self, name: &str) -> Option<Probe> {
        self.probes()
            .iter()
            .position(|p| *p == name)
            .map(|i| Probe(i as u8))
    }

    fn step_checked(&self, s: &Self::State, a: usize) -> (Self::State, bool) {
        let next = self.step(s, a);
        let done = self.is_goal(&next);
        (next, done)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DetectorError {
    #[error("environment `{env}` has no detector for fluent `{fluent}`")]
    UnknownFluent { env: &'static str, fluent: String },
}

/// Fluent mapping bound to one model: entry `i` evaluates `model.fluents[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detector {
    probes: Vec<Probe>,
}

impl Detector {
    pub fn bind<E: Environment>(env: &E, model: &SymbolicModel) -> Result<Self, DetectorError> {
        let probes = model
            .fluents
            .iter()
            .map(|f| {
                env.probe(f).ok_or_else(|| DetectorError::UnknownFluent {
                    env: env.name(),
                    fluent: f.clone(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { probes })
    }

    /// The set of model fluents true in `s`.
    pub fn eval<E: Environment>(&self, env: &E, s: &E::State) -> FluentSet {
        let mut out = FluentSet::EMPTY;
        for (i, p) in self.probes.iter().enumerate() {
            if env.test(s, *p) {
                out.insert(crate::symbolic::Fluent(i as u8));
            }
        }
        out
    }

    /// Whether every fluent in `required` holds and none in `forbidden` does.
    pub fn satisfies<E: Environment>(
        &self,
        env: &E,
        s: &E::State,
        required: FluentSet,
        forbidden: FluentSet,
    ) -> bool {
        required.iter().all(|f| env.test(s, self.probes[f.index()]))
            && !forbidden.iter().any(|f| env.test(s, self.probes[f.index()]))
    }
}

/// Moves 0..4 shared by every domain.
pub const MOVES: [&str; 4] = ["up", "down", "left", "right"];
