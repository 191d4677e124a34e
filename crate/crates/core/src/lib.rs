//! Landmark-guided reinforcement learning with approximate STRIPS models.
//!
//! The crate is `no_std` (with `alloc`) and contains every algorithmic piece:
//! the PDDL-subset parser and grounder, plan search, fact-landmark extraction,
//! the deterministic gridworlds with their fluent detectors, diverse tabular
//! skills, the history-state meta-controller, the comparison methods, and the
//! online K-Means used for pixel observations. File IO, configuration, CSV
//! output and the command line live in the `asgrl` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assets;
pub mod baselines;
pub mod clustering;
pub mod domains;
pub mod gridworld;
pub mod landmarks;
pub mod meta;
pub mod rng;
pub mod skills;
pub mod symbolic;

pub(crate) type FxHashMap<K, V> = hashbrown::HashMap<K, V, rustc_hash::FxBuildHasher>;
pub(crate) type FxHashSet<K> = hashbrown::HashSet<K, rustc_hash::FxBuildHasher>;
