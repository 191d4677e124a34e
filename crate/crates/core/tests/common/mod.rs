#![allow(dead_code, unused_macros)]

use std::collections::BTreeSet;

use asgrl_core::landmarks::LandmarkGraph;
use asgrl_core::symbolic::SymbolicModel;

/// Runs `$body` with `$env` bound to the bundled environment of a domain.
macro_rules! with_env {
    ($id:expr, |$task:ident, $env:ident| $body:expr) => {{
        use asgrl_core::domains::{Task, World};
        use asgrl_core::gridworld::{Household, Mario, MineCraft, PixelMario};
        let $task = Task::bundled($id).unwrap();
        match $task.world {
            World::Household => {
                let $env = Household::from_layout(&$task.layout).unwrap();
                $body
            }
            World::MineCraft => {
                let $env = MineCraft::from_layout(&$task.layout).unwrap();
                $body
            }
            World::Mario => {
                let $env = Mario::from_layout(&$task.layout).unwrap();
                $body
            }
            World::PixelMario => {
                let $env = PixelMario::new(Mario::from_layout(&$task.layout).unwrap());
                $body
            }
        }
    }};
}
pub(crate) use with_env;

pub fn named(m: &SymbolicModel, lg: &LandmarkGraph) -> (BTreeSet<String>, BTreeSet<(String, String)>) {
    let facts = lg.facts.iter().map(|f| m.fluent_name(f).to_string()).collect();
    let ords = lg
        .orderings
        .iter()
        .map(|&(a, b)| (m.fluent_name(a).to_string(), m.fluent_name(b).to_string()))
        .collect();
    (facts, ords)
}

pub fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn pairs(items: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}
