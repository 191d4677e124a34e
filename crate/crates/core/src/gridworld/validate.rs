//! Exhaustive checks of a layout against its paired symbolic model.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Detector, DetectorError, Environment};
use crate::symbolic::{
    enumerate_plans, find_plan, is_instantiation, SymbolicModel, MAX_ENUMERATION_DEPTH,
};
use crate::FxHashMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrapCheck {
    pub name: &'static str,
    pub ok: bool,
}

impl TrapCheck {
    pub fn new(name: &'static str, ok: bool) -> Self {
        Self { name, ok }
    }
}

/// Every state reachable from the start, with successor lists.
/// Index 0 is the start state.
#[derive(Clone, Debug)]
pub struct StateGraph<S> {
    pub states: Vec<S>,
    pub edges: Vec<Vec<usize>>,
    pub goal: Vec<bool>,
    /// Whether some goal state is reachable from each state.
    pub goal_reachable: Vec<bool>,
    /// Fewest steps from the start to a goal state.
    pub shortest_goal_steps: Option<usize>,
}

impl<S> StateGraph<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Whether a goal state is reachable from the start without passing
    /// through any state for which `avoid` holds.
    pub fn goal_reachable_avoiding(&self, avoid: impl Fn(&S) -> bool) -> bool {
        if avoid(&self.states[0]) {
            return false;
        }
        let mut seen = alloc::vec![false; self.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            if self.goal[i] {
                return true;
            }
            for &j in &self.edges[i] {
                if !seen[j] && !avoid(&self.states[j]) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        false
    }
}

/// Exploration limit for [`reachable_states`].
pub const MAX_STATES: usize = 2_000_000;

/// Breadth-first exploration of the whole reachable state space; `None`
/// when it exceeds [`MAX_STATES`].
pub fn reachable_states<E: Environment>(env: &E) -> Option<StateGraph<E::State>> {
    let start = env.reset();
    let mut index: FxHashMap<E::State, usize> = FxHashMap::default();
    let mut states = alloc::vec![start.clone()];
    index.insert(start, 0);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        let mut out = Vec::new();
        for a in 0..env.actions().len() {
            let t = env.step(&s, a);
            let j = match index.get(&t) {
                Some(&j) => j,
                None => {
                    if states.len() >= MAX_STATES {
                        return None;
                    }
                    let j = states.len();
                    index.insert(t.clone(), j);
                    states.push(t);
                    j
                }
            };
            if !out.contains(&j) {
                out.push(j);
            }
        }
        edges.push(out);
        i += 1;
    }
    let goal: Vec<bool> = states.iter().map(|s| env.is_goal(s)).collect();
    let mut preds: Vec<Vec<usize>> = alloc::vec![Vec::new(); states.len()];
    for (i, out) in edges.iter().enumerate() {
        for &j in out {
            preds[j].push(i);
        }
    }
    let mut goal_reachable = goal.clone();
    let mut queue: VecDeque<usize> = (0..states.len()).filter(|&i| goal[i]).collect();
    while let Some(j) = queue.pop_front() {
        for &i in &preds[j] {
            if !goal_reachable[i] {
                goal_reachable[i] = true;
                queue.push_back(i);
            }
        }
    }
    let mut dist = alloc::vec![usize::MAX; states.len()];
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    let mut shortest_goal_steps = None;
    while let Some(i) = queue.pop_front() {
        if goal[i] {
            shortest_goal_steps = Some(dist[i]);
            break;
        }
        for &j in &edges[i] {
            if dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    Some(StateGraph {
        states,
        edges,
        goal,
        goal_reachable,
        shortest_goal_steps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayoutReport {
    /// Goal fluents hold only on goal states.
    pub mvtr_condition1_ok: bool,
    /// The reference trace reaches the goal and instantiates a plan.
    pub mvtr_condition2_ok: bool,
    /// Goal fluents hold exactly on goal states.
    pub goal_alignment_ok: bool,
    pub trap_properties_ok: Vec<TrapCheck>,
    pub shortest_goal_steps: Option<usize>,
    pub reachable_states: usize,
    /// Keys are distinct across reachable states.
    pub encoding_injective: bool,
    /// Plan (action names) instantiated by the reference trace.
    pub witness_plan: Option<Vec<String>>,
}

impl LayoutReport {
    pub fn all_ok(&self) -> bool {
        self.mvtr_condition1_ok
            && self.mvtr_condition2_ok
            && self.goal_alignment_ok
            && self.encoding_injective
            && self.trap_properties_ok.iter().all(|t| t.ok)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags = [
            ("goal-fluents-only-on-goals", self.mvtr_condition1_ok),
            ("reference-instantiates-plan", self.mvtr_condition2_ok),
            ("goal-alignment", self.goal_alignment_ok),
            ("encoding-injective", self.encoding_injective),
        ];
        out.extend(flags.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n));
        out.extend(self.trap_properties_ok.iter().filter(|t| !t.ok).map(|t| t.name));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ValidateError {
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error("reachable state space exceeds {MAX_STATES} states")]
    TooLarge,
}

pub fn validate_layout<E: Environment>(
    env: &E,
    model: &SymbolicModel,
) -> Result<LayoutReport, ValidateError> {
    let detector = Detector::bind(env, model)?;
    let graph = reachable_states(env).ok_or(ValidateError::TooLarge)?;

    let mut cond1 = true;
    let mut aligned = true;
    let mut keys = crate::FxHashSet::default();
    for s in &graph.states {
        let goal_fluents = model.goal.is_subset(detector.eval(env, s));
        let goal = env.is_goal(s);
        cond1 &= !goal_fluents || goal;
        aligned &= goal_fluents == goal;
        keys.insert(env.encode(s));
    }

    let mut rows = alloc::vec![detector.eval(env, &env.reset())];
    let mut s = env.reset();
    for &a in env.reference() {
        s = env.step(&s, a);
        rows.push(detector.eval(env, &s));
    }
    let mut witness = None;
    if env.is_goal(&s) {
        if let Some(shortest) = find_plan(model) {
            let max_len = (shortest.len() + 2).min(MAX_ENUMERATION_DEPTH);
            if let Ok(mut plans) = enumerate_plans(model, max_len) {
                plans.sort_by_key(Vec::len);
                witness = plans
                    .iter()
                    .find(|p| is_instantiation(&rows, &model.validate_plan(p).states))
                    .map(|p| p.iter().map(|a| model.actions[a.0].name.clone()).collect());
            }
        }
    }

    Ok(LayoutReport {
        mvtr_condition1_ok: cond1,
        mvtr_condition2_ok: witness.is_some(),
        goal_alignment_ok: aligned,
        trap_properties_ok: env.trap_checks(&graph),
        shortest_goal_steps: graph.shortest_goal_steps,
        reachable_states: graph.len(),
        encoding_injective: keys.len() == graph.len(),
        witness_plan: witness,
    })
}
