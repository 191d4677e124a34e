use alloc::collections::VecDeque;
use alloc::vec::Vec;

use thiserror::Error;

use super::model::{ActionId, SymbolicModel, SymbolicState};
use crate::FxHashMap;

/// Longest plan length [`enumerate_plans`] accepts.
pub const MAX_ENUMERATION_DEPTH: usize = 12;
/// Plan count at which enumeration gives up.
pub const MAX_ENUMERATED_PLANS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("max_len {0} exceeds the enumeration limit of {MAX_ENUMERATION_DEPTH}")]
    DepthTooLarge(usize),
    #[error("more than {MAX_ENUMERATED_PLANS} valid plans")]
    BudgetExceeded,
}

/// Breadth-first search over symbolic states. Returns a shortest plan;
/// ties are resolved by the model's action order.
pub fn find_plan(model: &SymbolicModel) -> Option<Vec<ActionId>> {
    if model.is_goal(model.init) {
        return Some(Vec::new());
    }
    let mut parent: FxHashMap<SymbolicState, (SymbolicState, ActionId)> = FxHashMap::default();
    let mut queue = VecDeque::from([model.init]);
    while let Some(s) = queue.pop_front() {
        for i in 0..model.actions.len() {
            let a = ActionId(i);
            let Some(next) = model.apply(s, a) else {
                continue;
            };
            if next == model.init || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, (s, a));
            if model.is_goal(next) {
                let mut plan = Vec::new();
                let mut cur = next;
                while cur != model.init {
                    let (prev, act) = parent[&cur];
                    plan.push(act);
                    cur = prev;
                }
                plan.reverse();
                return Some(plan);
            }
            queue.push_back(next);
        }
    }
    None
}

/// Every valid plan of length at most `max_len`, in depth-first order: a
/// plan comes right before its goal-reaching extensions, siblings follow
/// action order.
pub fn enumerate_plans(
    model: &SymbolicModel,
    max_len: usize,
) -> Result<Vec<Vec<ActionId>>, EnumerationError> {
    if max_len > MAX_ENUMERATION_DEPTH {
        return Err(EnumerationError::DepthTooLarge(max_len));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(max_len);
    dfs(model, model.init, max_len, &mut prefix, &mut out)?;
    Ok(out)
}

fn dfs(
    model: &SymbolicModel,
    s: SymbolicState,
    remaining: usize,
    prefix: &mut Vec<ActionId>,
    out: &mut Vec<Vec<ActionId>>,
) -> Result<(), EnumerationError> {
    if model.is_goal(s) {
        if out.len() >= MAX_ENUMERATED_PLANS {
            return Err(EnumerationError::BudgetExceeded);
        }
        out.push(prefix.clone());
    }
    if remaining == 0 {
        return Ok(());
    }
    for i in 0..model.actions.len() {
        let a = ActionId(i);
        if let Some(next) = model.apply(s, a) {
            prefix.push(a);
            dfs(model, next, remaining - 1, prefix, out)?;
            prefix.pop();
        }
    }
    Ok(())
}
