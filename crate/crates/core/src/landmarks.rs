//! Fact landmarks by back-chaining over the delete relaxation.

use alloc::vec::Vec;

use thiserror::Error;

use crate::symbolic::{
    enumerate_plans, find_plan, relative_orderings, EnumerationError, Fluent, FluentSet,
    OrderingSet, SymbolicModel,
};
use crate::FxHashMap;

/// Landmark facts and their orderings (transitively reduced).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LandmarkGraph {
    pub facts: FluentSet,
    pub orderings: OrderingSet,
    pub goal: FluentSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LandmarkError {
    #[error("the model has no valid plan")]
    UnsolvableModel,
    #[error("landmark orderings contain a cycle")]
    Cycle,
    #[error("{0} landmarks exceed the linearization limit of {MAX_LINEARIZED}")]
    TooManyLandmarks(usize),
}

/// Largest landmark set [`sample_linearization`] handles.
pub const MAX_LINEARIZED: usize = 30;

/// Fluents reachable from `init` in the delete relaxation without using any
/// action that adds `without`.
fn relaxed_reachable(model: &SymbolicModel, without: Fluent) -> FluentSet {
    let mut reached = model.init;
    loop {
        let before = reached;
        for a in &model.actions {
            if !a.add.contains(without) && a.prec.is_subset(reached) {
                reached = reached.union(a.add);
            }
        }
        if reached == before {
            return reached;
        }
    }
}

pub fn extract_landmarks(model: &SymbolicModel) -> Result<LandmarkGraph, LandmarkError> {
    if find_plan(model).is_none() {
        return Err(LandmarkError::UnsolvableModel);
    }
    let mut facts = model.goal;
    let mut orderings = OrderingSet::new();
    let mut queue: Vec<Fluent> = model.goal.iter().collect();
    while let Some(f) = queue.pop() {
        if model.init.contains(f) {
            continue;
        }
        let reach = relaxed_reachable(model, f);
        let mut shared: Option<FluentSet> = None;
        for a in model.actions.iter().filter(|a| a.add.contains(f)) {
            if a.prec.is_subset(reach) {
                shared = Some(shared.map_or(a.prec, |s| s.intersection(a.prec)));
            }
        }
        for p in shared.unwrap_or_default().iter().filter(|&p| p != f) {
            orderings.insert((p, f));
            if !facts.contains(p) {
                facts.insert(p);
                queue.push(p);
            }
        }
    }
    let orderings = transitive_reduction(facts, &orderings).ok_or(LandmarkError::Cycle)?;
    Ok(LandmarkGraph {
        facts,
        orderings,
        goal: model.goal,
    })
}

/// Predecessor sets of the transitive closure; `None` on a cycle.
fn closure(facts: FluentSet, orderings: &OrderingSet) -> Option<FxHashMap<Fluent, FluentSet>> {
    let mut before: FxHashMap<Fluent, FluentSet> = facts.iter().map(|f| (f, FluentSet::EMPTY)).collect();
    for &(a, b) in orderings {
        before.entry(b).or_default().insert(a);
        before.entry(a).or_default();
    }
    loop {
        let mut changed = false;
        let keys: Vec<Fluent> = before.keys().copied().collect();
        for f in keys {
            let mut acc = before[&f];
            for p in before[&f].iter() {
                acc = acc.union(before.get(&p).copied().unwrap_or_default());
            }
            if acc != before[&f] {
                before.insert(f, acc);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if before.iter().any(|(f, b)| b.contains(*f)) {
        return None;
    }
    Some(before)
}

fn transitive_reduction(facts: FluentSet, orderings: &OrderingSet) -> Option<OrderingSet> {
    let before = closure(facts, orderings)?;
    let reduced = orderings
        .iter()
        .copied()
        .filter(|&(a, b)| {
            // drop a ≺ b when some c has a ≺ c ≺ b
            !before[&b].iter().any(|c| c != a && before[&c].contains(a))
        })
        .collect();
    Some(reduced)
}

/// Soundness of a landmark graph against every plan up to a length bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub plans_checked: usize,
    pub violated_orderings: Vec<(usize, (Fluent, Fluent))>,
    pub missing_facts: Vec<(usize, Fluent)>,
}

impl VerificationReport {
    pub fn is_sound(&self) -> bool {
        self.violated_orderings.is_empty() && self.missing_facts.is_empty()
    }
}

pub fn verify_landmarks(
    model: &SymbolicModel,
    lg: &LandmarkGraph,
    max_len: usize,
) -> Result<VerificationReport, EnumerationError> {
    let plans = enumerate_plans(model, max_len)?;
    let mut report = VerificationReport {
        plans_checked: plans.len(),
        ..Default::default()
    };
    for (i, plan) in plans.iter().enumerate() {
        let states = model.validate_plan(plan).states;
        let seen = states.iter().fold(FluentSet::EMPTY, |acc, s| acc.union(*s));
        for f in lg.facts.iter().filter(|&f| !seen.contains(f)) {
            report.missing_facts.push((i, f));
        }
        let established = relative_orderings(&states);
        for pair in &lg.orderings {
            if !established.contains(pair) {
                report.violated_orderings.push((i, *pair));
            }
        }
    }
    Ok(report)
}

/// Draws a topological order of the landmark facts uniformly among all
/// linear extensions, with goal facts placed after every other fact.
pub fn sample_linearization<R: rand::Rng + ?Sized>(
    lg: &LandmarkGraph,
    rng: &mut R,
) -> Result<Vec<Fluent>, LandmarkError> {
    let sampler = Linearizer::new(lg)?;
    Ok(sampler.sample(rng))
}

/// Linear-extension counter over a fixed landmark graph. Building it once
/// and sampling repeatedly avoids recounting every episode.
#[derive(Clone, Debug)]
pub struct Linearizer {
    facts: Vec<Fluent>,
    /// Bit mask (over `facts` indices) of required predecessors.
    preds: Vec<u32>,
    counts: FxHashMap<u32, u128>,
}

impl Linearizer {
    pub fn new(lg: &LandmarkGraph) -> Result<Self, LandmarkError> {
        let facts: Vec<Fluent> = lg.facts.iter().collect();
        if facts.len() > MAX_LINEARIZED {
            return Err(LandmarkError::TooManyLandmarks(facts.len()));
        }
        let idx = |f: Fluent| facts.iter().position(|&g| g == f);
        let mut preds = alloc::vec![0u32; facts.len()];
        for &(a, b) in &lg.orderings {
            if let (Some(i), Some(j)) = (idx(a), idx(b)) {
                preds[j] |= 1 << i;
            }
        }
        let non_goal: u32 = facts
            .iter()
            .enumerate()
            .filter(|(_, f)| !lg.goal.contains(**f))
            .fold(0, |m, (i, _)| m | 1 << i);
        for (j, f) in facts.iter().enumerate() {
            if lg.goal.contains(*f) {
                preds[j] |= non_goal;
            }
        }
        let mut lin = Self {
            facts,
            preds,
            counts: FxHashMap::default(),
        };
        if lin.count(0) == 0 {
            return Err(LandmarkError::Cycle);
        }
        Ok(lin)
    }

    fn full(&self) -> u32 {
        if self.facts.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.facts.len()) - 1
        }
    }

    fn available(&self, placed: u32) -> impl Iterator<Item = usize> + '_ {
        (0..self.facts.len())
            .filter(move |&i| placed & (1 << i) == 0 && self.preds[i] & !placed == 0)
    }

    /// Number of ways to complete an order that has placed `placed`.
    fn count(&mut self, placed: u32) -> u128 {
        if placed == self.full() {
            return 1;
        }
        if let Some(&c) = self.counts.get(&placed) {
            return c;
        }
        let next: Vec<usize> = self.available(placed).collect();
        let total = next.iter().map(|&i| self.count(placed | 1 << i)).sum();
        self.counts.insert(placed, total);
        total
    }

    /// Total number of admissible orders.
    pub fn total(&self) -> u128 {
        self.counts.get(&0).copied().unwrap_or(1)
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<Fluent> {
        let mut placed = 0u32;
        let mut out = Vec::with_capacity(self.facts.len());
        while placed != self.full() {
            let here = self.total_from(placed);
            let mut pick = rng.random_range(0..here);
            let mut chosen = None;
            for i in self.available(placed) {
                let c = self.total_from(placed | 1 << i);
                if pick < c {
                    chosen = Some(i);
                    break;
                }
                pick -= c;
            }
            let i = chosen.expect("counts cover every admissible choice");
            placed |= 1 << i;
            out.push(self.facts[i]);
        }
        out
    }

    fn total_from(&self, placed: u32) -> u128 {
        if placed == self.full() {
            1
        } else {
            self.counts[&placed]
        }
    }
}
