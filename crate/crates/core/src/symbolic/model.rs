use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Index of a fluent in [`SymbolicModel::fluents`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fluent(pub u8);

impl Fluent {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Maximum number of fluents a grounded model may have.
pub const MAX_FLUENTS: usize = 128;

/// A set of fluents with bitset semantics.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FluentSet(u128);

impl FluentSet {
    pub const EMPTY: Self = Self(0);

    pub fn from_bits(bits: u128) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, f: Fluent) -> bool {
        self.0 & (1u128 << f.0) != 0
    }

    pub fn insert(&mut self, f: Fluent) {
        self.0 |= 1u128 << f.0;
    }

    pub fn remove(&mut self, f: Fluent) {
        self.0 &= !(1u128 << f.0);
    }

    pub fn with(mut self, f: Fluent) -> Self {
        self.insert(f);
        self
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Fluent> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            Some(Fluent(i as u8))
        })
    }
}

impl FromIterator<Fluent> for FluentSet {
    fn from_iter<T: IntoIterator<Item = Fluent>>(iter: T) -> Self {
        let mut s = Self::EMPTY;
        for f in iter {
            s.insert(f);
        }
        s
    }
}

impl fmt::Debug for FluentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|x| x.0)).finish()
    }
}

/// A symbolic state: the set of fluents that are true.
pub type SymbolicState = FluentSet;

/// Index of an action in [`SymbolicModel::actions`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    /// Schema name followed by the bound objects, e.g. `pickup_key red`.
    pub name: String,
    pub prec: FluentSet,
    pub add: FluentSet,
    pub del: FluentSet,
}

/// A grounded STRIPS task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicModel {
    /// Fluent texts in lexicographic order; `Fluent(i)` names `fluents[i]`.
    pub fluents: Vec<String>,
    pub actions: Vec<GroundAction>,
    pub init: FluentSet,
    pub goal: FluentSet,
}

/// Result of executing a plan from the initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanCheck {
    pub valid: bool,
    /// States visited, starting with the initial state. Stops at the last
    /// defined state when an action is inapplicable.
    pub states: Vec<SymbolicState>,
}

/// Pairs `(a, b)` read as "a precedes b".
pub type OrderingSet = BTreeSet<(Fluent, Fluent)>;

impl SymbolicModel {
    pub fn fluent(&self, text: &str) -> Option<Fluent> {
        self.fluents
            .binary_search_by(|f| f.as_str().cmp(text))
            .ok()
            .map(|i| Fluent(i as u8))
    }

    pub fn fluent_name(&self, f: Fluent) -> &str {
        &self.fluents[f.index()]
    }

    pub fn action(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.name == name).map(ActionId)
    }

    pub fn all_fluents(&self) -> FluentSet {
        (0..self.fluents.len()).map(|i| Fluent(i as u8)).collect()
    }

    /// `(s \ del) ∪ add` when the precondition holds in `s`.
    pub fn apply(&self, s: SymbolicState, a: ActionId) -> Option<SymbolicState> {
        apply_action(s, &self.actions[a.0])
    }

    pub fn is_goal(&self, s: SymbolicState) -> bool {
        self.goal.is_subset(s)
    }

    pub fn validate_plan(&self, plan: &[ActionId]) -> PlanCheck {
        let mut states = Vec::with_capacity(plan.len() + 1);
        let mut s = self.init;
        states.push(s);
        for &a in plan {
            match self.apply(s, a) {
                Some(next) => {
                    s = next;
                    states.push(s);
                }
                None => {
                    return PlanCheck {
                        valid: false,
                        states,
                    }
                }
            }
        }
        PlanCheck {
            valid: self.is_goal(s),
            states,
        }
    }

    pub fn format_set(&self, s: FluentSet) -> String {
        let mut out = String::from("{");
        for (i, f) in s.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(self.fluent_name(f));
        }
        out.push('}');
        out
    }
}

pub fn apply_action(s: SymbolicState, a: &GroundAction) -> Option<SymbolicState> {
    a.prec
        .is_subset(s)
        .then(|| s.difference(a.del).union(a.add))
}

/// Index of the first state in which each fluent is true.
fn first_true(seq: &[FluentSet], f: Fluent) -> Option<usize> {
    seq.iter().position(|s| s.contains(f))
}

/// Orderings established by a state sequence: `a ≺ b` when `a` holds in
/// some state strictly before the first state where `b` holds. Fluents first
/// achieved in the same state are left unordered.
pub fn relative_orderings(seq: &[SymbolicState]) -> OrderingSet {
    let universe = seq.iter().fold(FluentSet::EMPTY, |acc, s| acc.union(*s));
    let mut out = OrderingSet::new();
    for b in universe.iter() {
        let n = first_true(seq, b).expect("fluent from the sequence's union");
        let before = seq[..n].iter().fold(FluentSet::EMPTY, |acc, s| acc.union(*s));
        for a in before.iter() {
            if a != b {
                out.insert((a, b));
            }
        }
    }
    out
}

/// Whether the rows (detector evaluations of a trace) respect every ordering
/// established by the plan's state sequence.
pub fn is_instantiation(rows: &[FluentSet], plan_states: &[SymbolicState]) -> bool {
    orderings_hold(rows, &relative_orderings(plan_states))
}

/// Whether every ordered pair is reflected in `rows`: the later fluent must
/// become true at some row and the earlier fluent must hold before that row.
pub fn orderings_hold<'a>(
    rows: &[FluentSet],
    orderings: impl IntoIterator<Item = &'a (Fluent, Fluent)>,
) -> bool {
    orderings.into_iter().all(|&(a, b)| match first_true(rows, b) {
        Some(n) => rows[..n].iter().any(|r| r.contains(a)),
        None => false,
    })
}
