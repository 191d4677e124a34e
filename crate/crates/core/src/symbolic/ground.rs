use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use super::model::{Fluent, FluentSet, GroundAction, SymbolicModel, MAX_FLUENTS};
use super::pddl::{Atom, GroundAtom, LiftedTask, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("grounding produced {0} fluents; at most {MAX_FLUENTS} are supported")]
    TooManyFluents(usize),
    #[error("action `{action}` both adds and deletes `{fluent}`")]
    ConflictingEffects { action: String, fluent: String },
    #[error("goal is empty")]
    EmptyGoal,
}

fn instantiate(atom: &Atom, params: &[String], binding: &[&str]) -> GroundAtom {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Const(c) => c.clone(),
            Term::Var(v) => {
                let i = params
                    .iter()
                    .position(|p| p == v)
                    .expect("parser validated parameter references");
                binding[i].to_string()
            }
        })
        .collect();
    GroundAtom {
        predicate: atom.predicate.clone(),
        args,
    }
}

/// Every binding of `params` to type-compatible objects, in object
/// declaration order with the last parameter varying fastest.
fn bindings<'a>(task: &'a LiftedTask, param_types: &[&str]) -> Vec<Vec<&'a str>> {
    let candidates: Vec<Vec<&str>> = param_types
        .iter()
        .map(|ty| {
            task.objects
                .iter()
                .filter(|(_, oty)| task.is_subtype(oty, ty))
                .map(|(o, _)| o.as_str())
                .collect()
        })
        .collect();
    let mut out: Vec<Vec<&str>> = alloc::vec![Vec::new()];
    for options in &candidates {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for o in options {
                let mut b = prefix.clone();
                b.push(*o);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

struct RawGround {
    name: String,
    prec: Vec<GroundAtom>,
    add: Vec<GroundAtom>,
    del: Vec<GroundAtom>,
}

/// Grounds a lifted task into a propositional STRIPS model.
///
/// Actions are emitted per schema (declaration order) and per binding.
/// The fluent universe is every ground atom mentioned by the initial state,
/// the goal, or a ground action, sorted by atom text.
pub fn ground(task: &LiftedTask) -> Result<SymbolicModel, GroundError> {
    if task.goal.is_empty() {
        return Err(GroundError::EmptyGoal);
    }
    let mut raw = Vec::new();
    for schema in &task.action_schemas {
        let names: Vec<String> = schema.params.iter().map(|p| p.name.clone()).collect();
        let types: Vec<&str> = schema.params.iter().map(|p| p.ty.as_str()).collect();
        for binding in bindings(task, &types) {
            let mut name = schema.name.clone();
            for o in &binding {
                name.push(' ');
                name.push_str(o);
            }
            let inst = |atoms: &[Atom]| -> Vec<GroundAtom> {
                atoms.iter().map(|a| instantiate(a, &names, &binding)).collect()
            };
            raw.push(RawGround {
                name,
                prec: inst(&schema.precondition),
                add: inst(&schema.add),
                del: inst(&schema.del),
            });
        }
    }

    let mut universe: BTreeSet<String> = BTreeSet::new();
    for atom in task.init.iter().chain(&task.goal) {
        universe.insert(atom.text());
    }
    for a in &raw {
        for atom in a.prec.iter().chain(&a.add).chain(&a.del) {
            universe.insert(atom.text());
        }
    }
    if universe.len() > MAX_FLUENTS {
        return Err(GroundError::TooManyFluents(universe.len()));
    }
    let fluents: Vec<String> = universe.into_iter().collect();
    let lookup = |atom: &GroundAtom| -> Fluent {
        let text = atom.text();
        let i = fluents
            .binary_search(&text)
            .expect("universe contains every mentioned atom");
        Fluent(i as u8)
    };
    let to_set = |atoms: &[GroundAtom]| -> FluentSet { atoms.iter().map(lookup).collect() };

    let mut actions = Vec::with_capacity(raw.len());
    for a in &raw {
        let add = to_set(&a.add);
        let del = to_set(&a.del);
        if let Some(f) = add.intersection(del).iter().next() {
            return Err(GroundError::ConflictingEffects {
                action: a.name.clone(),
                fluent: fluents[f.index()].clone(),
            });
        }
        actions.push(GroundAction {
            name: a.name.clone(),
            prec: to_set(&a.prec),
            add,
            del,
        });
    }
    let init = to_set(&task.init);
    let goal = to_set(&task.goal);
    Ok(SymbolicModel {
        fluents,
        actions,
        init,
        goal,
    })
}
