//! STRIPS models: parsing, grounding, action application, plan validation,
//! plan search and fluent-ordering extraction.

mod ground;
mod model;
mod pddl;
mod search;

pub use ground::{ground, GroundError};
pub use model::{
    apply_action, is_instantiation, orderings_hold, relative_orderings, ActionId, Fluent,
    FluentSet, GroundAction, OrderingSet, PlanCheck, SymbolicModel, SymbolicState, MAX_FLUENTS,
};
pub use pddl::{
    parse, ActionSchema, Atom, GroundAtom, LiftedTask, ParseError, ParseOptions, Pos, Predicate,
    Term, TypeDecl, TypedParam,
};
pub use search::{
    enumerate_plans, find_plan, EnumerationError, MAX_ENUMERATED_PLANS, MAX_ENUMERATION_DEPTH,
};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

/// Parses and grounds a domain/problem pair.
pub fn load_model(
    domain_text: &str,
    problem_text: &str,
    options: ParseOptions,
) -> Result<SymbolicModel, ModelError> {
    Ok(ground(&parse(domain_text, problem_text, options)?)?)
}
