//! Grounding and forward state-space search.

mod ground;
mod heuristic;
mod search;

pub use ground::{
    ground, ground_with_cap, GroundError, GroundOperator, GroundedDomain, OpId, PlanStep, DEFAULT_GROUNDING_CAP,
};
pub use heuristic::h_add;
pub use search::{
    plan, symbolic_execute, Plan, PlanError, SearchMode, SearchOptions, StepFailure, DEFAULT_NODE_BUDGET,
};
