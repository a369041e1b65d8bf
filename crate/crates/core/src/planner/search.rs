use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use ordered::OrdF64;
use thiserror::Error;

use super::{h_add, GroundedDomain, OpId, PlanStep};
use crate::logic::{apply_effects, holds, ConditionSet, LogicError, LogicalState};

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("no plan exists")]
    Unsolvable,
    #[error("search budget of {0} expansions exhausted")]
    BudgetExhausted(usize),
    #[error("step {step} (`{op}`) is not applicable")]
    StepNotApplicable { step: usize, op: String },
    #[error("plan does not reach the goal")]
    GoalNotReached,
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Greedy best-first on `h_add`, FIFO among equal values.
    #[default]
    Greedy,
    /// Breadth-first; returns a shortest plan.
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub mode: SearchMode,
    pub node_budget: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            mode: SearchMode::Greedy,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl SearchOptions {
    pub fn optimal() -> Self {
        SearchOptions {
            mode: SearchMode::Optimal,
            ..Default::default()
        }
    }
}

/// First step whose precondition failed during symbolic execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepFailure {
    pub step: usize,
}

/// Folds the steps' effects over `init`, checking each precondition first.
pub fn symbolic_execute(g: &GroundedDomain, steps: &[OpId], init: &LogicalState) -> Result<LogicalState, StepFailure> {
    let mut state = init.clone();
    for (i, &id) in steps.iter().enumerate() {
        let op = g.op(id);
        if !holds(&state, &op.pre).unwrap_or(false) {
            return Err(StepFailure { step: i });
        }
        state = apply_effects(&state, &op.eff);
    }
    Ok(state)
}

/// Ordered operator list, lowest priority first. Always sound for the init
/// and goal it was built against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    steps: Vec<OpId>,
}

impl Plan {
    pub fn new(
        g: &GroundedDomain,
        steps: Vec<OpId>,
        init: &LogicalState,
        goal: &ConditionSet,
    ) -> Result<Plan, PlanError> {
        let end = symbolic_execute(g, &steps, init).map_err(|f| PlanError::StepNotApplicable {
            step: f.step,
            op: g.op(steps[f.step]).name(),
        })?;
        if !holds(&end, goal)? {
            return Err(PlanError::GoalNotReached);
        }
        Ok(Plan { steps })
    }

    pub fn from_steps(
        g: &GroundedDomain,
        steps: &[PlanStep],
        init: &LogicalState,
        goal: &ConditionSet,
    ) -> Result<Plan, PlanError> {
        let ids = steps
            .iter()
            .map(|s| {
                g.find_op(&s.operator, &s.args)
                    .ok_or_else(|| PlanError::UnknownOperator(format!("{}({})", s.operator, s.args.join(","))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Plan::new(g, ids, init, goal)
    }

    pub fn steps(&self) -> &[OpId] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn to_steps(&self, g: &GroundedDomain) -> Vec<PlanStep> {
        self.steps.iter().map(|&id| g.op(id).step()).collect()
    }

    pub fn names(&self, g: &GroundedDomain) -> Vec<String> {
        self.steps.iter().map(|&id| g.op(id).name()).collect()
    }
}

mod ordered {
    /// Total order over the finite heuristic values pushed to the open list.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct OrdF64(pub f64);
    impl Eq for OrdF64 {}
    impl PartialOrd for OrdF64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for OrdF64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }
}

struct Node {
    state: LogicalState,
    parent: Option<(usize, OpId)>,
}

fn extract(nodes: &[Node], mut idx: usize) -> Vec<OpId> {
    let mut steps = Vec::new();
    while let Some((parent, op)) = nodes[idx].parent {
        steps.push(op);
        idx = parent;
    }
    steps.reverse();
    steps
}

/// Searches for an operator sequence from `init` to `goal`.
///
/// Complete over the grounded state space: `Unsolvable` is returned only
/// after every reachable state has been seen.
pub fn plan(
    g: &GroundedDomain,
    init: &LogicalState,
    goal: &ConditionSet,
    opts: SearchOptions,
) -> Result<Plan, PlanError> {
    if holds(init, goal)? {
        return Ok(Plan { steps: Vec::new() });
    }
    let mut nodes = vec![Node {
        state: init.clone(),
        parent: None,
    }];
    let mut seen: HashMap<LogicalState, usize> = HashMap::new();
    seen.insert(init.clone(), 0);

    let h0 = h_add(g, init, goal);
    if h0.is_infinite() {
        return Err(PlanError::Unsolvable);
    }
    // (h, insertion order) for greedy; insertion order alone for BFS
    let mut heap: BinaryHeap<Reverse<(OrdF64, usize)>> = BinaryHeap::new();
    let mut fifo: VecDeque<usize> = VecDeque::new();
    match opts.mode {
        SearchMode::Greedy => heap.push(Reverse((OrdF64(h0), 0))),
        SearchMode::Optimal => fifo.push_back(0),
    }

    let mut expanded = 0usize;
    loop {
        let idx = match opts.mode {
            SearchMode::Greedy => heap.pop().map(|Reverse((_, i))| i),
            SearchMode::Optimal => fifo.pop_front(),
        };
        let Some(idx) = idx else {
            return Err(PlanError::Unsolvable);
        };
        expanded += 1;
        if expanded > opts.node_budget {
            return Err(PlanError::BudgetExhausted(opts.node_budget));
        }
        let state = nodes[idx].state.clone();
        for op in &g.operators {
            if !state.satisfies(&op.pre) {
                continue;
            }
            let next = apply_effects(&state, &op.eff);
            if seen.contains_key(&next) {
                continue;
            }
            let child = nodes.len();
            seen.insert(next.clone(), child);
            let reached = next.satisfies(goal);
            let h = match opts.mode {
                SearchMode::Greedy if !reached => h_add(g, &next, goal),
                _ => 0.0,
            };
            nodes.push(Node {
                state: next,
                parent: Some((idx, op.id)),
            });
            if reached {
                return Ok(Plan {
                    steps: extract(&nodes, child),
                });
            }
            match opts.mode {
                SearchMode::Greedy if h.is_finite() => heap.push(Reverse((OrdF64(h), child))),
                SearchMode::Greedy => {}
                SearchMode::Optimal => fifo.push_back(child),
            }
        }
    }
}
