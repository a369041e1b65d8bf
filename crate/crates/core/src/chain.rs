//! Backward condition propagation from the goal through a plan.
//!
//! Every step gains, in both its precondition and its run condition, the
//! conditions that later steps (and the goal) still need and that the step
//! itself does not produce. The effective precondition of step `i` is then
//! exactly the regression of the goal through steps `i..n`, which gives the
//! executive two guarantees:
//!
//! * from any state where step `i` is enterable, running `i..n` in order
//!   reaches the goal, so jumping ahead is always safe;
//! * a step cannot be entered while something a later step relies on is
//!   still missing, which keeps the plan's ordering.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{apply_effects, AtomId, ConditionSet, Literal, LogicError, LogicalState};
use crate::planner::{GroundedDomain, OpId, PlanStep};

pub const CHAIN_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("goal contains negative literal on `{0}`; only positive goals can be propagated")]
    NegativeGoal(String),
    #[error("step {step} (`{op}`) destroys `{atom}`, which a later step or the goal needs")]
    Inconsistent { step: usize, op: String, atom: String },
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("chain file: {0}")]
    Format(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedOperator {
    pub op: OpId,
    /// Added precondition, disjoint from the base one.
    pub extra_pre: ConditionSet,
    /// Added run condition, disjoint from the base one.
    pub extra_run: ConditionSet,
    /// Base precondition plus `extra_pre`.
    pub pre: ConditionSet,
    /// Base run condition plus `extra_run`.
    pub run: ConditionSet,
}

/// A plan whose steps carry propagated conditions. Step order is the plan's
/// order, so the last step has the highest priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub steps: Vec<AugmentedOperator>,
    pub goal: ConditionSet,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn ops(&self) -> Vec<OpId> {
        self.steps.iter().map(|s| s.op).collect()
    }
}

fn inconsistent(g: &GroundedDomain, step: usize, op: OpId, atom: AtomId) -> ChainError {
    ChainError::Inconsistent {
        step,
        op: g.op(op).name(),
        atom: g.vocab.atom(atom).to_string(),
    }
}

/// Regresses `goal` through `steps`, last to first.
pub fn build_chain(g: &GroundedDomain, steps: &[OpId], goal: &ConditionSet) -> Result<Chain, ChainError> {
    if let Some(a) = goal.negatives().ones().next() {
        return Err(ChainError::NegativeGoal(g.vocab.atom(a).to_string()));
    }
    let n = g.vocab_len();
    let mut carry = goal.clone();
    let mut out = Vec::with_capacity(steps.len());
    for (i, &id) in steps.iter().enumerate().rev() {
        let op = g.op(id);
        let mut extra = ConditionSet::empty(n);
        for lit in carry.literals() {
            let (adds, dels) = (op.eff.adds().contains(lit.atom), op.eff.deletes().contains(lit.atom));
            match (lit.positive, adds, dels) {
                // produced here: propagation stops
                (true, true, _) | (false, _, true) => {}
                (true, false, true) | (false, true, _) => return Err(inconsistent(g, i, id, lit.atom)),
                _ => extra.add(lit)?,
            }
        }
        let wrap = |e: LogicError| match e {
            LogicError::Contradictory(a) => inconsistent(g, i, id, a),
            other => ChainError::Logic(other),
        };
        let pre = op.pre.union(&extra).map_err(wrap)?;
        let run = op.run.union(&extra).map_err(wrap)?;
        out.push(AugmentedOperator {
            op: id,
            extra_pre: extra.difference(&op.pre),
            extra_run: extra.difference(&op.run),
            pre: pre.clone(),
            run,
        });
        carry = pre;
    }
    out.reverse();
    Ok(Chain {
        steps: out,
        goal: goal.clone(),
    })
}

/// True iff executing the chain from `init` meets every effective
/// precondition in turn and ends in a goal state.
pub fn verify_chain(g: &GroundedDomain, chain: &Chain, init: &LogicalState) -> bool {
    let mut state = init.clone();
    for step in &chain.steps {
        if !matches!(crate::logic::holds(&state, &step.pre), Ok(true)) {
            return false;
        }
        state = apply_effects(&state, &g.op(step.op).eff);
    }
    matches!(crate::logic::holds(&state, &chain.goal), Ok(true))
}

/// Condition rendered as sorted display names, negatives prefixed with `!`.
pub fn condition_names(g: &GroundedDomain, c: &ConditionSet) -> Vec<String> {
    let mut names: Vec<String> = c
        .literals()
        .map(|Literal { atom, positive }| {
            let name = g.vocab.atom(atom).to_string();
            if positive {
                name
            } else {
                format!("!{name}")
            }
        })
        .collect();
    names.sort();
    names
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStepFile {
    pub operator: String,
    #[serde(default)]
    pub args: Vec<String>,
    pub primitive: String,
    pub pre: Vec<String>,
    pub run: Vec<String>,
    pub extra_pre: Vec<String>,
    pub extra_run: Vec<String>,
}

/// On-disk form of a chain (`chain.json`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFile {
    pub format_version: u32,
    pub goal: Vec<String>,
    pub steps: Vec<ChainStepFile>,
}

impl ChainFile {
    pub fn from_chain(g: &GroundedDomain, chain: &Chain) -> ChainFile {
        ChainFile {
            format_version: CHAIN_FORMAT_VERSION,
            goal: condition_names(g, &chain.goal),
            steps: chain
                .steps
                .iter()
                .map(|s| {
                    let op = g.op(s.op);
                    ChainStepFile {
                        operator: op.schema.clone(),
                        args: op.args.clone(),
                        primitive: op.primitive_binding.clone(),
                        pre: condition_names(g, &s.pre),
                        run: condition_names(g, &s.run),
                        extra_pre: condition_names(g, &s.extra_pre),
                        extra_run: condition_names(g, &s.extra_run),
                    }
                })
                .collect(),
        }
    }

    pub fn plan_steps(&self) -> Vec<PlanStep> {
        self.steps
            .iter()
            .map(|s| PlanStep {
                operator: s.operator.clone(),
                args: s.args.clone(),
            })
            .collect()
    }

    /// Rebuilds the chain from its operators and goal, then checks that the
    /// recorded conditions match the rebuilt ones.
    pub fn to_chain(&self, g: &GroundedDomain) -> Result<Chain, ChainError> {
        if self.format_version != CHAIN_FORMAT_VERSION {
            return Err(ChainError::Format(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        let ops = self
            .plan_steps()
            .iter()
            .map(|s| {
                g.find_op(&s.operator, &s.args)
                    .ok_or_else(|| ChainError::UnknownOperator(format!("{}({})", s.operator, s.args.join(","))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let goal = g.condition_from_names(&self.goal)?;
        let chain = build_chain(g, &ops, &goal)?;
        if ChainFile::from_chain(g, &chain) != *self {
            return Err(ChainError::Format(
                "recorded conditions differ from the propagated ones".into(),
            ));
        }
        Ok(chain)
    }
}
