//! Additive delete-relaxation heuristic.

use super::GroundedDomain;
use crate::logic::{ConditionSet, LogicalState};

/// Sum over goal atoms of their cheapest relaxed achievement cost, where an
/// operator costs one plus the sum of its positive precondition costs.
///
/// Returns `0.0` iff `goal` holds in `state` and `f64::INFINITY` iff the goal
/// is unreachable even with deletes ignored. Negative literals are treated
/// optimistically: a violated negative goal costs one if some relaxed-
/// reachable operator deletes the atom.
pub fn h_add(g: &GroundedDomain, state: &LogicalState, goal: &ConditionSet) -> f64 {
    let n = g.vocab_len();
    let mut cost = vec![f64::INFINITY; n];
    for id in state.iter() {
        cost[id] = 0.0;
    }
    let mut op_cost = vec![f64::INFINITY; g.operators.len()];
    loop {
        let mut changed = false;
        for op in &g.operators {
            let mut c = 1.0;
            for a in op.pre.positives().ones() {
                c += cost[a];
            }
            if c < op_cost[op.id] {
                op_cost[op.id] = c;
            }
            if !c.is_finite() {
                continue;
            }
            for a in op.eff.adds().ones() {
                if c < cost[a] {
                    cost[a] = c;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut h = 0.0;
    for a in goal.positives().ones() {
        h += cost[a];
    }
    for a in goal.negatives().ones() {
        if state.contains(a) {
            let deletable = g
                .operators
                .iter()
                .any(|op| op.eff.deletes().contains(a) && op_cost[op.id].is_finite());
            h += if deletable { 1.0 } else { f64::INFINITY };
        }
    }
    h
}
