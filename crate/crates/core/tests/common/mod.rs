//! Random small domains and a brute-force reachability oracle shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reactive_chain::chain::Chain;
use reactive_chain::logic::{apply_effects, ConditionSet, EffectSet, GroundAtom, Literal, LogicalState, Vocabulary};
use reactive_chain::planner::{GroundOperator, GroundedDomain, OpId};

pub struct RandomProblem {
    pub g: GroundedDomain,
    pub init: LogicalState,
    pub goal: ConditionSet,
}

fn random_condition(rng: &mut ChaCha8Rng, n: usize, max: usize, negatives: bool) -> ConditionSet {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let k = rng.random_range(0..=max.min(n));
    let lits = ids[..k].iter().map(|&a| {
        if negatives && rng.random_bool(0.25) {
            Literal::neg(a)
        } else {
            Literal::pos(a)
        }
    });
    ConditionSet::from_literals(n, lits).unwrap()
}

fn random_effect(rng: &mut ChaCha8Rng, n: usize) -> EffectSet {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let adds = rng.random_range(1..=3.min(n));
    let dels = rng.random_range(0..=2.min(n - adds));
    EffectSet::new(n, ids[..adds].to_vec(), ids[adds..adds + dels].to_vec()).unwrap()
}

pub fn random_domain(rng: &mut ChaCha8Rng, atoms: usize, ops: usize, negatives: bool) -> GroundedDomain {
    let vocab = Vocabulary::new((0..atoms).map(|i| GroundAtom::nullary(format!("p{i}"))).collect()).unwrap();
    let operators = (0..ops)
        .map(|i| {
            let pre = random_condition(rng, atoms, 3, negatives);
            GroundOperator {
                id: i,
                schema: format!("op{i}"),
                args: Vec::new(),
                run: pre.clone(),
                pre,
                eff: random_effect(rng, atoms),
                primitive_binding: format!("op{i}"),
            }
        })
        .collect();
    GroundedDomain::from_parts(vocab, operators, Vec::new())
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> LogicalState {
    LogicalState::from_ids(n, (0..n).filter(|_| rng.random_bool(0.3)))
}

/// Arbitrary problem; may or may not be solvable.
pub fn random_problem(seed: u64) -> RandomProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=12);
    let ops = rng.random_range(0..=10);
    let g = random_domain(&mut rng, n, ops, true);
    let init = random_state(&mut rng, n);
    let goal = random_condition(&mut rng, n, 4, true);
    RandomProblem { g, init, goal }
}

pub struct RandomPlan {
    pub g: GroundedDomain,
    pub init: LogicalState,
    pub steps: Vec<OpId>,
    pub goal: ConditionSet,
}

/// Sound plan built by a random walk; the goal is a positive subset of the
/// final state.
pub fn random_plan(seed: u64) -> RandomPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(2..=12);
        let ops = rng.random_range(2..=12);
        let g = random_domain(&mut rng, n, ops, false);
        let init = random_state(&mut rng, n);
        let len = rng.random_range(0..=8);
        let mut state = init.clone();
        let mut steps = Vec::new();
        for _ in 0..len {
            let applicable: Vec<OpId> = g
                .operators
                .iter()
                .filter(|o| state.satisfies(&o.pre))
                .map(|o| o.id)
                .collect();
            let Some(&id) = applicable.choose(&mut rng) else {
                break;
            };
            state = reactive_chain::logic::apply_effects(&state, &g.op(id).eff);
            steps.push(id);
        }
        if steps.is_empty() && rng.random_bool(0.8) {
            continue;
        }
        let goal = ConditionSet::positive(n, state.iter().filter(|_| rng.random_bool(0.5)));
        return RandomPlan { g, init, steps, goal };
    }
}

/// Length of a shortest plan by exhaustive BFS, or `None` if unreachable.
pub fn shortest_plan_len(g: &GroundedDomain, init: &LogicalState, goal: &ConditionSet) -> Option<usize> {
    let bits = |s: &LogicalState| s.iter().fold(0u32, |m, a| m | 1 << a);
    let n = g.vocab_len();
    let goal_pos: u32 = goal.positives().ones().fold(0, |m, a| m | 1 << a);
    let goal_neg: u32 = goal.negatives().ones().fold(0, |m, a| m | 1 << a);
    let ops: Vec<(u32, u32, u32, u32)> = g
        .operators
        .iter()
        .map(|o| {
            (
                o.pre.positives().ones().fold(0, |m, a| m | 1 << a),
                o.pre.negatives().ones().fold(0, |m, a| m | 1 << a),
                o.eff.adds().ones().fold(0, |m, a| m | 1 << a),
                o.eff.deletes().ones().fold(0, |m, a| m | 1 << a),
            )
        })
        .collect();
    let start = bits(init);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start);
    queue.push_back((start, 0usize));
    assert!(n <= 32);
    while let Some((s, d)) = queue.pop_front() {
        if s & goal_pos == goal_pos && s & goal_neg == 0 {
            return Some(d);
        }
        for &(pp, pn, add, del) in &ops {
            if s & pp == pp && s & pn == 0 {
                let t = (s & !del) | add;
                if seen.insert(t) {
                    queue.push_back((t, d + 1));
                }
            }
        }
    }
    None
}

/// Runs steps `from..` with their effective preconditions checked.
pub fn finishes(g: &GroundedDomain, chain: &Chain, from: usize, state: &LogicalState) -> bool {
    let mut s = state.clone();
    for step in &chain.steps[from..] {
        if !s.satisfies(&step.pre) {
            return false;
        }
        s = apply_effects(&s, &g.op(step.op).eff);
    }
    s.satisfies(&chain.goal)
}

/// The state before each step of the chain, then the final state.
pub fn nominal_states(g: &GroundedDomain, chain: &Chain, init: &LogicalState) -> Vec<LogicalState> {
    let mut states = vec![init.clone()];
    for step in &chain.steps {
        let next = apply_effects(states.last().unwrap(), &g.op(step.op).eff);
        states.push(next);
    }
    states
}

/// Pairs (i, j) where executing 0..i and then jumping to j is allowed even
/// though j needs an atom that only step i would have produced.
pub fn skip_violations(g: &GroundedDomain, chain: &Chain, init: &LogicalState) -> Vec<(usize, usize)> {
    let states = nominal_states(g, chain, init);
    let mut bad = Vec::new();
    for j in 0..chain.len() {
        for (i, before) in states.iter().enumerate().take(j) {
            let produced_only_by_i = chain.steps[j].pre.positives().ones().any(|a| {
                !before.contains(a)
                    && g.op(chain.steps[i].op).eff.adds().contains(a)
                    && chain.steps[i + 1..j].iter().all(|s| !g.op(s.op).eff.adds().contains(a))
            });
            if produced_only_by_i && before.satisfies(&chain.steps[j].pre) {
                bad.push((i, j));
            }
        }
    }
    bad
}
