mod common;

use common::{finishes, nominal_states, random_plan, random_state, skip_violations};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reactive_chain::chain::{build_chain, verify_chain, Chain, ChainFile};
use reactive_chain::kitchen;
use reactive_chain::logic::LogicalState;
use reactive_chain::planner::{plan, GroundedDomain, SearchOptions};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sound_plans_verify(seed in any::<u64>()) {
        let p = random_plan(seed);
        // positive-only preconditions: a sound plan can never destroy a
        // condition that is still needed
        let chain = build_chain(&p.g, &p.steps, &p.goal).unwrap();
        prop_assert!(verify_chain(&p.g, &chain, &p.init));
        for (step, &op) in chain.steps.iter().zip(&p.steps) {
            let base = p.g.op(op);
            prop_assert_eq!(step.op, op);
            prop_assert!(base.pre.is_subset(&step.pre));
            prop_assert!(base.run.is_subset(&step.run));
            prop_assert!(step.extra_pre.difference(&base.pre) == step.extra_pre);
            prop_assert!(step.extra_run.difference(&base.run) == step.extra_run);
        }
    }

    #[test]
    fn jumping_to_any_enterable_step_is_safe(seed in any::<u64>()) {
        let p = random_plan(seed);
        let chain = build_chain(&p.g, &p.steps, &p.goal).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut probes = nominal_states(&p.g, &chain, &p.init);
        probes.extend((0..20).map(|_| random_state(&mut rng, p.g.vocab_len())));
        for s in &probes {
            for j in 0..chain.len() {
                if s.satisfies(&chain.steps[j].pre) {
                    prop_assert!(finishes(&p.g, &chain, j, s));
                }
            }
        }
    }

    #[test]
    fn skipping_a_producer_blocks_the_consumer(seed in any::<u64>()) {
        let p = random_plan(seed);
        let chain = build_chain(&p.g, &p.steps, &p.goal).unwrap();
        prop_assert_eq!(skip_violations(&p.g, &chain, &p.init), vec![]);
    }
}

fn kitchen_chain() -> (GroundedDomain, LogicalState, Chain) {
    let (_, p, g) = kitchen::grounded();
    let init = g.init_state(&p).unwrap();
    let goal = g.goal(&p).unwrap();
    let found = plan(&g, &init, &goal, SearchOptions::optimal()).unwrap();
    let chain = build_chain(&g, found.steps(), &goal).unwrap();
    (g, init, chain)
}

#[test]
fn kitchen_in_drawer_guards_the_tail() {
    let (g, init, chain) = kitchen_chain();
    assert!(verify_chain(&g, &chain, &init));
    let in_drawer = g.vocab.find("obj_is_in_drawer(spam)").unwrap();
    let closed = g.vocab.find("drawer_is_closed").unwrap();
    let lower = chain
        .steps
        .iter()
        .position(|s| g.op(s.op).name() == "lower_obj_into_drawer(spam)")
        .unwrap();
    for (i, step) in chain.steps.iter().enumerate() {
        assert_eq!(step.extra_pre.positives().contains(in_drawer), i > lower, "step {i}");
        assert!(!step.extra_pre.positives().contains(closed));
    }
    let guarded: Vec<String> = chain.steps[lower + 1..].iter().map(|s| g.op(s.op).name()).collect();
    assert_eq!(
        guarded,
        ["release_obj", "back_off", "approach_drawer_close", "push_drawer"]
    );
}

#[test]
fn kitchen_nominal_trajectory_never_skips() {
    let (g, init, chain) = kitchen_chain();
    let states = nominal_states(&g, &chain, &init);
    for (k, s) in states.iter().enumerate().take(chain.len()) {
        let best = (0..chain.len()).rev().find(|&j| s.satisfies(&chain.steps[j].pre));
        assert_eq!(best, Some(k));
    }
}

#[test]
fn chain_file_round_trip() {
    let (g, _, chain) = kitchen_chain();
    let file = ChainFile::from_chain(&g, &chain);
    let json = serde_json::to_string_pretty(&file).unwrap();
    let back: ChainFile = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_chain(&g).unwrap(), chain);

    let mut tampered = back.clone();
    tampered.steps[0].extra_pre.push("drawer_is_open".into());
    assert!(tampered.to_chain(&g).is_err());
}
