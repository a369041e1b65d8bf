use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reactive_chain::domain::{
    parse_domain, parse_problem, serialize_domain, serialize_problem, Diagnostic, DomainDefinition, LiftedAtom,
    LiftedCondition, LiftedEffect, LiftedLiteral, OperatorSchema, Term, TypeDef,
};
use reactive_chain::kitchen;
use reactive_chain::logic::PredicateSchema;

fn random_domain(seed: u64) -> DomainDefinition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut types = Vec::new();
    let mut names = vec!["object".to_string()];
    for i in 0..rng.random_range(0..4) {
        let parent = names.choose(&mut rng).unwrap().clone();
        types.push(TypeDef {
            name: format!("t{i}"),
            parent,
        });
        names.push(format!("t{i}"));
    }
    let constants: Vec<(String, String)> = (0..rng.random_range(0..3))
        .map(|i| (format!("c{i}"), names.choose(&mut rng).unwrap().clone()))
        .collect();
    let predicates: Vec<PredicateSchema> = (0..rng.random_range(1..6))
        .map(|i| {
            let arity = rng.random_range(0..=3);
            PredicateSchema::new(
                format!("p{i}"),
                (0..arity).map(|_| names.choose(&mut rng).unwrap().clone()).collect(),
            )
        })
        .collect();
    let d0 = DomainDefinition {
        name: "rand".into(),
        types: types.clone(),
        constants: constants.clone(),
        predicates: predicates.clone(),
        operators: Vec::new(),
    };

    let mut operators = Vec::new();
    for i in 0..rng.random_range(0..5) {
        let params: Vec<(String, String)> = (0..rng.random_range(0..3))
            .map(|j| (format!("v{j}"), names.choose(&mut rng).unwrap().clone()))
            .collect();
        // every well-typed atom over the parameters and constants
        let mut atoms = Vec::new();
        for p in &predicates {
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for ty in &p.param_types {
                let mut options: Vec<Term> = params
                    .iter()
                    .filter(|(_, t)| d0.is_subtype(t, ty))
                    .map(|(v, _)| Term::Var(v.clone()))
                    .collect();
                options.extend(
                    constants
                        .iter()
                        .filter(|(_, t)| d0.is_subtype(t, ty))
                        .map(|(c, _)| Term::Const(c.clone())),
                );
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        options.iter().map(move |o| {
                            let mut n = t.clone();
                            n.push(o.clone());
                            n
                        })
                    })
                    .collect();
            }
            atoms.extend(tuples.into_iter().map(|args| LiftedAtom {
                predicate: p.name.clone(),
                args,
            }));
        }
        let pick = |rng: &mut ChaCha8Rng, k: usize| -> Vec<LiftedAtom> {
            let k = k.min(atoms.len());
            atoms.choose_multiple(rng, k).cloned().collect()
        };
        let cond = |rng: &mut ChaCha8Rng| LiftedCondition {
            literals: pick(rng, 3)
                .into_iter()
                .map(|atom| LiftedLiteral {
                    atom,
                    positive: rng.random_bool(0.7),
                })
                .collect(),
        };
        let pre = cond(&mut rng);
        let run = cond(&mut rng);
        let mut eff_atoms = pick(&mut rng, 4);
        let split = rng.random_range(0..=eff_atoms.len());
        let deletes = eff_atoms.split_off(split);
        operators.push(OperatorSchema {
            name: format!("op{i}"),
            params,
            pre,
            run,
            eff: LiftedEffect {
                adds: eff_atoms,
                deletes,
            },
            primitive_binding: format!("prim{}", rng.random_range(0..3)),
        });
    }
    DomainDefinition { operators, ..d0 }
}

/// Rewrites every inter-token space as a random mix of whitespace and comments.
fn inject_noise(text: &str, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for ch in text.chars() {
        if ch == ' ' {
            match rng.random_range(0..4) {
                0 => out.push_str("  \t"),
                1 => out.push_str(" ; note (unbalanced (( here\n"),
                2 => out.push_str("\n\n   "),
                _ => out.push(' '),
            }
        } else {
            out.push(ch);
        }
    }
    out
}

fn positions_valid(src: &str, diags: &[Diagnostic]) -> bool {
    let lines: Vec<&str> = src.split('\n').collect();
    diags.iter().all(|d| {
        d.line >= 1 && d.line <= lines.len() && d.column >= 1 && d.column <= lines[d.line - 1].chars().count() + 1
    })
}

#[test]
fn kitchen_round_trip() {
    let d = kitchen::domain();
    let text = serialize_domain(&d);
    assert_eq!(parse_domain(&text).unwrap(), d);
    for (name, _) in kitchen::PROBLEMS {
        let p = kitchen::problem(&d, name).unwrap();
        assert_eq!(parse_problem(&serialize_problem(&p), &d).unwrap(), p);
    }
}

#[test]
fn minimal_round_trip() {
    let d = parse_domain("(define (domain d) (:types t) (:predicates (p ?x - t)) )").unwrap();
    assert_eq!(d.types.len(), 1);
    assert_eq!(d.predicates.len(), 1);
    assert!(d.operators.is_empty());
    assert_eq!(parse_domain(&serialize_domain(&d)).unwrap(), d);
}

#[test]
fn problem_shapes() {
    let d = kitchen::domain();
    let p = kitchen::problem(&d, "put_away_spam").unwrap();
    assert_eq!(p.objects.len(), 2);
    assert_eq!(p.goal.len(), 2);
    let empty = parse_problem(
        "(define (problem e) (:domain kitchen) (:objects spam - movable) (:init) (:goal))",
        &d,
    )
    .unwrap();
    assert!(empty.goal.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_domains_round_trip(seed in any::<u64>()) {
        let d = random_domain(seed);
        let text = serialize_domain(&d);
        let parsed = parse_domain(&text);
        prop_assert!(parsed.is_ok(), "{text}\n{:?}", parsed.err());
        prop_assert_eq!(parsed.unwrap(), d);
    }

    #[test]
    fn comments_and_whitespace_are_ignored(seed in any::<u64>(), noise in any::<u64>()) {
        let d = random_domain(seed);
        let noisy = inject_noise(&serialize_domain(&d), noise);
        prop_assert_eq!(parse_domain(&noisy).unwrap(), d);
    }

    #[test]
    fn parse_is_total_on_arbitrary_text(src in "\\PC{0,400}") {
        match parse_domain(&src) {
            Ok(_) => {}
            Err(diags) => {
                prop_assert!(!diags.is_empty());
                prop_assert!(positions_valid(&src, &diags));
            }
        }
    }

    #[test]
    fn parse_is_total_on_mutated_kitchen(cuts in proptest::collection::vec((0usize..6000, 0usize..40, "[()?; a-z:\n-]{0,6}"), 1..6)) {
        let mut src: Vec<char> = kitchen::DOMAIN.chars().collect();
        for (at, len, insert) in cuts {
            let at = at % (src.len() + 1);
            let end = (at + len).min(src.len());
            src.splice(at..end, insert.chars());
        }
        let src: String = src.into_iter().collect();
        if let Err(diags) = parse_domain(&src) {
            prop_assert!(!diags.is_empty());
            prop_assert!(positions_valid(&src, &diags));
        }
        let d = kitchen::domain();
        if let Err(diags) = parse_problem(&src, &d) {
            prop_assert!(positions_valid(&src, &diags));
        }
    }
}

#[test]
fn large_input_is_total() {
    let src = "(".repeat(1 << 20);
    let diags = parse_domain(&src).unwrap_err();
    assert!(positions_valid(&src, &diags));
    let bytes: Vec<u8> = (0..(1usize << 20)).map(|i| (i * 7919 % 251) as u8).collect();
    let src = String::from_utf8_lossy(&bytes);
    assert!(parse_domain(&src).is_err());
}
