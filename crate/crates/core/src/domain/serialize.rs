use std::fmt::Write;

use super::{DomainDefinition, LiftedAtom, LiftedCondition, LiftedEffect, ProblemDefinition};
use crate::logic::GroundAtom;

fn atom(a: &LiftedAtom) -> String {
    let mut s = format!("({}", a.predicate);
    for t in &a.args {
        write!(s, " {t}").unwrap();
    }
    s.push(')');
    s
}

fn ground(a: &GroundAtom) -> String {
    let mut s = format!("({}", a.predicate);
    for arg in &a.args {
        write!(s, " {arg}").unwrap();
    }
    s.push(')');
    s
}

fn condition(c: &LiftedCondition) -> String {
    let parts: Vec<String> = c
        .literals
        .iter()
        .map(|l| {
            if l.positive {
                atom(&l.atom)
            } else {
                format!("(not {})", atom(&l.atom))
            }
        })
        .collect();
    format!("(and {})", parts.join(" ")).replace("(and )", "(and)")
}

fn effect(e: &LiftedEffect) -> String {
    let parts: Vec<String> = e
        .adds
        .iter()
        .map(atom)
        .chain(e.deletes.iter().map(|a| format!("(not {})", atom(a))))
        .collect();
    format!("(and {})", parts.join(" ")).replace("(and )", "(and)")
}

fn typed<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> String {
    pairs
        .into_iter()
        .map(|(n, t)| format!("{n} - {t}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical text form. Every run condition is written out explicitly, so
/// parsing the result reproduces the definition exactly.
pub fn serialize_domain(d: &DomainDefinition) -> String {
    let mut s = format!("(define (domain {})\n", d.name);
    if !d.types.is_empty() {
        let types = typed(d.types.iter().map(|t| (t.name.as_str(), t.parent.as_str())));
        writeln!(s, "  (:types {types})").unwrap();
    }
    if !d.constants.is_empty() {
        let consts = typed(d.constants.iter().map(|(n, t)| (n.as_str(), t.as_str())));
        writeln!(s, "  (:constants {consts})").unwrap();
    }
    s.push_str("  (:predicates");
    for p in &d.predicates {
        write!(s, "\n    ({}", p.name).unwrap();
        for (i, ty) in p.param_types.iter().enumerate() {
            write!(s, " ?a{i} - {ty}").unwrap();
        }
        s.push(')');
    }
    s.push_str(")\n");
    for op in &d.operators {
        writeln!(s, "  (:action {}", op.name).unwrap();
        let params = op
            .params
            .iter()
            .map(|(v, t)| format!("?{v} - {t}"))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(s, "    :parameters ({params})").unwrap();
        writeln!(s, "    :precondition {}", condition(&op.pre)).unwrap();
        writeln!(s, "    :runcondition {}", condition(&op.run)).unwrap();
        writeln!(s, "    :effect {}", effect(&op.eff)).unwrap();
        writeln!(s, "    :binding {})", op.primitive_binding).unwrap();
    }
    s.push_str(")\n");
    s
}

pub fn serialize_problem(p: &ProblemDefinition) -> String {
    let mut s = format!("(define (problem {})\n  (:domain {})\n", p.name, p.domain_name);
    let objects = typed(p.objects.iter().map(|(n, t)| (n.as_str(), t.as_str())));
    writeln!(s, "  (:objects {objects})").unwrap();
    let init: Vec<String> = p.init.iter().map(ground).collect();
    writeln!(s, "  (:init {})", init.join(" ")).unwrap();
    let goal: Vec<String> = p
        .goal
        .iter()
        .map(|(a, pos)| {
            if *pos {
                ground(a)
            } else {
                format!("(not {})", ground(a))
            }
        })
        .collect();
    writeln!(s, "  (:goal (and {})))", goal.join(" ")).unwrap();
    s
}
