//! The bundled kitchen domain and its problems.

use crate::domain::{parse_domain, parse_problem, DomainDefinition, ProblemDefinition};
use crate::planner::{ground, GroundedDomain};

pub const DOMAIN: &str = include_str!("../../../data/kitchen.dpdl");

pub const PROBLEMS: &[(&str, &str)] = &[
    ("open_drawer", include_str!("../../../data/problems/open_drawer.dprob")),
    ("pick_spam", include_str!("../../../data/problems/pick_spam.dprob")),
    ("pick_sugar", include_str!("../../../data/problems/pick_sugar.dprob")),
    (
        "put_away_spam",
        include_str!("../../../data/problems/put_away_spam.dprob"),
    ),
    (
        "put_away_sugar",
        include_str!("../../../data/problems/put_away_sugar.dprob"),
    ),
    (
        "put_away_both",
        include_str!("../../../data/problems/put_away_both.dprob"),
    ),
];

pub fn domain() -> DomainDefinition {
    parse_domain(DOMAIN).expect("bundled domain parses")
}

pub fn problem_source(name: &str) -> Option<&'static str> {
    PROBLEMS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn problem(domain: &DomainDefinition, name: &str) -> Option<ProblemDefinition> {
    problem_source(name).map(|src| parse_problem(src, domain).expect("bundled problem parses"))
}

/// Domain grounded against the two-object problem set.
pub fn grounded() -> (DomainDefinition, ProblemDefinition, GroundedDomain) {
    let d = domain();
    let p = problem(&d, "put_away_spam").unwrap();
    let g = ground(&d, &p).expect("bundled domain grounds");
    (d, p, g)
}
