use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DomainDefinition, LiftedAtom, LiftedCondition, ProblemDefinition, Term};
use crate::logic::{AtomId, ConditionSet, EffectSet, GroundAtom, Literal, LogicError, LogicalState, Vocabulary};

/// Index of a ground operator inside its [`GroundedDomain`].
pub type OpId = usize;

pub const DEFAULT_GROUNDING_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundError {
    #[error("grounding would produce {count} operators, above the cap of {cap}")]
    TooManyOperators { count: usize, cap: usize },
    #[error("operator `{op}`: {source}")]
    Inconsistent { op: String, source: LogicError },
    #[error("problem: {0}")]
    Problem(LogicError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundOperator {
    pub id: OpId,
    pub schema: String,
    pub args: Vec<String>,
    pub pre: ConditionSet,
    pub run: ConditionSet,
    pub eff: EffectSet,
    pub primitive_binding: String,
}

impl GroundOperator {
    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn step(&self) -> PlanStep {
        PlanStep {
            operator: self.schema.clone(),
            args: self.args.clone(),
        }
    }
}

impl fmt::Display for GroundOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.schema)
        } else {
            write!(f, "{}({})", self.schema, self.args.join(","))
        }
    }
}

/// One `{operator, args}` entry of a plan file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub operator: String,
    #[serde(default)]
    pub args: Vec<String>,
}

/// A domain instantiated against a concrete object set.
#[derive(Debug, Clone)]
pub struct GroundedDomain {
    pub vocab: Vocabulary,
    pub operators: Vec<GroundOperator>,
    /// atom -> operators whose precondition mentions it
    pub by_precondition: Vec<Vec<OpId>>,
    /// `(symbol, type)` for constants then problem objects.
    pub objects: Vec<(String, String)>,
}

impl GroundedDomain {
    /// Assembles a grounded domain from already-ground operators. Operator
    /// ids are reassigned to their positions.
    pub fn from_parts(
        vocab: Vocabulary,
        mut operators: Vec<GroundOperator>,
        objects: Vec<(String, String)>,
    ) -> GroundedDomain {
        let mut by_precondition = vec![Vec::new(); vocab.len()];
        for (i, op) in operators.iter_mut().enumerate() {
            op.id = i;
            for lit in op.pre.literals() {
                by_precondition[lit.atom].push(i);
            }
        }
        GroundedDomain {
            vocab,
            operators,
            by_precondition,
            objects,
        }
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn op(&self, id: OpId) -> &GroundOperator {
        &self.operators[id]
    }

    pub fn find_op(&self, schema: &str, args: &[String]) -> Option<OpId> {
        self.operators.iter().position(|o| o.schema == schema && o.args == args)
    }

    /// Finds an operator by display name, e.g. `cage_obj(spam)`.
    pub fn find_op_by_name(&self, name: &str) -> Option<OpId> {
        self.operators.iter().position(|o| o.name() == name)
    }

    pub fn state(&self, atoms: &[GroundAtom]) -> Result<LogicalState, LogicError> {
        self.vocab.state(atoms)
    }

    pub fn init_state(&self, problem: &ProblemDefinition) -> Result<LogicalState, LogicError> {
        self.vocab.state(&problem.init)
    }

    pub fn goal(&self, problem: &ProblemDefinition) -> Result<ConditionSet, LogicError> {
        self.condition(problem.goal.iter().map(|(a, p)| (a, *p)))
    }

    pub fn condition<'a>(
        &self,
        literals: impl IntoIterator<Item = (&'a GroundAtom, bool)>,
    ) -> Result<ConditionSet, LogicError> {
        let mut cond = ConditionSet::empty(self.vocab.len());
        for (atom, positive) in literals {
            let id = self.vocab.require(atom)?;
            cond.add(Literal { atom: id, positive })?;
        }
        Ok(cond)
    }

    /// Goal condition from display names such as `obj_is_in_drawer(spam)`.
    pub fn condition_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<ConditionSet, LogicError> {
        let mut cond = ConditionSet::empty(self.vocab.len());
        for name in names {
            let name = name.as_ref();
            let (positive, text) = match name.strip_prefix('!') {
                Some(rest) => (false, rest),
                None => (true, name),
            };
            let id = self
                .vocab
                .find(text)
                .ok_or_else(|| LogicError::UnknownAtomName(text.to_string()))?;
            cond.add(Literal { atom: id, positive })?;
        }
        Ok(cond)
    }
}

fn typed_objects<'a>(domain: &DomainDefinition, objects: &'a [(String, String)], ty: &str) -> Vec<&'a str> {
    objects
        .iter()
        .filter(|(_, t)| domain.is_subtype(t, ty))
        .map(|(n, _)| n.as_str())
        .collect()
}

/// Every tuple in the cartesian product, first position varying slowest.
fn product<'a>(choices: &[Vec<&'a str>]) -> Vec<Vec<&'a str>> {
    let mut out: Vec<Vec<&str>> = vec![Vec::new()];
    for options in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut next = prefix.clone();
                    next.push(o);
                    next
                })
            })
            .collect();
    }
    out
}

fn bind(atom: &LiftedAtom, binding: &HashMap<&str, &str>) -> GroundAtom {
    GroundAtom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => binding[v.as_str()].to_string(),
                Term::Const(c) => c.clone(),
            })
            .collect(),
    }
}

pub fn ground(domain: &DomainDefinition, problem: &ProblemDefinition) -> Result<GroundedDomain, GroundError> {
    ground_with_cap(domain, problem, DEFAULT_GROUNDING_CAP)
}

/// Enumerates every type-consistent binding of every predicate and operator.
pub fn ground_with_cap(
    domain: &DomainDefinition,
    problem: &ProblemDefinition,
    cap: usize,
) -> Result<GroundedDomain, GroundError> {
    let objects: Vec<(String, String)> = domain.constants.iter().chain(&problem.objects).cloned().collect();

    let total: usize = domain
        .operators
        .iter()
        .map(|op| {
            op.params
                .iter()
                .map(|(_, ty)| typed_objects(domain, &objects, ty).len())
                .fold(1usize, |acc, n| acc.saturating_mul(n))
        })
        .fold(0usize, |acc, n| acc.saturating_add(n));
    if total > cap {
        return Err(GroundError::TooManyOperators { count: total, cap });
    }

    let mut atoms = Vec::new();
    for pred in &domain.predicates {
        let choices: Vec<Vec<&str>> = pred
            .param_types
            .iter()
            .map(|ty| typed_objects(domain, &objects, ty))
            .collect();
        for args in product(&choices) {
            atoms.push(GroundAtom {
                predicate: pred.name.clone(),
                args: args.into_iter().map(str::to_string).collect(),
            });
        }
    }
    let vocab = Vocabulary::new(atoms).map_err(GroundError::Problem)?;
    let n = vocab.len();

    let mut operators = Vec::new();
    for schema in &domain.operators {
        let choices: Vec<Vec<&str>> = schema
            .params
            .iter()
            .map(|(_, ty)| typed_objects(domain, &objects, ty))
            .collect();
        for args in product(&choices) {
            let binding: HashMap<&str, &str> = schema
                .params
                .iter()
                .map(|(v, _)| v.as_str())
                .zip(args.iter().copied())
                .collect();
            let op_name = format!("{}({})", schema.name, args.join(","));
            let wrap = |source: LogicError| GroundError::Inconsistent {
                op: op_name.clone(),
                source,
            };
            let cond = |c: &LiftedCondition| -> Result<ConditionSet, GroundError> {
                let mut out = ConditionSet::empty(n);
                for lit in &c.literals {
                    let id = vocab.require(&bind(&lit.atom, &binding)).map_err(wrap)?;
                    out.add(Literal {
                        atom: id,
                        positive: lit.positive,
                    })
                    .map_err(wrap)?;
                }
                Ok(out)
            };
            let ids = |list: &[LiftedAtom]| -> Result<Vec<AtomId>, GroundError> {
                list.iter()
                    .map(|a| vocab.require(&bind(a, &binding)).map_err(wrap))
                    .collect()
            };
            let pre = cond(&schema.pre)?;
            let run = cond(&schema.run)?;
            let eff = EffectSet::new(n, ids(&schema.eff.adds)?, ids(&schema.eff.deletes)?).map_err(wrap)?;
            operators.push(GroundOperator {
                id: operators.len(),
                schema: schema.name.clone(),
                args: args.into_iter().map(str::to_string).collect(),
                pre,
                run,
                eff,
                primitive_binding: schema.primitive_binding.clone(),
            });
        }
    }

    Ok(GroundedDomain::from_parts(vocab, operators, objects))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{parse_domain, parse_problem};

    fn grounded(domain: &str, problem: &str) -> GroundedDomain {
        let d = parse_domain(domain).unwrap();
        let p = parse_problem(problem, &d).unwrap();
        ground(&d, &p).unwrap()
    }

    #[test]
    fn nullary_only() {
        let g = grounded(
            "(define (domain d) (:predicates (p)))",
            "(define (problem q) (:domain d))",
        );
        assert_eq!(g.vocab.len(), 1);
        assert!(g.operators.is_empty());
    }

    #[test]
    fn unary_schema_over_three_objects() {
        let g = grounded(
            "(define (domain d) (:types t) (:predicates (p ?x - t))
               (:action a :parameters (?x - t) :effect (p ?x)))",
            "(define (problem q) (:domain d) (:objects o1 o2 o3 - t))",
        );
        assert_eq!(g.operators.len(), 3);
        assert_eq!(g.vocab.len(), 3);
        assert_eq!(g.operators[1].name(), "a(o2)");
        assert_eq!(g.by_precondition.iter().map(Vec::len).sum::<usize>(), 0);
    }

    #[test]
    fn binding_collision_in_effects_is_an_error() {
        let d = parse_domain(
            "(define (domain d) (:types t) (:predicates (p ?x - t))
               (:action a :parameters (?x ?y - t) :effect (and (p ?x) (not (p ?y)))))",
        )
        .unwrap();
        let p = parse_problem("(define (problem q) (:domain d) (:objects o - t))", &d).unwrap();
        assert!(matches!(ground(&d, &p), Err(GroundError::Inconsistent { .. })));
    }

    #[test]
    fn cap_enforced() {
        let d = parse_domain(
            "(define (domain d) (:types t) (:predicates (p ?x ?y ?z - t))
               (:action a :parameters (?x ?y ?z - t) :effect (p ?x ?y ?z)))",
        )
        .unwrap();
        let p = parse_problem("(define (problem q) (:domain d) (:objects a b c d e - t))", &d).unwrap();
        assert_eq!(
            ground_with_cap(&d, &p, 100).unwrap_err(),
            GroundError::TooManyOperators { count: 125, cap: 100 }
        );
        assert_eq!(ground_with_cap(&d, &p, 125).unwrap().operators.len(), 125);
    }
}
