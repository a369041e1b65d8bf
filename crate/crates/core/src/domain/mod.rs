//! Domain and problem definitions in a PDDL-like s-expression language.
//!
//! Two extensions over plain STRIPS PDDL:
//!
//! * `:runcondition`: the conditions an operator needs to keep running once
//!   entered. Defaults to the precondition when omitted.
//! * `:binding`: names the simulator primitive that realizes the operator.
//!   Defaults to the operator name.
//!
//! The full grammar lives in `docs/domain-format.md`.

mod parse;
mod serialize;
mod sexpr;

use std::fmt;

use serde::Serialize;

use crate::logic::{GroundAtom, PredicateSchema};

pub use parse::{parse_domain, parse_problem};
pub use serialize::{serialize_domain, serialize_problem};

/// Root of the type hierarchy; every declared type descends from it.
pub const ROOT_TYPE: &str = "object";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDef {
    pub name: String,
    pub parent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiftedAtom {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiftedLiteral {
    pub atom: LiftedAtom,
    pub positive: bool,
}

/// Conjunction of lifted literals, in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LiftedCondition {
    pub literals: Vec<LiftedLiteral>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LiftedEffect {
    pub adds: Vec<LiftedAtom>,
    pub deletes: Vec<LiftedAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorSchema {
    pub name: String,
    /// `(variable name without '?', type)` pairs.
    pub params: Vec<(String, String)>,
    pub pre: LiftedCondition,
    pub run: LiftedCondition,
    pub eff: LiftedEffect,
    pub primitive_binding: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainDefinition {
    pub name: String,
    pub types: Vec<TypeDef>,
    /// `(symbol, type)` pairs available to every problem of this domain.
    pub constants: Vec<(String, String)>,
    pub predicates: Vec<PredicateSchema>,
    pub operators: Vec<OperatorSchema>,
}

impl DomainDefinition {
    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn operator(&self, name: &str) -> Option<&OperatorSchema> {
        self.operators.iter().find(|o| o.name == name)
    }

    pub fn has_type(&self, name: &str) -> bool {
        name == ROOT_TYPE || self.types.iter().any(|t| t.name == name)
    }

    fn parent_of(&self, name: &str) -> Option<&str> {
        self.types.iter().find(|t| t.name == name).map(|t| t.parent.as_str())
    }

    /// True when `ty` equals `ancestor` or descends from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        let mut cur = ty;
        // bounded by the number of types; cycles are rejected at parse time
        for _ in 0..=self.types.len() {
            if cur == ancestor {
                return true;
            }
            match self.parent_of(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemDefinition {
    pub name: String,
    pub domain_name: String,
    /// `(symbol, type)` pairs, declaration order. Excludes domain constants.
    pub objects: Vec<(String, String)>,
    pub init: Vec<GroundAtom>,
    /// `(atom, positive)` pairs.
    pub goal: Vec<(GroundAtom, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagCode {
    UnbalancedParens,
    NestingTooDeep,
    Syntax,
    UnknownSection,
    UndeclaredType,
    ArityMismatch,
    ArityTooLarge,
    DuplicateName,
    UnknownPredicate,
    UnknownObject,
    UnboundVariable,
    TypeMismatch,
    Contradiction,
    EffectConflict,
    DomainMismatch,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::UnbalancedParens => "unbalanced parentheses",
            DiagCode::NestingTooDeep => "nesting too deep",
            DiagCode::Syntax => "syntax error",
            DiagCode::UnknownSection => "unknown section keyword",
            DiagCode::UndeclaredType => "undeclared type",
            DiagCode::ArityMismatch => "arity mismatch",
            DiagCode::ArityTooLarge => "arity too large",
            DiagCode::DuplicateName => "duplicate name",
            DiagCode::UnknownPredicate => "unknown predicate",
            DiagCode::UnknownObject => "unknown object",
            DiagCode::UnboundVariable => "unbound variable",
            DiagCode::TypeMismatch => "type mismatch",
            DiagCode::Contradiction => "contradictory condition",
            DiagCode::EffectConflict => "effect adds and deletes the same atom",
            DiagCode::DomainMismatch => "domain mismatch",
        }
    }
}

/// A positioned parse or validation message. Lines and columns are 1-based;
/// columns count characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}: {sev}: {}: {}",
            self.line,
            self.column,
            self.code.as_str(),
            self.message
        )
    }
}

/// Renders a diagnostic list, one per line.
pub fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}
