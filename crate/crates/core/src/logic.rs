//! Closed-world logical states over an interned atom vocabulary.
//!
//! Atoms are interned to dense integer ids when a domain is grounded. A
//! [`LogicalState`] is then a bitset over those ids, and condition checks and
//! effect application are word-wise set operations.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense index of a ground atom inside a [`Vocabulary`].
pub type AtomId = usize;

/// Largest predicate arity accepted by the domain language.
pub const MAX_ARITY: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("atom #{0} is outside the active vocabulary")]
    UnknownAtom(AtomId),
    #[error("unknown atom `{0}`")]
    UnknownAtomName(String),
    #[error("atom `{0}` appears twice in the vocabulary")]
    DuplicateAtom(String),
    #[error("atom #{0} is required both true and false")]
    Contradictory(AtomId),
    #[error("atom #{0} is both added and deleted")]
    EffectOverlap(AtomId),
}

/// A named relation with typed parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredicateSchema {
    pub name: String,
    pub param_types: Vec<String>,
}

impl PredicateSchema {
    pub fn new(name: impl Into<String>, param_types: Vec<String>) -> Self {
        PredicateSchema {
            name: name.into(),
            param_types,
        }
    }

    pub fn arity(&self) -> usize {
        self.param_types.len()
    }
}

/// A predicate applied to object symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn nullary(predicate: impl Into<String>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args: Vec::new(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.predicate)
        } else {
            write!(f, "{}({})", self.predicate, self.args.join(","))
        }
    }
}

/// Interning table from ground atoms to dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
}

impl Vocabulary {
    pub fn new(atoms: Vec<GroundAtom>) -> Result<Self, LogicError> {
        let mut index = HashMap::with_capacity(atoms.len());
        for (id, atom) in atoms.iter().enumerate() {
            if index.insert(atom.clone(), id).is_some() {
                return Err(LogicError::DuplicateAtom(atom.to_string()));
            }
        }
        Ok(Vocabulary { atoms, index })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn id(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn require(&self, atom: &GroundAtom) -> Result<AtomId, LogicError> {
        self.id(atom)
            .ok_or_else(|| LogicError::UnknownAtomName(atom.to_string()))
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id]
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    /// Looks an atom up by its display form, e.g. `obj_is_in_drawer(spam)`.
    pub fn find(&self, text: &str) -> Option<AtomId> {
        let text = text.trim();
        let atom = match text.split_once('(') {
            None => GroundAtom::nullary(text),
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')')?;
                GroundAtom {
                    predicate: name.trim().to_string(),
                    args: inner.split(',').map(|a| a.trim().to_string()).collect(),
                }
            }
        };
        self.id(&atom)
    }

    /// Display names of the atoms in `state`, sorted.
    pub fn names(&self, state: &LogicalState) -> Vec<String> {
        let mut names: Vec<String> = state.iter().map(|id| self.atoms[id].to_string()).collect();
        names.sort();
        names
    }

    pub fn state<'a>(&self, atoms: impl IntoIterator<Item = &'a GroundAtom>) -> Result<LogicalState, LogicError> {
        let mut state = LogicalState::empty(self.len());
        for atom in atoms {
            state.insert(self.require(atom)?);
        }
        Ok(state)
    }
}

/// The set of ground atoms currently true. Absent atoms are false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogicalState {
    bits: FixedBitSet,
}

impl LogicalState {
    pub fn empty(vocab_len: usize) -> Self {
        LogicalState {
            bits: FixedBitSet::with_capacity(vocab_len),
        }
    }

    pub fn from_ids(vocab_len: usize, ids: impl IntoIterator<Item = AtomId>) -> Self {
        let mut state = Self::empty(vocab_len);
        for id in ids {
            state.insert(id);
        }
        state
    }

    pub fn vocab_len(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, id: AtomId) -> bool {
        self.bits.contains(id)
    }

    pub fn insert(&mut self, id: AtomId) {
        self.bits.insert(id);
    }

    pub fn remove(&mut self, id: AtomId) {
        if id < self.bits.len() {
            self.bits.set(id, false);
        }
    }

    pub fn set(&mut self, id: AtomId, value: bool) {
        self.bits.set(id, value);
    }

    /// Number of true atoms.
    pub fn count(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.bits.ones()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    /// Number of atoms on which the two states disagree.
    pub fn hamming(&self, other: &LogicalState) -> usize {
        self.bits.symmetric_difference_count(&other.bits)
    }

    /// Unchecked condition test; callers must have validated the vocabulary.
    pub fn satisfies(&self, cond: &ConditionSet) -> bool {
        cond.pos.is_subset(&self.bits) && cond.neg.is_disjoint(&self.bits)
    }
}

/// A possibly negated atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: AtomId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: AtomId) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: AtomId) -> Self {
        Literal { atom, positive: false }
    }
}

/// Conjunction of literals; used for preconditions, run conditions and goals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionSet {
    pos: FixedBitSet,
    neg: FixedBitSet,
}

impl ConditionSet {
    pub fn empty(vocab_len: usize) -> Self {
        ConditionSet {
            pos: FixedBitSet::with_capacity(vocab_len),
            neg: FixedBitSet::with_capacity(vocab_len),
        }
    }

    pub fn from_literals(vocab_len: usize, literals: impl IntoIterator<Item = Literal>) -> Result<Self, LogicError> {
        let mut cond = Self::empty(vocab_len);
        for lit in literals {
            cond.add(lit)?;
        }
        Ok(cond)
    }

    /// Positive-only condition over the given atoms.
    pub fn positive(vocab_len: usize, atoms: impl IntoIterator<Item = AtomId>) -> Self {
        let mut cond = Self::empty(vocab_len);
        for a in atoms {
            cond.pos.grow(a + 1);
            cond.pos.insert(a);
        }
        cond
    }

    pub fn add(&mut self, lit: Literal) -> Result<(), LogicError> {
        let (mine, other) = if lit.positive {
            (&mut self.pos, &self.neg)
        } else {
            (&mut self.neg, &self.pos)
        };
        if other.contains(lit.atom) {
            return Err(LogicError::Contradictory(lit.atom));
        }
        mine.grow(lit.atom + 1);
        mine.insert(lit.atom);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_clear() && self.neg.is_clear()
    }

    pub fn len(&self) -> usize {
        self.pos.count_ones(..) + self.neg.count_ones(..)
    }

    pub fn positives(&self) -> &FixedBitSet {
        &self.pos
    }

    pub fn negatives(&self) -> &FixedBitSet {
        &self.neg
    }

    pub fn has_negatives(&self) -> bool {
        !self.neg.is_clear()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        if lit.positive {
            self.pos.contains(lit.atom)
        } else {
            self.neg.contains(lit.atom)
        }
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.pos
            .ones()
            .map(Literal::pos)
            .chain(self.neg.ones().map(Literal::neg))
    }

    /// Largest atom id referenced, if any.
    pub fn max_atom(&self) -> Option<AtomId> {
        self.pos.maximum().into_iter().chain(self.neg.maximum()).max()
    }

    pub fn union(&self, other: &ConditionSet) -> Result<ConditionSet, LogicError> {
        let mut out = self.clone();
        for lit in other.literals() {
            out.add(lit)?;
        }
        Ok(out)
    }

    /// Literals of `self` that are not in `other`.
    pub fn difference(&self, other: &ConditionSet) -> ConditionSet {
        let mut pos = self.pos.clone();
        pos.difference_with(&other.pos);
        let mut neg = self.neg.clone();
        neg.difference_with(&other.neg);
        ConditionSet { pos, neg }
    }

    pub fn is_subset(&self, other: &ConditionSet) -> bool {
        self.pos.is_subset(&other.pos) && self.neg.is_subset(&other.neg)
    }
}

/// STRIPS add and delete lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EffectSet {
    adds: FixedBitSet,
    deletes: FixedBitSet,
}

impl EffectSet {
    pub fn new(
        vocab_len: usize,
        adds: impl IntoIterator<Item = AtomId>,
        deletes: impl IntoIterator<Item = AtomId>,
    ) -> Result<Self, LogicError> {
        let mut a = FixedBitSet::with_capacity(vocab_len);
        for id in adds {
            a.grow(id + 1);
            a.insert(id);
        }
        let mut d = FixedBitSet::with_capacity(vocab_len);
        for id in deletes {
            d.grow(id + 1);
            d.insert(id);
        }
        if let Some(clash) = a.intersection(&d).next() {
            return Err(LogicError::EffectOverlap(clash));
        }
        Ok(EffectSet { adds: a, deletes: d })
    }

    pub fn empty(vocab_len: usize) -> Self {
        EffectSet {
            adds: FixedBitSet::with_capacity(vocab_len),
            deletes: FixedBitSet::with_capacity(vocab_len),
        }
    }

    pub fn adds(&self) -> &FixedBitSet {
        &self.adds
    }

    pub fn deletes(&self) -> &FixedBitSet {
        &self.deletes
    }

    pub fn max_atom(&self) -> Option<AtomId> {
        self.adds.maximum().into_iter().chain(self.deletes.maximum()).max()
    }
}

fn check_vocab(state: &LogicalState, max: Option<AtomId>) -> Result<(), LogicError> {
    match max {
        Some(id) if id >= state.vocab_len() => Err(LogicError::UnknownAtom(id)),
        _ => Ok(()),
    }
}

/// True iff every positive literal is in `state` and no negative literal is.
pub fn holds(state: &LogicalState, cond: &ConditionSet) -> Result<bool, LogicError> {
    check_vocab(state, cond.max_atom())?;
    Ok(state.satisfies(cond))
}

/// Same test as [`holds`], used where the condition is a goal.
pub fn goal_satisfied(state: &LogicalState, goal: &ConditionSet) -> Result<bool, LogicError> {
    holds(state, goal)
}

/// `(state \ deletes) ∪ adds`. The input is not modified.
pub fn apply_effects(state: &LogicalState, eff: &EffectSet) -> LogicalState {
    let mut bits = state.bits.clone();
    bits.difference_with(&eff.deletes);
    bits.grow(eff.adds.len());
    bits.union_with(&eff.adds);
    LogicalState { bits }
}
