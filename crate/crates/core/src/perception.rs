//! Noisy observation of the true logical state and a majority-vote filter
//! over the last few observations.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{LogicalState, Vocabulary};
use crate::rng::Rng;

pub const DEFAULT_WINDOW: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerceptionError {
    #[error("flip probability {value} for `{name}` must lie in [0, 0.5)")]
    InvalidProbability { name: String, value: f64 },
    #[error("unknown predicate `{0}` in per-predicate flip table")]
    UnknownPredicate(String),
    #[error("window capacity must be at least 1")]
    ZeroWindow,
    #[error("cannot filter an empty window")]
    EmptyWindow,
}

/// Independent per-atom flip probabilities, keyed by predicate name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub default_flip: f64,
    #[serde(default)]
    pub per_predicate_flip: BTreeMap<String, f64>,
}

fn check(name: &str, value: f64) -> Result<(), PerceptionError> {
    // at 0.5 and above the majority vote makes things worse, not better
    if (0.0..0.5).contains(&value) {
        Ok(())
    } else {
        Err(PerceptionError::InvalidProbability {
            name: name.to_string(),
            value,
        })
    }
}

impl NoiseModel {
    pub fn new(default_flip: f64, per_predicate_flip: BTreeMap<String, f64>) -> Result<Self, PerceptionError> {
        let m = NoiseModel {
            default_flip,
            per_predicate_flip,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn uniform(p: f64) -> Result<Self, PerceptionError> {
        Self::new(p, BTreeMap::new())
    }

    pub fn validate(&self) -> Result<(), PerceptionError> {
        check("default", self.default_flip)?;
        for (name, &p) in &self.per_predicate_flip {
            check(name, p)?;
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.default_flip == 0.0 && self.per_predicate_flip.values().all(|&p| p == 0.0)
    }

    /// Flip probability of every atom of `vocab`, by atom id.
    pub fn per_atom(&self, vocab: &Vocabulary) -> Result<Vec<f64>, PerceptionError> {
        self.validate()?;
        for name in self.per_predicate_flip.keys() {
            if !vocab.atoms().iter().any(|a| &a.predicate == name) {
                return Err(PerceptionError::UnknownPredicate(name.clone()));
            }
        }
        Ok(vocab
            .atoms()
            .iter()
            .map(|a| *self.per_predicate_flip.get(&a.predicate).unwrap_or(&self.default_flip))
            .collect())
    }
}

/// Flips each atom of `truth` independently with its own probability.
pub fn observe(truth: &LogicalState, flip: &[f64], rng: &mut Rng) -> LogicalState {
    let mut out = truth.clone();
    for (id, &p) in flip.iter().enumerate() {
        if p > 0.0 && rng.random_bool(p) {
            out.set(id, !truth.contains(id));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct EstimatorWindow {
    capacity: usize,
    buffer: VecDeque<LogicalState>,
}

impl EstimatorWindow {
    pub fn new(capacity: usize) -> Result<Self, PerceptionError> {
        if capacity == 0 {
            return Err(PerceptionError::ZeroWindow);
        }
        Ok(EstimatorWindow {
            capacity,
            buffer: VecDeque::with_capacity(capacity),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn push(&mut self, s: LogicalState) {
        if self.buffer.len() == self.capacity {
            self.buffer.pop_front();
        }
        self.buffer.push_back(s);
    }

    /// An atom is kept iff it is true in strictly more than half of the
    /// buffered estimates; ties go to false.
    pub fn filter(&self) -> Result<LogicalState, PerceptionError> {
        let first = self.buffer.front().ok_or(PerceptionError::EmptyWindow)?;
        let n = first.vocab_len();
        let mut out = LogicalState::empty(n);
        for id in 0..n {
            let votes = self.buffer.iter().filter(|s| s.contains(id)).count();
            if 2 * votes > self.buffer.len() {
                out.insert(id);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerceptionMode {
    /// The estimate is the true state, with no window delay.
    #[default]
    Oracle,
    Noisy,
}

/// Observation plus filtering for one trial.
#[derive(Debug, Clone)]
pub struct Pipeline {
    mode: PerceptionMode,
    flip: Vec<f64>,
    window: EstimatorWindow,
    rng: Rng,
}

impl Pipeline {
    pub fn oracle(rng: Rng) -> Self {
        Pipeline {
            mode: PerceptionMode::Oracle,
            flip: Vec::new(),
            window: EstimatorWindow::new(1).unwrap(),
            rng,
        }
    }

    pub fn noisy(noise: &NoiseModel, vocab: &Vocabulary, window: usize, rng: Rng) -> Result<Self, PerceptionError> {
        Ok(Pipeline {
            mode: PerceptionMode::Noisy,
            flip: noise.per_atom(vocab)?,
            window: EstimatorWindow::new(window)?,
            rng,
        })
    }

    pub fn mode(&self) -> PerceptionMode {
        self.mode
    }

    /// Observes `truth`, pushes the observation, returns the filtered estimate.
    pub fn estimate(&mut self, truth: &LogicalState) -> LogicalState {
        match self.mode {
            PerceptionMode::Oracle => truth.clone(),
            PerceptionMode::Noisy => {
                let obs = observe(truth, &self.flip, &mut self.rng);
                self.window.push(obs);
                self.window.filter().expect("window was just pushed")
            }
        }
    }
}

/// Per-atom error after a majority vote over three i.i.d. observations.
pub fn filtered_error(p: f64) -> f64 {
    p * p * (3.0 - 2.0 * p)
}
