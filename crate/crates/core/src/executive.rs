//! The reactive loop: estimate the logical state, pick the highest-priority
//! chain step that may be entered or continued, drive its primitive.

use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::logic::LogicalState;
use crate::perception::Pipeline;
use crate::planner::GroundedDomain;
use crate::rng::Rng;
use crate::sim::{Disturbance, Kitchen, Phase, PrimitiveState, SimError, Trigger};

pub const DEFAULT_GOAL_STREAK: u32 = 3;
pub const DEFAULT_STUCK_TICKS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    EnterNew,
    ContinueCurrent,
    NoneEnterable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub selected: Option<usize>,
    pub reason: Reason,
}

/// Scans from the last step down; the first step that can be entered (or,
/// for the current one, continued) wins.
pub fn select_operator(chain: &Chain, l: &LogicalState, current: Option<usize>) -> Decision {
    for (i, step) in chain.steps.iter().enumerate().rev() {
        if Some(i) != current && l.satisfies(&step.pre) {
            return Decision {
                selected: Some(i),
                reason: Reason::EnterNew,
            };
        }
        if Some(i) == current && l.satisfies(&step.run) {
            return Decision {
                selected: Some(i),
                reason: Reason::ContinueCurrent,
            };
        }
    }
    Decision {
        selected: None,
        reason: Reason::NoneEnterable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Succeeded,
    Stuck,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Reactive,
    OpenLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecConfig {
    pub mode: Mode,
    pub max_ticks: u32,
    pub goal_streak: u32,
    pub stuck_ticks: u32,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            mode: Mode::Reactive,
            max_ticks: 400,
            goal_streak: DEFAULT_GOAL_STREAK,
            stuck_ticks: DEFAULT_STUCK_TICKS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub tick: u32,
    pub step: usize,
    pub operator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Status,
    pub ticks: u32,
    /// Steps in the order they were entered; retries of the same step are
    /// not repeated.
    pub history: Vec<HistoryEntry>,
    /// Entries whose step index is lower than the previously entered one.
    pub recoveries: u32,
    /// Success was declared while the true state missed the goal.
    pub false_success: bool,
}

/// One line of a run trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u32,
    pub true_atoms: Vec<String>,
    pub estimated_atoms: Vec<String>,
    pub selected_operator: Option<String>,
    /// `enter_new`, `continue_current`, `none_enterable`, or `goal_holding`
    /// while the success streak builds up.
    pub reason: String,
    pub primitive_phase: Option<Phase>,
    pub disturbances_fired: Vec<String>,
}

/// Pending scripted disturbances; each fires at most once.
#[derive(Debug, Clone)]
pub struct Disturbances {
    pending: Vec<(Disturbance, bool)>,
}

impl Disturbances {
    pub fn new(list: &[Disturbance]) -> Self {
        Disturbances {
            pending: list.iter().cloned().map(|d| (d, false)).collect(),
        }
    }

    /// Fires every unfired disturbance whose trigger holds after `tick`.
    fn fire(
        &mut self,
        tick: u32,
        g: &GroundedDomain,
        sim: &mut Kitchen,
        running: Option<&PrimitiveState>,
        rng: &mut Rng,
    ) -> Result<Vec<String>, SimError> {
        let mut fired = Vec::new();
        for (d, done) in &mut self.pending {
            if *done {
                continue;
            }
            let hit = match &d.trigger {
                Trigger::AtTick(t) => *t == tick,
                Trigger::WhenOperator(_) => running.is_some_and(|p| {
                    let op = g.op(p.op);
                    p.is_running() && d.trigger.matches_operator(&op.name(), &op.schema)
                }),
                Trigger::WhenPredicate(atom) => g.vocab.find(atom).is_some_and(|id| sim.truth().contains(id)),
            };
            if hit {
                sim.apply_disturbance(&d.kind, rng)?;
                *done = true;
                fired.push(d.kind.to_string());
            }
        }
        Ok(fired)
    }
}

/// Everything one trial owns.
pub struct Trial<'a> {
    pub g: &'a GroundedDomain,
    pub chain: &'a Chain,
    pub sim: Kitchen,
    pub perception: Pipeline,
    pub disturbances: Disturbances,
    /// Draws primitive durations and success.
    pub prim_rng: Rng,
    /// Draws disturbance destinations.
    pub sim_rng: Rng,
}

fn names(g: &GroundedDomain, s: &LogicalState) -> Vec<String> {
    g.vocab.names(s)
}

impl Trial<'_> {
    /// Runs until success, a dead end, or the tick budget. `trace` receives
    /// one record per tick when given.
    pub fn run(
        &mut self,
        cfg: &ExecConfig,
        mut trace: Option<&mut dyn FnMut(TickRecord)>,
    ) -> Result<Outcome, SimError> {
        match cfg.mode {
            Mode::Reactive => self.run_reactive(cfg, &mut trace),
            Mode::OpenLoop => self.run_open_loop(cfg, &mut trace),
        }
    }

    fn enter(&mut self, step: usize) -> Result<PrimitiveState, SimError> {
        let op = self.g.op(self.chain.steps[step].op);
        self.sim.start_primitive(op, &mut self.prim_rng)
    }

    fn run_reactive(
        &mut self,
        cfg: &ExecConfig,
        trace: &mut Option<&mut dyn FnMut(TickRecord)>,
    ) -> Result<Outcome, SimError> {
        let g = self.g;
        let goal = &self.chain.goal;
        let mut out = Outcome {
            status: Status::Running,
            ticks: 0,
            history: Vec::new(),
            recoveries: 0,
            false_success: false,
        };
        let mut current: Option<usize> = None;
        let mut primitive: Option<PrimitiveState> = None;
        let mut last_entered: Option<usize> = None;
        let mut streak = 0u32;
        let mut idle = 0u32;

        for tick in 0..cfg.max_ticks {
            out.ticks = tick + 1;
            let truth = self.sim.truth();
            let est = self.perception.estimate(&truth);
            streak = if est.satisfies(goal) { streak + 1 } else { 0 };

            let reason;
            let mut selected = None;
            if streak >= cfg.goal_streak.max(1) {
                out.status = Status::Succeeded;
                out.false_success = !truth.satisfies(goal);
                reason = "goal_holding".to_string();
            } else if streak > 0 {
                // hold still while the goal is confirmed
                reason = "goal_holding".to_string();
            } else {
                let d = select_operator(self.chain, &est, current);
                match d.selected {
                    None => {
                        idle += 1;
                        if idle >= cfg.stuck_ticks {
                            out.status = Status::Stuck;
                        }
                    }
                    Some(i) => {
                        idle = 0;
                        selected = Some(i);
                        let finished = primitive.as_ref().is_none_or(|p| !p.is_running());
                        if d.reason == Reason::EnterNew || finished {
                            if let Some(p) = primitive.as_mut() {
                                self.sim.abort(p);
                            }
                            primitive = Some(self.enter(i)?);
                        }
                        if d.reason == Reason::EnterNew {
                            if last_entered.is_some_and(|prev| i < prev) {
                                out.recoveries += 1;
                            }
                            last_entered = Some(i);
                            out.history.push(HistoryEntry {
                                tick,
                                step: i,
                                operator: g.op(self.chain.steps[i].op).name(),
                            });
                        }
                        current = Some(i);
                        let p = primitive.as_mut().expect("just ensured");
                        self.sim.tick(p, &mut self.prim_rng);
                    }
                }
                reason = match d.reason {
                    Reason::EnterNew => "enter_new",
                    Reason::ContinueCurrent => "continue_current",
                    Reason::NoneEnterable => "none_enterable",
                }
                .to_string();
            }

            let fired = if out.status == Status::Running {
                self.disturbances
                    .fire(tick, g, &mut self.sim, primitive.as_ref(), &mut self.sim_rng)?
            } else {
                Vec::new()
            };
            if let Some(sink) = trace.as_mut() {
                sink(TickRecord {
                    tick,
                    true_atoms: names(g, &truth),
                    estimated_atoms: names(g, &est),
                    selected_operator: selected.map(|i| g.op(self.chain.steps[i].op).name()),
                    reason,
                    primitive_phase: selected.and(primitive.as_ref().map(|p| p.phase)),
                    disturbances_fired: fired,
                });
            }
            if out.status != Status::Running {
                return Ok(out);
            }
        }
        out.status = Status::BudgetExhausted;
        Ok(out)
    }

    /// Baseline: runs the steps strictly in order, moving on whenever a
    /// primitive ends, successful or not. Never re-selects.
    fn run_open_loop(
        &mut self,
        cfg: &ExecConfig,
        trace: &mut Option<&mut dyn FnMut(TickRecord)>,
    ) -> Result<Outcome, SimError> {
        let g = self.g;
        let goal = &self.chain.goal;
        let mut out = Outcome {
            status: Status::Running,
            ticks: 0,
            history: Vec::new(),
            recoveries: 0,
            false_success: false,
        };
        let mut next = 0usize;
        let mut primitive: Option<PrimitiveState> = None;
        let mut streak = 0u32;

        for tick in 0..cfg.max_ticks {
            out.ticks = tick + 1;
            let truth = self.sim.truth();
            streak = if truth.satisfies(goal) { streak + 1 } else { 0 };
            let mut selected = None;
            let reason;
            if streak >= cfg.goal_streak.max(1) {
                out.status = Status::Succeeded;
                reason = "goal_holding";
            } else if streak > 0 {
                reason = "goal_holding";
            } else if primitive.as_ref().is_none_or(|p| !p.is_running()) && next == self.chain.len() {
                out.status = Status::Stuck;
                reason = "none_enterable";
            } else {
                if primitive.as_ref().is_none_or(|p| !p.is_running()) {
                    let op = self.chain.steps[next].op;
                    out.history.push(HistoryEntry {
                        tick,
                        step: next,
                        operator: g.op(op).name(),
                    });
                    primitive = Some(self.enter(next)?);
                    next += 1;
                    reason = "enter_new";
                } else {
                    reason = "continue_current";
                }
                let p = primitive.as_mut().expect("just ensured");
                self.sim.tick(p, &mut self.prim_rng);
                selected = Some(p.op);
            }
            let fired = if out.status == Status::Running {
                self.disturbances
                    .fire(tick, g, &mut self.sim, primitive.as_ref(), &mut self.sim_rng)?
            } else {
                Vec::new()
            };
            if let Some(sink) = trace.as_mut() {
                sink(TickRecord {
                    tick,
                    true_atoms: names(g, &truth),
                    estimated_atoms: names(g, &truth),
                    selected_operator: selected.map(|op| g.op(op).name()),
                    reason: reason.to_string(),
                    primitive_phase: selected.and(primitive.as_ref().map(|p| p.phase)),
                    disturbances_fired: fired,
                });
            }
            if out.status != Status::Running {
                return Ok(out);
            }
        }
        out.status = Status::BudgetExhausted;
        Ok(out)
    }
}
