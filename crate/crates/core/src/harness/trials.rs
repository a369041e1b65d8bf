use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::chain::build_chain;
use crate::executive::{Disturbances, Outcome, Status, TickRecord, Trial};
use crate::perception::{PerceptionMode, Pipeline};
use crate::planner::{plan, SearchMode, SearchOptions};
use crate::rng::{stream, Stream};
use crate::sim::Kitchen;

pub const TRACE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u32,
    pub seed: u64,
    pub status: Status,
    pub ticks: u32,
    pub recoveries: u32,
    pub false_success: bool,
    pub plan_length: usize,
    pub operator_history: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn succeeded(&self) -> bool {
        self.status == Status::Succeeded
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub scenario: String,
    pub trials: u32,
    pub successes: u32,
    pub success_rate: f64,
    /// Mean over successful trials only; absent when none succeeded.
    pub mean_ticks: Option<f64>,
    /// Fraction of trials with at least one recovery.
    pub recovery_rate: f64,
    pub false_success_rate: f64,
}

impl Metrics {
    pub fn from_records(scenario: &str, records: &[TrialRecord]) -> Metrics {
        let n = records.len() as f64;
        let ok: Vec<&TrialRecord> = records.iter().filter(|r| r.succeeded()).collect();
        let frac = |k: usize| if records.is_empty() { 0.0 } else { k as f64 / n };
        Metrics {
            scenario: scenario.to_string(),
            trials: records.len() as u32,
            successes: ok.len() as u32,
            success_rate: frac(ok.len()),
            mean_ticks: (!ok.is_empty()).then(|| ok.iter().map(|r| f64::from(r.ticks)).sum::<f64>() / ok.len() as f64),
            recovery_rate: frac(records.iter().filter(|r| r.recoveries > 0).count()),
            false_success_rate: frac(records.iter().filter(|r| r.false_success).count()),
        }
    }
}

#[derive(Serialize)]
struct TraceHeader<'a> {
    format_version: u32,
    scenario: &'a str,
    trial: u32,
    seed: u64,
    config_digest: String,
}

#[derive(Serialize)]
struct TraceFooter<'a> {
    outcome: &'a TrialRecord,
}

/// Runs one trial. With `trace`, also returns its JSON-lines trace: a
/// header, one line per tick, and the outcome.
pub fn run_trial(s: &Scenario, index: u32, trace: bool) -> (TrialRecord, Vec<String>) {
    let seed = s.seed(index);
    let mut lines = Vec::new();
    if trace {
        lines.push(
            serde_json::to_string(&TraceHeader {
                format_version: TRACE_FORMAT_VERSION,
                scenario: &s.file.name,
                trial: index,
                seed,
                config_digest: s.digest(),
            })
            .expect("header serializes"),
        );
    }
    let mut record = TrialRecord {
        index,
        seed,
        status: Status::Stuck,
        ticks: 0,
        recoveries: 0,
        false_success: false,
        plan_length: 0,
        operator_history: Vec::new(),
        error: None,
    };
    match execute(s, seed, trace.then_some(&mut lines)) {
        Ok((plan_length, outcome)) => {
            record.status = outcome.status;
            record.ticks = outcome.ticks;
            record.recoveries = outcome.recoveries;
            record.false_success = outcome.false_success;
            record.plan_length = plan_length;
            record.operator_history = outcome.history.into_iter().map(|h| h.operator).collect();
        }
        Err(e) => record.error = Some(e),
    }
    if trace {
        lines.push(serde_json::to_string(&TraceFooter { outcome: &record }).expect("outcome serializes"));
    }
    (record, lines)
}

fn execute(s: &Scenario, seed: u64, lines: Option<&mut Vec<String>>) -> Result<(usize, Outcome), String> {
    let g = &s.grounded;
    let mut sim_rng = stream(seed, Stream::Sim);
    let sim = Kitchen::sampled(g, s.table.clone(), &s.file.initial, &mut sim_rng).map_err(|e| e.to_string())?;
    let init = sim.truth();
    let goal = g.goal(&s.problem).map_err(|e| e.to_string())?;
    let opts = SearchOptions {
        mode: if s.file.optimal {
            SearchMode::Optimal
        } else {
            SearchMode::Greedy
        },
        ..Default::default()
    };
    let found = plan(g, &init, &goal, opts).map_err(|e| format!("planning failed: {e}"))?;
    let chain = build_chain(g, found.steps(), &goal).map_err(|e| e.to_string())?;
    let perception_rng = stream(seed, Stream::Perception);
    let perception = match s.file.perception.mode {
        PerceptionMode::Oracle => Pipeline::oracle(perception_rng),
        PerceptionMode::Noisy => {
            Pipeline::noisy(&s.noise, &g.vocab, s.file.perception.window, perception_rng).map_err(|e| e.to_string())?
        }
    };
    let mut trial = Trial {
        g,
        chain: &chain,
        sim,
        perception,
        disturbances: Disturbances::new(&s.file.disturbances),
        prim_rng: stream(seed, Stream::Primitives),
        sim_rng,
    };
    let cfg = s.exec_config();
    let outcome = match lines {
        Some(lines) => {
            let mut sink = |r: TickRecord| lines.push(serde_json::to_string(&r).expect("tick serializes"));
            trial.run(&cfg, Some(&mut sink))
        }
        None => trial.run(&cfg, None),
    }
    .map_err(|e| e.to_string())?;
    Ok((found.len(), outcome))
}

/// Runs every trial of `s`, on `jobs` threads when given. Results are in
/// trial order and do not depend on the thread count.
pub fn run_trials(s: &Scenario, jobs: Option<usize>) -> (Metrics, Vec<TrialRecord>) {
    let work = || -> Vec<TrialRecord> {
        (0..s.file.trials)
            .into_par_iter()
            .map(|i| run_trial(s, i, false).0)
            .collect()
    };
    let records = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    (Metrics::from_records(&s.file.name, &records), records)
}
