//! Browser bindings for the kitchen demo in `www/`. Every export takes and
//! returns plain strings (JSON) so the page needs no generated glue types.

use std::path::Path;

use reactive_chain::chain::{build_chain, condition_names};
use reactive_chain::executive::Mode;
use reactive_chain::harness::{parse_scenario_json, run_trial, Scenario};
use reactive_chain::kitchen;
use reactive_chain::perception::filtered_error;
use reactive_chain::planner::{ground, plan, SearchOptions};
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

const PRESETS: &[(&str, &str)] = &[
    (
        "put_away_spam",
        include_str!("../../../data/scenarios/put_away_spam_stochastic.json"),
    ),
    (
        "teleport_cage",
        include_str!("../../../data/scenarios/teleport_cage_reactive.json"),
    ),
    (
        "noisy",
        include_str!("../../../data/scenarios/put_away_spam_noisy.json"),
    ),
    (
        "put_away_both_disturbed",
        include_str!("../../../data/scenarios/put_away_both_disturbed.json"),
    ),
];

/// Plans from the two-object kitchen start state to `goal`, a list of atom
/// names separated by spaces or commas. Returns the plan and its chain.
#[wasm_bindgen]
pub fn plan_goal(goal: &str, optimal: bool) -> Result<String, String> {
    let d = kitchen::domain();
    let p = kitchen::problem(&d, "put_away_both").ok_or("missing kitchen problem")?;
    let g = ground(&d, &p).map_err(|e| e.to_string())?;
    let init = g.init_state(&p).map_err(|e| e.to_string())?;
    let names: Vec<&str> = goal.split([' ', ',', '\n']).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err("empty goal".into());
    }
    let goal = g.condition_from_names(&names).map_err(|e| e.to_string())?;
    let opts = if optimal {
        SearchOptions::optimal()
    } else {
        SearchOptions::default()
    };
    let found = plan(&g, &init, &goal, opts).map_err(|e| e.to_string())?;
    let chain = build_chain(&g, found.steps(), &goal).map_err(|e| e.to_string())?;
    let steps: Vec<_> = chain
        .steps
        .iter()
        .map(|s| {
            json!({
                "operator": g.op(s.op).name(),
                "extra_pre": condition_names(&g, &s.extra_pre),
                "extra_run": condition_names(&g, &s.extra_run),
            })
        })
        .collect();
    Ok(json!({ "steps": steps }).to_string())
}

/// Names accepted by [`run_preset`].
#[wasm_bindgen]
pub fn preset_names() -> String {
    json!(PRESETS.iter().map(|(n, _)| *n).collect::<Vec<_>>()).to_string()
}

/// Runs one trial of a shipped scenario and returns its JSON-lines trace.
#[wasm_bindgen]
pub fn run_preset(name: &str, reactive: bool, seed: u32) -> Result<String, String> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| format!("unknown preset `{name}`"))?;
    let mut file = parse_scenario_json(text).map_err(|e| e.to_string())?;
    file.executive = if reactive { Mode::Reactive } else { Mode::OpenLoop };
    file.base_seed = u64::from(seed);
    let problem = Path::new(&file.problem)
        .file_stem()
        .and_then(|s| s.to_str())
        .and_then(kitchen::problem_source)
        .ok_or("preset names an unknown problem")?;
    let s =
        Scenario::from_sources(file, kitchen::DOMAIN.to_string(), problem.to_string()).map_err(|e| e.to_string())?;
    let (_, lines) = run_trial(&s, 0, true);
    Ok(lines.join("\n"))
}

/// Per-atom error before and after the three-frame majority filter, at
/// `points` flip probabilities spread over [0, 0.5).
#[wasm_bindgen]
pub fn filter_curve(points: u32) -> String {
    let n = points.max(2);
    let rows: Vec<_> = (0..n)
        .map(|i| {
            let p = 0.5 * f64::from(i) / f64::from(n);
            json!({ "p": p, "raw": p, "filtered": filtered_error(p) })
        })
        .collect();
    json!(rows).to_string()
}
