//! `rchain`: plan, build chains, run scenarios and tabulate results.
//!
//! Exit status: 0 on success, 1 when a run or check fails, 2 on bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reactive_chain::chain::{build_chain, verify_chain, ChainError, ChainFile};
use reactive_chain::domain::{parse_domain, parse_problem, render_diagnostics};
use reactive_chain::harness::{load_scenario, report, run_trial, run_trials, Metrics, Scenario};
use reactive_chain::planner::{ground, plan, GroundedDomain, Plan, PlanError, PlanStep, SearchOptions};

#[derive(Parser)]
#[command(
    name = "rchain",
    version,
    about = "Symbolic planning and reactive execution for a simulated kitchen"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a plan and write it as a JSON array of {operator, args}.
    Plan {
        #[command(flatten)]
        task: Task,
        /// Breadth-first search for a shortest plan.
        #[arg(long)]
        optimal: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a plan into an operator chain with regressed conditions.
    Chain {
        #[command(flatten)]
        task: Task,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one trial of a scenario and print its record.
    Execute {
        #[arg(long)]
        scenario: PathBuf,
        /// Seed for this trial; defaults to the scenario's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON-lines trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        optimal: bool,
    },
    /// Run every trial of each scenario and print a summary table.
    Bench {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the trial count.
        #[arg(long)]
        trials: Option<u32>,
        #[arg(long)]
        optimal: bool,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        jobs: Option<usize>,
        /// Directory for one trace file per trial.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the metrics as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate metrics files written by `bench --out`.
    Report {
        #[arg(required = true)]
        metrics: Vec<PathBuf>,
        /// Print the merged metrics as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Task {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
}

enum Failure {
    Input(String),
    Check(String),
}

type Result<T> = std::result::Result<T, Failure>;

fn input(e: impl ToString) -> Failure {
    Failure::Input(e.to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

struct Loaded {
    g: GroundedDomain,
    init: reactive_chain::logic::LogicalState,
    goal: reactive_chain::logic::ConditionSet,
}

fn load_task(t: &Task) -> Result<Loaded> {
    let domain = parse_domain(&read(&t.domain)?)
        .map_err(|d| input(format!("{}:\n{}", t.domain.display(), render_diagnostics(&d))))?;
    let problem = parse_problem(&read(&t.problem)?, &domain)
        .map_err(|d| input(format!("{}:\n{}", t.problem.display(), render_diagnostics(&d))))?;
    let g = ground(&domain, &problem).map_err(input)?;
    let init = g.init_state(&problem).map_err(input)?;
    let goal = g.goal(&problem).map_err(input)?;
    Ok(Loaded { g, init, goal })
}

fn plan_error(e: PlanError) -> Failure {
    match e {
        PlanError::UnknownOperator(_) | PlanError::Logic(_) => input(e),
        _ => Failure::Check(e.to_string()),
    }
}

fn scenario(path: &Path, seed: Option<u64>, trials: Option<u32>, optimal: bool) -> Result<Scenario> {
    let mut s = load_scenario(path).map_err(input)?;
    if let Some(seed) = seed {
        s.file.base_seed = seed;
    }
    if let Some(n) = trials {
        if n == 0 {
            return Err(input("--trials must be at least 1"));
        }
        s.file.trials = n;
    }
    s.file.optimal |= optimal;
    Ok(s)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Plan { task, optimal, out } => {
            let t = load_task(&task)?;
            let opts = if optimal {
                SearchOptions::optimal()
            } else {
                SearchOptions::default()
            };
            let found = plan(&t.g, &t.init, &t.goal, opts).map_err(plan_error)?;
            write(out.as_deref(), &to_json(&found.to_steps(&t.g)))
        }
        Command::Chain { task, plan, out } => {
            let t = load_task(&task)?;
            let steps: Vec<PlanStep> =
                serde_json::from_str(&read(&plan)?).map_err(|e| input(format!("{}: {e}", plan.display())))?;
            let checked = Plan::from_steps(&t.g, &steps, &t.init, &t.goal).map_err(plan_error)?;
            let chain = build_chain(&t.g, checked.steps(), &t.goal).map_err(|e| match e {
                ChainError::Inconsistent { .. } => Failure::Check(e.to_string()),
                _ => input(e),
            })?;
            if !verify_chain(&t.g, &chain, &t.init) {
                return Err(Failure::Check("chain does not verify from the initial state".into()));
            }
            write(out.as_deref(), &to_json(&ChainFile::from_chain(&t.g, &chain)))
        }
        Command::Execute {
            scenario: path,
            seed,
            trace,
            optimal,
        } => {
            let s = scenario(&path, seed, Some(1), optimal)?;
            let (record, lines) = run_trial(&s, 0, trace.is_some());
            if let Some(p) = &trace {
                write(Some(p), &(lines.join("\n") + "\n"))?;
            }
            write(None, &to_json(&record))?;
            match record.error {
                Some(e) => Err(Failure::Check(e)),
                None => Ok(()),
            }
        }
        Command::Bench {
            scenarios,
            seed,
            trials,
            optimal,
            jobs,
            trace,
            out,
        } => {
            let loaded = scenarios
                .iter()
                .map(|p| scenario(p, seed, trials, optimal))
                .collect::<Result<Vec<_>>>()?;
            if let Some(dir) = &trace {
                fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
            }
            let mut all = Vec::new();
            let mut errors = Vec::new();
            for (s, path) in loaded.iter().zip(&scenarios) {
                let (m, records) = run_trials(s, jobs);
                errors.extend(records.iter().filter_map(|r| {
                    r.error
                        .as_ref()
                        .map(|e| format!("{} trial {}: {e}", s.file.name, r.index))
                }));
                if let Some(dir) = &trace {
                    let stem = path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy());
                    for i in 0..s.file.trials {
                        let (_, lines) = run_trial(s, i, true);
                        write(
                            Some(&dir.join(format!("{stem}-{i:04}.jsonl"))),
                            &(lines.join("\n") + "\n"),
                        )?;
                    }
                }
                all.push(m);
            }
            write(None, &report(&all).map_err(input)?)?;
            if let Some(p) = &out {
                write(Some(p), &to_json(&all))?;
            }
            if errors.is_empty() {
                Ok(())
            } else {
                Err(Failure::Check(errors.join("\n")))
            }
        }
        Command::Report { metrics, json } => {
            let mut all: Vec<Metrics> = Vec::new();
            for p in &metrics {
                let text = read(p)?;
                let value: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", p.display())))?;
                let parsed = if value.is_array() {
                    serde_json::from_value(value)
                } else {
                    serde_json::from_value(value).map(|m| vec![m])
                };
                all.extend(parsed.map_err(|e| input(format!("{}: {e}", p.display())))?);
            }
            if json {
                write(None, &to_json(&all))
            } else {
                write(None, &report(&all).map_err(input)?)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("rchain: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("rchain: {msg}");
            ExitCode::from(2)
        }
    }
}
