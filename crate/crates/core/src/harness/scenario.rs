use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::domain::{parse_domain, parse_problem, render_diagnostics, DomainDefinition, ProblemDefinition};
use crate::executive::{ExecConfig, Mode, DEFAULT_GOAL_STREAK, DEFAULT_STUCK_TICKS};
use crate::perception::{NoiseModel, PerceptionMode, DEFAULT_WINDOW};
use crate::planner::{ground, GroundError, GroundedDomain};
use crate::sim::{movable_objects, Disturbance, InitialConfig, PrimitiveTable, PrimitivesConfig};

pub const SCENARIO_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("scenario field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("domain:\n{0}")]
    Domain(String),
    #[error("problem:\n{0}")]
    Problem(String),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

fn schema(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerceptionConfig {
    #[serde(default)]
    pub mode: PerceptionMode,
    #[serde(default)]
    pub default_flip: f64,
    #[serde(default)]
    pub per_predicate_flip: BTreeMap<String, f64>,
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_window() -> usize {
    DEFAULT_WINDOW
}

impl Default for PerceptionConfig {
    fn default() -> Self {
        PerceptionConfig {
            mode: PerceptionMode::Oracle,
            default_flip: 0.0,
            per_predicate_flip: BTreeMap::new(),
            window: DEFAULT_WINDOW,
        }
    }
}

fn default_goal_streak() -> u32 {
    DEFAULT_GOAL_STREAK
}

fn default_stuck_ticks() -> u32 {
    DEFAULT_STUCK_TICKS
}

/// The on-disk scenario (`*.json`). Paths are relative to the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub format_version: u32,
    pub name: String,
    pub domain: String,
    pub problem: String,
    pub executive: Mode,
    #[serde(default)]
    pub perception: PerceptionConfig,
    #[serde(default)]
    pub primitives: PrimitivesConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub disturbances: Vec<Disturbance>,
    /// Plan with breadth-first search instead of greedy search.
    #[serde(default)]
    pub optimal: bool,
    #[serde(default = "default_goal_streak")]
    pub goal_streak: u32,
    #[serde(default = "default_stuck_ticks")]
    pub stuck_ticks: u32,
    pub max_ticks: u32,
    pub trials: u32,
    pub base_seed: u64,
}

/// A validated scenario with its domain and problem loaded and grounded.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub domain_src: String,
    pub problem_src: String,
    pub domain: DomainDefinition,
    pub problem: ProblemDefinition,
    pub grounded: GroundedDomain,
    pub table: PrimitiveTable,
    pub noise: NoiseModel,
}

pub fn parse_scenario_json(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        schema(&field, e.inner().to_string())
    })
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let file = parse_scenario_json(&read(path)?)?;
    let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let domain_src = read(&base.join(&file.domain))?;
    let problem_src = read(&base.join(&file.problem))?;
    Scenario::from_sources(file, domain_src, problem_src)
}

impl Scenario {
    pub fn from_sources(
        file: ScenarioFile,
        domain_src: String,
        problem_src: String,
    ) -> Result<Scenario, ScenarioError> {
        if file.format_version != SCENARIO_FORMAT_VERSION {
            return Err(schema(
                "format_version",
                format!("unsupported version {}", file.format_version),
            ));
        }
        if file.trials == 0 {
            return Err(schema("trials", "must be at least 1"));
        }
        if file.max_ticks == 0 {
            return Err(schema("max_ticks", "must be at least 1"));
        }
        let domain = parse_domain(&domain_src).map_err(|d| ScenarioError::Domain(render_diagnostics(&d)))?;
        let problem =
            parse_problem(&problem_src, &domain).map_err(|d| ScenarioError::Problem(render_diagnostics(&d)))?;
        let grounded = ground(&domain, &problem)?;
        let table = PrimitiveTable::configured(&file.primitives).map_err(|e| schema("primitives", e.to_string()))?;
        file.initial
            .validate(movable_objects(&grounded).len())
            .map_err(|e| schema("initial", e.to_string()))?;
        let p = &file.perception;
        let noise = NoiseModel::new(p.default_flip, p.per_predicate_flip.clone())
            .map_err(|e| schema("perception", e.to_string()))?;
        noise
            .per_atom(&grounded.vocab)
            .map_err(|e| schema("perception.per_predicate_flip", e.to_string()))?;
        if p.window == 0 {
            return Err(schema("perception.window", "must be at least 1"));
        }
        for (i, d) in file.disturbances.iter().enumerate() {
            check_disturbance(&grounded, d).map_err(|m| schema(&format!("disturbances[{i}]"), m))?;
        }
        // fail early if the simulator cannot evaluate this vocabulary
        crate::sim::Evaluator::new(&grounded.vocab, &movable_objects(&grounded))
            .map_err(|e| schema("domain", e.to_string()))?;
        Ok(Scenario {
            file,
            domain_src,
            problem_src,
            domain,
            problem,
            grounded,
            table,
            noise,
        })
    }

    pub fn exec_config(&self) -> ExecConfig {
        ExecConfig {
            mode: self.file.executive,
            max_ticks: self.file.max_ticks,
            goal_streak: self.file.goal_streak,
            stuck_ticks: self.file.stuck_ticks,
        }
    }

    /// SHA-256 over the scenario and the domain and problem texts.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_string(&self.file).expect("scenario serializes"));
        h.update([0]);
        h.update(&self.domain_src);
        h.update([0]);
        h.update(&self.problem_src);
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn seed(&self, index: u32) -> u64 {
        self.file.base_seed.wrapping_add(u64::from(index))
    }
}

fn check_disturbance(g: &GroundedDomain, d: &Disturbance) -> Result<(), String> {
    use crate::sim::{DisturbanceKind, Trigger};
    match &d.trigger {
        Trigger::WhenOperator(name) => {
            let known = g
                .operators
                .iter()
                .any(|o| d.trigger.matches_operator(&o.name(), &o.schema));
            if !known {
                return Err(format!("unknown operator `{name}`"));
            }
        }
        Trigger::WhenPredicate(atom) => {
            if g.vocab.find(atom).is_none() {
                return Err(format!("unknown atom `{atom}`"));
            }
        }
        Trigger::AtTick(_) => {}
    }
    match &d.kind {
        DisturbanceKind::TeleportObject { object, .. } if !movable_objects(g).contains(object) => {
            Err(format!("unknown object `{object}`"))
        }
        DisturbanceKind::SetDrawer { extension } if !(0.0..=1.0).contains(extension) => {
            Err(format!("drawer extension {extension} outside [0, 1]"))
        }
        _ => Ok(()),
    }
}
