//! Versioned JSON run configuration for the command-line front end.
//!
//! One structured file drives every subcommand; dotted-path `--set`
//! overrides patch the raw JSON before it is validated into typed
//! sections. All randomness flows from the `seed` fields; omitting them
//! selects the fixed default [`DEFAULT_SEED`] so repeated runs stay
//! deterministic.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result as CoreResult;
use crate::grid::TimeGrid;
use crate::params::{
    ModelParams, SolverConfig, DEFAULT_DAMPING, DEFAULT_MAX_ITERS, DEFAULT_N_STEPS,
    DEFAULT_PICARD_TOL,
};

/// Schema version this build understands.
pub const SCHEMA_VERSION: u32 = 1;
/// Seed used when the configuration omits one (fixed, not entropy).
pub const DEFAULT_SEED: u64 = 42;
/// Default ceiling on `n_agents * n_steps * trials` for simulation jobs.
pub const DEFAULT_MAX_SIM_ELEMENTS: u64 = 100_000_000;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub simulation: Option<SimulationSection>,
    #[serde(default)]
    pub study: Option<StudySection>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Artifacts to emit; omitted = everything the subcommand produces.
    #[serde(default)]
    pub emit: Option<Vec<EmitKind>>,
    #[serde(default)]
    pub limits: LimitsSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub sigma: f64,
    pub q: f64,
    pub alpha: f64,
    pub mu0: f64,
    pub v0: f64,
    pub horizon: f64,
}

impl ModelSection {
    pub fn to_params(self) -> CoreResult<ModelParams> {
        ModelParams::new(
            self.a,
            self.b,
            self.r,
            self.sigma,
            self.q,
            self.alpha,
            self.mu0,
            self.v0,
            self.horizon,
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_n_steps")]
    pub n_steps: usize,
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: u32,
    #[serde(default = "default_damping")]
    pub damping: f64,
}

fn default_n_steps() -> usize {
    DEFAULT_N_STEPS
}
fn default_picard_tol() -> f64 {
    DEFAULT_PICARD_TOL
}
fn default_max_iters() -> u32 {
    DEFAULT_MAX_ITERS
}
fn default_damping() -> f64 {
    DEFAULT_DAMPING
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            n_steps: DEFAULT_N_STEPS,
            picard_tol: DEFAULT_PICARD_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            damping: DEFAULT_DAMPING,
        }
    }
}

impl SolverSection {
    pub fn to_config(self, horizon: f64) -> CoreResult<SolverConfig> {
        let grid = TimeGrid::new(horizon, self.n_steps)?;
        SolverConfig::new(grid, self.picard_tol, self.max_iters, self.damping)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub n_agents: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub n_trials: usize,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_trials() -> usize {
    1
}
fn default_substeps() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub n_list: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSection {
    #[serde(default = "default_max_sim_elements")]
    pub max_sim_elements: u64,
}

fn default_max_sim_elements() -> u64 {
    DEFAULT_MAX_SIM_ELEMENTS
}

impl Default for LimitsSection {
    fn default() -> Self {
        Self {
            max_sim_elements: DEFAULT_MAX_SIM_ELEMENTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitKind {
    PathsCsv,
    SummaryJson,
    GapCsv,
    Plotdata,
}

impl RunConfig {
    /// Parses a config file and applies `key=value` overrides (dotted JSON
    /// paths, values parsed as JSON with a bare-string fallback).
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, overrides)
    }

    pub fn from_json(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| ConfigError::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        for entry in overrides {
            apply_override(&mut value, entry)?;
        }
        let config: RunConfig = serde_json::from_value(value)
            .map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema != SCHEMA_VERSION {
            return Err(ConfigError::Invalid(format!(
                "schema: expected version {SCHEMA_VERSION}, got {}",
                self.schema
            )));
        }
        self.model
            .to_params()
            .map_err(|e| ConfigError::Invalid(format!("model.{e}")))?;
        self.solver
            .to_config(self.model.horizon)
            .map_err(|e| ConfigError::Invalid(format!("solver.{e}")))?;
        if let Some(sim) = &self.simulation {
            if sim.n_agents < 2 {
                return Err(ConfigError::Invalid(format!(
                    "simulation.n_agents: population needs at least 2 agents \
                     (the leave-one-out quantile is undefined otherwise), got {}",
                    sim.n_agents
                )));
            }
            if sim.n_trials < 1 {
                return Err(ConfigError::Invalid(
                    "simulation.n_trials: at least one trial is required".to_string(),
                ));
            }
            if sim.substeps < 1 {
                return Err(ConfigError::Invalid(
                    "simulation.substeps: must be at least 1".to_string(),
                ));
            }
        }
        if let Some(study) = &self.study {
            if study.n_list.is_empty() {
                return Err(ConfigError::Invalid(
                    "study.n_list: population list must be nonempty".to_string(),
                ));
            }
            if !study.n_list.windows(2).all(|w| w[0] < w[1]) {
                return Err(ConfigError::Invalid(
                    "study.n_list: population list must be strictly increasing".to_string(),
                ));
            }
            if study.n_list.iter().any(|&n| n < 2) {
                return Err(ConfigError::Invalid(
                    "study.n_list: every population size must be at least 2".to_string(),
                ));
            }
            if study.trials < 1 {
                return Err(ConfigError::Invalid(
                    "study.trials: at least one trial is required".to_string(),
                ));
            }
        }
        Ok(())
    }

    /// Whether an artifact kind should be emitted.
    pub fn emits(&self, kind: EmitKind) -> bool {
        match &self.emit {
            None => true,
            Some(kinds) => kinds.contains(&kind),
        }
    }

    /// Seed for the study subcommand: explicit study seed, else the
    /// simulation seed, else the default.
    pub fn study_seed(&self) -> u64 {
        self.study
            .as_ref()
            .and_then(|s| s.seed)
            .or_else(|| self.simulation.as_ref().map(|s| s.seed))
            .unwrap_or(DEFAULT_SEED)
    }
}

fn apply_override(value: &mut serde_json::Value, entry: &str) -> Result<(), ConfigError> {
    let (path, raw) = entry.split_once('=').ok_or_else(|| {
        ConfigError::Parse(format!("override `{entry}` is not of the form key=value"))
    })?;
    let parsed = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    let mut cursor = value;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, segment) in segments.iter().enumerate() {
        if segment.is_empty() {
            return Err(ConfigError::Parse(format!("override `{entry}` has an empty path segment")));
        }
        let obj = cursor.as_object_mut().ok_or_else(|| {
            ConfigError::Parse(format!("override path `{path}` does not point into an object"))
        })?;
        if i + 1 == segments.len() {
            obj.insert(segment.to_string(), parsed);
            return Ok(());
        }
        cursor = obj
            .entry(segment.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("override paths have at least one segment")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema": 1,
        "model": {"a": -0.15, "b": 0.75, "r": 3.5, "sigma": 1.0, "q": 0.45,
                  "alpha": 0.975, "mu0": 1.0, "v0": 0.5, "horizon": 0.2}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(MINIMAL, &[]).unwrap();
        assert_eq!(cfg.solver.n_steps, 2000);
        assert_eq!(cfg.solver.max_iters, 200);
        assert!(cfg.simulation.is_none());
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        assert!(cfg.emits(EmitKind::PathsCsv));
    }

    #[test]
    fn overrides_patch_nested_fields() {
        let cfg = RunConfig::from_json(
            MINIMAL,
            &[
                "model.q=0".to_string(),
                "solver.n_steps=500".to_string(),
                "simulation={\"n_agents\": 10, \"seed\": 7}".to_string(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.model.q, 0.0);
        assert_eq!(cfg.solver.n_steps, 500);
        assert_eq!(cfg.simulation.unwrap().n_agents, 10);
    }

    #[test]
    fn zero_gain_fails_validation_with_named_field() {
        let err = RunConfig::from_json(MINIMAL, &["model.b=0".to_string()]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("model."), "message was: {msg}");
        assert!(msg.contains("b"), "message was: {msg}");
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let err = RunConfig::from_json(MINIMAL, &["schema=2".to_string()]).unwrap_err();
        assert!(err.to_string().contains("schema"));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = RunConfig::from_json("{\"schema\": 1,,}", &[]).unwrap_err();
        assert!(err.to_string().contains("line"), "got: {err}");
    }

    #[test]
    fn single_agent_population_is_rejected() {
        let err = RunConfig::from_json(
            MINIMAL,
            &["simulation={\"n_agents\": 1}".to_string()],
        )
        .unwrap_err();
        assert!(err.to_string().contains("n_agents"));
    }

    #[test]
    fn study_lists_are_validated() {
        let bad = RunConfig::from_json(
            MINIMAL,
            &["study={\"n_list\": [], \"trials\": 5}".to_string()],
        );
        assert!(bad.is_err());
        let bad = RunConfig::from_json(
            MINIMAL,
            &["study={\"n_list\": [50, 5], \"trials\": 5}".to_string()],
        );
        assert!(bad.is_err());
        let ok = RunConfig::from_json(
            MINIMAL,
            &["study={\"n_list\": [5, 50], \"trials\": 5}".to_string()],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn study_seed_falls_back_to_simulation_then_default() {
        let cfg = RunConfig::from_json(MINIMAL, &[]).unwrap();
        assert_eq!(cfg.study_seed(), DEFAULT_SEED);
        let cfg = RunConfig::from_json(
            MINIMAL,
            &["simulation={\"n_agents\": 5, \"seed\": 9}".to_string()],
        )
        .unwrap();
        assert_eq!(cfg.study_seed(), 9);
        let cfg = RunConfig::from_json(
            MINIMAL,
            &["study={\"n_list\": [5], \"trials\": 1, \"seed\": 3}".to_string()],
        )
        .unwrap();
        assert_eq!(cfg.study_seed(), 3);
    }

    #[test]
    fn emit_set_restricts_artifacts() {
        let cfg = RunConfig::from_json(MINIMAL, &["emit=[\"summary_json\"]".to_string()]).unwrap();
        assert!(cfg.emits(EmitKind::SummaryJson));
        assert!(!cfg.emits(EmitKind::PathsCsv));
    }
}
