//! TOML experiment configuration.
//!
//! ```toml
//! rounds = 1000
//! seeds = [1, 2, 3]
//! step_rule = "adaptive"          # or "fixed", or { constant = 0.01 }
//!
//! [graph]
//! nodes = 20
//! init = { kind = "erdos_renyi", p_edge = 0.3, weight_min = 0.1, weight_max = 1.0 }
//! model = { kind = "switching", times = [166, 500] }
//!
//! [objective]
//! beta = 0.1
//!
//! [[predictors]]
//! kind = "identity"
//!
//! [[predictors]]
//! kind = "data_driven"
//! iterations = 3
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::StepRule;
use crate::objective::ObjectiveParams;
use crate::predictor::{Predictor, DEFAULT_PREDICTION_ITERATIONS};
use crate::sim::{Dynamics, GraphModel, InitGraph, SignalConfig, TrajectoryConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rounds: usize,
    pub seeds: Vec<u64>,
    #[serde(default = "default_step_rule")]
    pub step_rule: StepRule,
    /// Write a graph snapshot every this many rounds; 0 disables snapshots.
    #[serde(default = "default_snapshot_interval")]
    pub snapshot_interval: usize,
    /// Compute comparators, dynamic regret and path variation.
    #[serde(default)]
    pub regret: bool,
    /// Fraction of final rounds averaged for the tail error.
    #[serde(default = "default_tail_fraction")]
    pub tail_fraction: f64,
    /// Uniform starting weight; defaults to `w_max / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_weight: Option<f64>,
    pub graph: GraphSection,
    #[serde(default)]
    pub signal: SignalConfig,
    #[serde(default)]
    pub objective: ObjectiveParams,
    pub predictors: Vec<PredictorSpec>,
    #[serde(default)]
    pub benchmark: BenchmarkSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub nodes: usize,
    #[serde(default)]
    pub init: InitGraph,
    #[serde(default)]
    pub model: GraphModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PredictorSpec {
    Identity,
    /// The model that generated the ground truth (AR, transition or static).
    TruePrior,
    DataDriven {
        #[serde(default = "default_iterations")]
        iterations: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<f64>,
    },
}

impl PredictorSpec {
    /// Name used in output files; non-default data-driven settings are
    /// appended, e.g. `data_driven_p5_s0.2`.
    pub fn label(&self) -> String {
        match self {
            PredictorSpec::Identity => "identity".into(),
            PredictorSpec::TruePrior => "true_prior".into(),
            PredictorSpec::DataDriven { iterations, step } => {
                let mut s = String::from("data_driven");
                if *iterations != DEFAULT_PREDICTION_ITERATIONS {
                    s.push_str(&format!("_p{iterations}"));
                }
                if let Some(a) = step {
                    s.push_str(&format!("_s{a:?}"));
                }
                s
            }
        }
    }

    /// Builds the learner-side predictor for a realized dynamic model.
    pub fn build(&self, dynamics: Option<&Dynamics>) -> Result<Predictor> {
        match self {
            PredictorSpec::Identity => Ok(Predictor::Identity),
            PredictorSpec::TruePrior => {
                dynamics.and_then(Dynamics::true_predictor).ok_or_else(|| {
                    Error::Config("true_prior needs an ar, transition or static model".into())
                })
            }
            PredictorSpec::DataDriven { iterations, step } => {
                Predictor::data_driven(*iterations, *step)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSection {
    /// Candidate `beta` values for the per-predictor search.
    pub beta_grid: Vec<f64>,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    /// Rounds-to-recover: pre-switch window length and tolerance factor.
    pub recovery_window: usize,
    pub recovery_factor: f64,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        Self {
            beta_grid: (-3..=2).map(|k| 10f64.powi(k)).collect(),
            solver_tol: crate::solver::DEFAULT_TOL,
            solver_max_iter: crate::solver::DEFAULT_MAX_ITER,
            recovery_window: 100,
            recovery_factor: 1.1,
        }
    }
}

fn default_step_rule() -> StepRule {
    StepRule::Adaptive
}
fn default_snapshot_interval() -> usize {
    1
}
fn default_tail_fraction() -> f64 {
    0.1
}
fn default_iterations() -> usize {
    DEFAULT_PREDICTION_ITERATIONS
}

impl ExperimentConfig {
    pub fn trajectory(&self, seed: u64) -> TrajectoryConfig {
        TrajectoryConfig {
            nodes: self.graph.nodes,
            rounds: self.rounds,
            model: self.graph.model.clone(),
            init: self.graph.init.clone(),
            w_max: self.objective.w_max,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("seeds must be distinct");
        }
        if self.predictors.is_empty() {
            return bad("at least one predictor is required");
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return bad("tail_fraction must lie in (0, 1]");
        }
        if let Some(w0) = self.init_weight {
            if !(w0 > 0.0 && w0 <= self.objective.w_max) {
                return bad("init_weight must lie in (0, w_max]");
            }
        }
        self.trajectory(self.seeds[0]).validate()?;
        self.signal.validate()?;
        self.objective
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.step_rule
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let mut labels: Vec<String> = self.predictors.iter().map(PredictorSpec::label).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return bad("predictors must be distinct");
        }
        for spec in &self.predictors {
            match spec {
                PredictorSpec::TruePrior
                    if matches!(self.graph.model, GraphModel::Switching { .. }) =>
                {
                    return bad("true_prior is not available for the switching model");
                }
                PredictorSpec::DataDriven { iterations, step } => {
                    Predictor::data_driven(*iterations, *step)
                        .map_err(|e| Error::Config(e.to_string()))?;
                }
                _ => {}
            }
        }
        let b = &self.benchmark;
        if b.beta_grid.is_empty() || b.beta_grid.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return bad("beta_grid must be a non-empty list of positive values");
        }
        if !(b.solver_tol > 0.0) || b.solver_max_iter == 0 {
            return bad("solver_tol must be > 0 and solver_max_iter >= 1");
        }
        if b.recovery_window == 0 || !(b.recovery_factor >= 1.0) {
            return bad("recovery_window must be >= 1 and recovery_factor >= 1");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
