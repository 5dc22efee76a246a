//! Experiment configuration: JSON files with a `kind` discriminator and
//! kind-specific parameters.  Unknown keys are rejected by name, defaults
//! are materialized at parse time so the manifest can echo the effective
//! configuration.

use std::fs;
use std::path::Path;

use clusterpeierls_core::graphgen::{
    build_lattice, build_long_range, build_path, build_ring, Boundary, Graph, LatticeSpec,
};
use clusterpeierls_core::ising::InitState;
use clusterpeierls_core::mbqc::{compile_su2_pattern, MeasurementPattern};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config is not valid JSON: {0}")]
    Json(String),
    #[error("config must be a JSON object with a string \"kind\" field")]
    MissingKind,
    #[error("unknown experiment kind {kind:?} (expected one of {expected})")]
    UnknownKind { kind: String, expected: &'static str },
    #[error("invalid {kind} config: {detail}")]
    Invalid { kind: &'static str, detail: String },
    #[error("cannot load referenced file {path:?}: {detail}")]
    Referenced { path: String, detail: String },
}

const KNOWN_KINDS: &str = "ising-sweep, mbqc-run, analogy-trace, peierls-table, tcrit-table";

fn default_j() -> f64 {
    1.0
}
fn default_boundary() -> Boundary {
    Boundary::Periodic
}
fn default_sweeps() -> usize {
    10_000
}
fn default_equilibration() -> usize {
    10_000
}
fn default_init() -> InitState {
    InitState::Ordered
}
fn default_true() -> bool {
    true
}
fn default_d_min() -> u64 {
    2
}

/// Graph selection shared by the quantum experiment kinds.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphConfig {
    Path { n: usize },
    Ring { n: usize },
    Lattice { dims: Vec<usize>, #[serde(default = "default_boundary")] boundary: Boundary },
    LongRange { n: usize, alpha: f64, p0: f64, seed: u64 },
    File { path: String },
}

impl GraphConfig {
    pub fn build(&self) -> Result<Graph, ConfigError> {
        let wrap = |r: Result<Graph, clusterpeierls_core::graphgen::GraphError>,
                    kind: &'static str| {
            r.map_err(|e| ConfigError::Invalid {
                kind,
                detail: e.to_string(),
            })
        };
        match self {
            GraphConfig::Path { n } => wrap(build_path(*n), "graph.path"),
            GraphConfig::Ring { n } => wrap(build_ring(*n), "graph.ring"),
            GraphConfig::Lattice { dims, boundary } => {
                let spec = LatticeSpec::new(dims.clone(), *boundary).map_err(|e| {
                    ConfigError::Invalid {
                        kind: "graph.lattice",
                        detail: e.to_string(),
                    }
                })?;
                wrap(build_lattice(&spec), "graph.lattice")
            }
            GraphConfig::LongRange { n, alpha, p0, seed } => wrap(
                build_long_range(*n, *alpha, *p0, *seed),
                "graph.long-range",
            ),
            GraphConfig::File { path } => {
                let text = fs::read_to_string(path).map_err(|e| ConfigError::Referenced {
                    path: path.clone(),
                    detail: e.to_string(),
                })?;
                Graph::from_json(&text).map_err(|e| ConfigError::Referenced {
                    path: path.clone(),
                    detail: e.to_string(),
                })
            }
        }
    }
}

/// Pattern selection: an Euler-rotation chain compiled on the spot, or a
/// pattern JSON loaded (and validated) from disk.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PatternConfig {
    Su2 { alpha: f64, beta: f64, gamma: f64 },
    File { path: String },
}

impl PatternConfig {
    pub fn load(&self) -> Result<MeasurementPattern, ConfigError> {
        match self {
            PatternConfig::Su2 { alpha, beta, gamma } => {
                Ok(compile_su2_pattern(*alpha, *beta, *gamma))
            }
            PatternConfig::File { path } => {
                let text = fs::read_to_string(path).map_err(|e| ConfigError::Referenced {
                    path: path.clone(),
                    detail: e.to_string(),
                })?;
                MeasurementPattern::from_json(&text).map_err(|e| ConfigError::Referenced {
                    path: path.clone(),
                    detail: e.to_string(),
                })
            }
        }
    }
}

/// Metropolis temperature sweep over a hypercubic lattice.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IsingSweepConfig {
    pub dims: Vec<usize>,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
    #[serde(default = "default_j")]
    pub j: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_step: f64,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    #[serde(default = "default_equilibration")]
    pub equilibration: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_init")]
    pub init: InitState,
}

impl IsingSweepConfig {
    /// Inclusive temperature grid, generated by index so the endpoint is
    /// stable against accumulated rounding.
    pub fn temperatures(&self) -> Vec<f64> {
        let mut temps = Vec::new();
        if self.t_step <= 0.0 {
            return temps;
        }
        let mut i = 0u64;
        loop {
            let t = self.t_min + self.t_step * i as f64;
            if t > self.t_max + self.t_step * 0.5 {
                break;
            }
            temps.push(t);
            i += 1;
        }
        temps
    }
}

/// Single pattern execution with a per-step record.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MbqcRunConfig {
    pub graph: GraphConfig,
    pub pattern: PatternConfig,
    #[serde(default)]
    pub seed: u64,
}

/// Instrumented pattern execution recording the thermodynamic columns.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnalogyTraceConfig {
    pub graph: GraphConfig,
    pub pattern: PatternConfig,
    #[serde(default = "default_true")]
    pub capacity: bool,
    #[serde(default)]
    pub seed: u64,
}

/// Closed-form domain-wall table for one (N, T, J).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PeierlsTableConfig {
    pub n: u64,
    pub t: f64,
    #[serde(default = "default_j")]
    pub j: f64,
}

/// Critical-time-versus-dimension table.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TcritTableConfig {
    #[serde(default = "default_d_min")]
    pub d_min: u64,
    pub d_max: u64,
}

/// A parsed experiment: the `kind` tag plus its validated parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum ExperimentConfig {
    IsingSweep(IsingSweepConfig),
    MbqcRun(MbqcRunConfig),
    AnalogyTrace(AnalogyTraceConfig),
    PeierlsTable(PeierlsTableConfig),
    TcritTable(TcritTableConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::IsingSweep(_) => "ising-sweep",
            ExperimentConfig::MbqcRun(_) => "mbqc-run",
            ExperimentConfig::AnalogyTrace(_) => "analogy-trace",
            ExperimentConfig::PeierlsTable(_) => "peierls-table",
            ExperimentConfig::TcritTable(_) => "tcrit-table",
        }
    }

    /// Applies a seed override where the experiment is stochastic; returns
    /// false for the purely tabular kinds.
    pub fn set_seed(&mut self, seed: u64) -> bool {
        match self {
            ExperimentConfig::IsingSweep(c) => c.seed = seed,
            ExperimentConfig::MbqcRun(c) => c.seed = seed,
            ExperimentConfig::AnalogyTrace(c) => c.seed = seed,
            ExperimentConfig::PeierlsTable(_) | ExperimentConfig::TcritTable(_) => return false,
        }
        true
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            ExperimentConfig::IsingSweep(c) => Some(c.seed),
            ExperimentConfig::MbqcRun(c) => Some(c.seed),
            ExperimentConfig::AnalogyTrace(c) => Some(c.seed),
            ExperimentConfig::PeierlsTable(_) | ExperimentConfig::TcritTable(_) => None,
        }
    }

    /// Effective configuration (defaults materialized) as a JSON object with
    /// the `kind` tag re-attached, for the manifest echo.
    pub fn to_effective_json(&self) -> serde_json::Value {
        let mut value = match self {
            ExperimentConfig::IsingSweep(c) => serde_json::to_value(c),
            ExperimentConfig::MbqcRun(c) => serde_json::to_value(c),
            ExperimentConfig::AnalogyTrace(c) => serde_json::to_value(c),
            ExperimentConfig::PeierlsTable(c) => serde_json::to_value(c),
            ExperimentConfig::TcritTable(c) => serde_json::to_value(c),
        }
        .expect("config structs serialize");
        value
            .as_object_mut()
            .expect("config serializes to an object")
            .insert("kind".to_string(), self.kind().into());
        value
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    parse_config_str(&fs::read_to_string(path)?)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
    let Some(obj) = value.as_object() else {
        return Err(ConfigError::MissingKind);
    };
    let Some(kind) = obj.get("kind").and_then(|k| k.as_str()) else {
        return Err(ConfigError::MissingKind);
    };
    let kind = kind.to_string();
    let mut rest = obj.clone();
    rest.remove("kind");
    let rest = serde_json::Value::Object(rest);
    let invalid = |k: &'static str| {
        move |e: serde_json::Error| ConfigError::Invalid {
            kind: k,
            detail: e.to_string(),
        }
    };
    match kind.as_str() {
        "ising-sweep" => Ok(ExperimentConfig::IsingSweep(
            serde_json::from_value(rest).map_err(invalid("ising-sweep"))?,
        )),
        "mbqc-run" => Ok(ExperimentConfig::MbqcRun(
            serde_json::from_value(rest).map_err(invalid("mbqc-run"))?,
        )),
        "analogy-trace" => Ok(ExperimentConfig::AnalogyTrace(
            serde_json::from_value(rest).map_err(invalid("analogy-trace"))?,
        )),
        "peierls-table" => Ok(ExperimentConfig::PeierlsTable(
            serde_json::from_value(rest).map_err(invalid("peierls-table"))?,
        )),
        "tcrit-table" => Ok(ExperimentConfig::TcritTable(
            serde_json::from_value(rest).map_err(invalid("tcrit-table"))?,
        )),
        other => Err(ConfigError::UnknownKind {
            kind: other.to_string(),
            expected: KNOWN_KINDS,
        }),
    }
}
