//! JSON run configuration: schema, defaults and resolution into core types.

use std::fs;
use std::path::{Path, PathBuf};

use pdmp_core::model::{Location, ModelError, Violation};
use pdmp_core::solver::{CdfTable, StateInitial, Step};
use pdmp_core::{
    build_grid, cfl_max_dt, equilibrium_domain, Domain, DriftExpr, Grid64, InitialCondition, JumpMatrix, ModelSpec64,
    Resolution,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("{}", .0.join("\n"))]
    Invalid(Vec<String>),
}

impl ConfigError {
    fn at(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_run_name")]
    pub run_name: String,
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub initial: Vec<InitialConfig>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_run_name() -> String {
    "run".into()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub states: Vec<StateConfig>,
    /// `q[i][j]`: probability of jumping to `i` when leaving `j`.
    pub q: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub drift: String,
    pub mu: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub allow_cfl_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConfig {
    pub w: f64,
    pub x0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepConfig>,
    /// `[x, F]` pairs, linearly interpolated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cdf_table: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_substep")]
    pub substep: f64,
    #[serde(default = "default_ks_tol")]
    pub ks_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

fn default_substep() -> f64 {
    1e-2
}

fn default_ks_tol() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    #[serde(default = "yes")]
    pub monotone: bool,
    #[serde(default = "default_monotone_tol")]
    pub monotone_tol: f64,
    #[serde(default = "yes")]
    pub conservation: bool,
    #[serde(default = "default_conservation_tol")]
    pub conservation_tol: f64,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            monotone: true,
            monotone_tol: default_monotone_tol(),
            conservation: true,
            conservation_tol: default_conservation_tol(),
        }
    }
}

fn yes() -> bool {
    true
}

fn default_monotone_tol() -> f64 {
    1e-12
}

fn default_conservation_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_reference_factor")]
    pub reference_factor: usize,
    #[serde(default = "default_order_band")]
    pub order_band: [f64; 2],
    /// Times for the error-growth table; empty skips it.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub growth_times: Vec<f64>,
    #[serde(default = "default_growth_ratio")]
    pub max_growth_ratio: f64,
}

fn default_levels() -> usize {
    4
}

fn default_reference_factor() -> usize {
    16
}

fn default_order_band() -> [f64; 2] {
    [0.7, 1.3]
}

fn default_growth_ratio() -> f64 {
    2.5
}

/// A config with every default filled in, plus the core objects built from it.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub spec: ModelSpec64,
    pub grid: Grid64,
    pub initial: InitialCondition<f64>,
    pub dt_max: Option<f64>,
}

/// Parses `text`, reporting schema errors by JSON pointer.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        ConfigError::at(pointer, e.into_inner().to_string())
    })
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Reads, parses and resolves the config at `path`.
pub fn load_config(path: &Path) -> Result<Resolved, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    resolve(parse_config(&text)?)
}

fn violation_pointer(v: &Violation) -> String {
    match (v.field, v.at) {
        ("rates", Location::Entry(i)) => format!("/model/states/{i}/mu"),
        ("q", Location::Cell(i, j)) => format!("/model/q/{i}/{j}"),
        ("q", Location::Row(i)) => format!("/model/q/{i}"),
        ("q", _) => "/model/q".into(),
        ("domain", _) => "/grid/domain".into(),
        _ => "/model".into(),
    }
}

/// Builds the model, grid and initial data, and fills in the automatic domain and `dt`.
pub fn resolve(mut config: RunConfig) -> Result<Resolved, ConfigError> {
    let mut drifts = Vec::with_capacity(config.model.states.len());
    for (i, s) in config.model.states.iter().enumerate() {
        let d = DriftExpr::parse(&s.drift)
            .map_err(|e| ConfigError::at(format!("/model/states/{i}/drift"), e.to_string()))?;
        drifts.push(d);
    }
    let rates = config.model.states.iter().map(|s| s.mu).collect();
    let mut spec = ModelSpec64::new(drifts, rates, JumpMatrix::from_rows(config.model.q.clone()));
    if let Some([lo, hi]) = config.grid.domain {
        spec = spec.with_domain(Domain::new(lo, hi));
    }
    let spec = spec.validated().map_err(|e| match e {
        ModelError::Invalid(vs) => {
            ConfigError::Invalid(vs.iter().map(|v| format!("{}: {v}", violation_pointer(v))).collect())
        }
        other => ConfigError::at("/model", other.to_string()),
    })?;

    let domain = match config.grid.domain {
        Some([lo, hi]) => Domain::new(lo, hi),
        None => {
            let d = equilibrium_domain(&spec).map_err(|e| ConfigError::at("/grid/domain", e.to_string()))?;
            config.grid.domain = Some([d.lo, d.hi]);
            d
        }
    };
    let resolution = match (config.grid.dx, config.grid.k) {
        (Some(dx), None) => Resolution::Spacing(dx),
        (None, Some(k)) => Resolution::Nodes(k),
        (Some(_), Some(_)) => return Err(ConfigError::at("/grid", "give either dx or k, not both")),
        (None, None) => return Err(ConfigError::at("/grid", "one of dx or k is required")),
    };
    let grid = build_grid(domain, resolution).map_err(|e| ConfigError::at("/grid", e.to_string()))?;

    let horizon = config.time.horizon;
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(ConfigError::at(
            "/time/T",
            format!("must be finite and >= 0, got {horizon}"),
        ));
    }
    if let Some(i) = config.snapshots.iter().position(|&t| !(t >= 0.0 && t <= horizon)) {
        return Err(ConfigError::at(
            format!("/snapshots/{i}"),
            format!("must lie in [0, {horizon}]"),
        ));
    }
    let bound = cfl_max_dt(&spec, &grid).map_err(|e| ConfigError::at("/model", e.to_string()))?;
    if config.time.dt.is_none() {
        config.time.dt = Some(match bound.dt_max {
            Some(m) => 0.9 * m,
            None => horizon.max(1.0),
        });
    }
    if let Some(dt) = config.time.dt.filter(|&dt| !(dt > 0.0) || !dt.is_finite()) {
        return Err(ConfigError::at("/time/dt", format!("must be positive, got {dt}")));
    }

    let initial = initial_condition(&config.initial, spec.states())?;
    if let Some(mc) = &config.mc {
        if mc.n == 0 {
            return Err(ConfigError::at("/mc/n", "must be >= 1"));
        }
        if !(mc.substep > 0.0) {
            return Err(ConfigError::at("/mc/substep", "must be positive"));
        }
    }
    if let Some(c) = &config.convergence {
        if c.levels < 3 {
            return Err(ConfigError::at("/convergence/levels", "must be >= 3"));
        }
    }
    Ok(Resolved {
        config,
        spec,
        grid,
        initial,
        dt_max: bound.dt_max,
    })
}

fn initial_condition(entries: &[InitialConfig], states: usize) -> Result<InitialCondition<f64>, ConfigError> {
    if entries.len() != states {
        return Err(ConfigError::at(
            "/initial",
            format!("expected {states} entries, one per state, got {}", entries.len()),
        ));
    }
    let mut out = Vec::with_capacity(states);
    for (i, e) in entries.iter().enumerate() {
        let table = match &e.cdf_table {
            Some(points) => Some(
                CdfTable::new(points.iter().map(|p| (p[0], p[1])).collect())
                    .map_err(|m| ConfigError::at(format!("/initial/{i}/cdf_table"), m))?,
            ),
            None => None,
        };
        if e.steps.is_empty() && table.is_none() {
            return Err(ConfigError::at(format!("/initial/{i}"), "needs steps or cdf_table"));
        }
        let steps = e
            .steps
            .iter()
            .map(|s| Step {
                weight: s.w,
                location: s.x0,
            })
            .collect();
        out.push(StateInitial { steps, table });
    }
    Ok(InitialCondition { states: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {"states": [{"drift": "-x + 1", "mu": 1}, {"drift": "-x - 1", "mu": 1}], "q": [[0, 1], [1, 0]]},
        "grid": {"k": 101},
        "time": {"T": 1},
        "initial": [{"steps": [{"w": 0.5, "x0": 0}]}, {"steps": [{"w": 0.5, "x0": 0}]}]
    }"#;

    #[test]
    fn defaults_are_filled() {
        let r = resolve(parse_config(MINIMAL).unwrap()).unwrap();
        assert_eq!(r.config.grid.domain, Some([-1.0, 1.0]));
        assert_eq!(r.config.time.dt, Some(0.9 * r.dt_max.unwrap()));
        assert_eq!(r.config.run_name, "run");
        assert!(r.config.checks.monotone);
    }

    #[test]
    fn resolution_is_idempotent() {
        let once = resolve(parse_config(MINIMAL).unwrap()).unwrap().config;
        let text = serde_json::to_string_pretty(&once).unwrap();
        let twice = resolve(parse_config(&text).unwrap()).unwrap().config;
        assert_eq!(once, twice);
    }

    #[test]
    fn schema_errors_carry_a_pointer() {
        let bad = MINIMAL.replace(r#""mu": 1}, {"#, r#""mu": "fast"}, {"#);
        match parse_config(&bad) {
            Err(ConfigError::Schema { pointer, .. }) => assert_eq!(pointer, "/model/states/0/mu"),
            other => panic!("{other:?}"),
        }
        let unknown = MINIMAL.replace(r#""grid": {"k": 101}"#, r#""grid": {"k": 101, "nodes": 3}"#);
        match parse_config(&unknown) {
            Err(ConfigError::Schema { pointer, message }) => {
                assert_eq!(pointer, "/grid/nodes");
                assert!(message.contains("unknown field"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn row_stochastic_q_names_columns() {
        let text = MINIMAL.replace(r#""q": [[0, 1], [1, 0]]"#, r#""q": [[0.2, 0.8], [0.3, 0.7]]"#);
        match resolve(parse_config(&text).unwrap()) {
            Err(ConfigError::Invalid(msgs)) => {
                assert_eq!(msgs.len(), 2, "{msgs:?}");
                assert!(msgs.iter().all(|m| m.contains("column")), "{msgs:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_drift_points_at_state() {
        let text = MINIMAL.replace("-x + 1", "-x +* 1");
        match resolve(parse_config(&text).unwrap()) {
            Err(ConfigError::Schema { pointer, .. }) => assert_eq!(pointer, "/model/states/0/drift"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dx_and_k_are_exclusive() {
        let text = MINIMAL.replace(r#""k": 101"#, r#""k": 101, "dx": 0.1"#);
        assert!(
            matches!(resolve(parse_config(&text).unwrap()), Err(ConfigError::Schema { pointer, .. }) if pointer == "/grid")
        );
    }
}
