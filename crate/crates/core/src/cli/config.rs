//! Run configuration: one TOML file, `--set key=value` overrides with dotted
//! keys, then the dedicated flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::estimators::EstimatorOptions;
use crate::selection::BootstrapMode;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub workers: usize,
    /// Keys are exactly the fields of [`EstimatorOptions`].
    pub estimator: EstimatorOptions,
    pub simulate: SimulateConfig,
    pub reconstruct: ReconstructConfig,
    pub select_rank: SelectRankConfig,
    pub grid: GridSection,
    pub correlators: CorrelatorsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            workers: 1,
            estimator: EstimatorOptions::default(),
            simulate: SimulateConfig::default(),
            reconstruct: ReconstructConfig::default(),
            select_rank: SelectRankConfig::default(),
            grid: GridSection::default(),
            correlators: CorrelatorsConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub num_qubits: usize,
    /// `0bar`, `1bar`, `plus` (7 qubits), `random` (fixed rank), or `file`.
    pub state: String,
    /// Rank of a `random` state.
    pub rank: usize,
    /// Amplitude file for `state = "file"`.
    pub state_file: Option<PathBuf>,
    /// Number of distinct random settings; all `3^L` when absent.
    pub n_settings: Option<usize>,
    /// Explicit settings list; overrides `n_settings`.
    pub settings_file: Option<PathBuf>,
    pub shots: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            num_qubits: 4,
            state: "random".into(),
            rank: 1,
            state_file: None,
            n_settings: None,
            settings_file: None,
            shots: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructConfig {
    pub counts: Option<PathBuf>,
    pub estimator: String,
    /// GRAD rank cap.
    pub rank: usize,
    pub reference: Option<PathBuf>,
    /// Qubit permutation applied to the reference state: new qubit `q` is old
    /// qubit `reference_permutation[q]` (0-based).
    pub reference_permutation: Option<Vec<usize>>,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self { counts: None, estimator: "ls_pg".into(), rank: 1, reference: None, reference_permutation: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectRankConfig {
    pub counts: Option<PathBuf>,
    pub estimator: String,
    pub rank: usize,
    pub mode: BootstrapMode,
    pub replicas: usize,
    /// Also report the eigenvalue-cut baseline rank.
    pub guta: bool,
    pub guta_eps: f64,
    pub reference: Option<PathBuf>,
    pub reference_permutation: Option<Vec<usize>>,
}

impl Default for SelectRankConfig {
    fn default() -> Self {
        Self {
            counts: None,
            estimator: "ls_pg".into(),
            rank: 1,
            mode: BootstrapMode::Parametric,
            replicas: 20,
            guta: false,
            guta_eps: 0.05,
            reference: None,
            reference_permutation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub num_qubits: usize,
    pub ranks: Vec<usize>,
    pub settings: Vec<usize>,
    pub repetitions: Vec<u64>,
    pub trials: usize,
    pub replicas: usize,
    pub bootstrap: BootstrapMode,
    pub estimator: String,
    /// GRAD rank cap.
    pub rank: usize,
    pub guta_eps: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = crate::selection::GridConfig::default();
        Self {
            num_qubits: g.num_qubits,
            ranks: g.ranks,
            settings: g.settings,
            repetitions: g.repetitions,
            trials: g.trials,
            replicas: g.replicas,
            bootstrap: g.bootstrap,
            estimator: g.estimator.name().into(),
            rank: 1,
            guta_eps: g.guta_eps,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelatorsConfig {
    pub counts: Option<PathBuf>,
}

/// Problems with the configuration itself (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn flatten(prefix: &str, value: &toml::Value, out: &mut Vec<String>) {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        _ => out.push(prefix.to_string()),
    }
}

/// Every dotted key the configuration accepts.
pub fn valid_keys() -> Vec<String> {
    let mut keys = Vec::new();
    if let Ok(v) = toml::Value::try_from(RunConfig::default()) {
        flatten("", &v, &mut keys);
    }
    // optional paths are absent from the serialized defaults
    for k in [
        "simulate.state_file",
        "simulate.n_settings",
        "simulate.settings_file",
        "reconstruct.counts",
        "reconstruct.reference",
        "reconstruct.reference_permutation",
        "select_rank.counts",
        "select_rank.reference",
        "select_rank.reference_permutation",
        "correlators.counts",
    ] {
        keys.push(k.to_string());
    }
    keys.sort();
    keys.dedup();
    keys
}

/// Parses the right-hand side of `--set`: any TOML value, else a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Sets `key` (dotted) to `value` inside `table`, creating sub-tables.
pub fn set_key(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), ConfigError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError(format!("malformed key {key:?}")));
    }
    let mut node = table;
    for p in &parts[..parts.len() - 1] {
        let entry = node.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(ConfigError(format!("{key:?}: {p:?} is not a table"))),
        };
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Applies one `K=V` override.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (k, v) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("--set expects KEY=VALUE, got {assignment:?}")))?;
    set_key(table, k.trim(), parse_value(v.trim()))
}

/// Reads the config file (if any) into a table.
pub fn load_table(path: Option<&Path>) -> Result<toml::Table, ConfigError> {
    match path {
        None => Ok(toml::Table::new()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", p.display())))
        }
    }
}

/// Typed config from a table; unknown keys fail with the list of valid ones.
pub fn resolve(table: toml::Table) -> Result<RunConfig, ConfigError> {
    toml::Value::Table(table).try_into::<RunConfig>().map_err(|e| {
        ConfigError(format!("invalid configuration: {}\nvalid keys: {}", e.message(), valid_keys().join(", ")))
    })
}
