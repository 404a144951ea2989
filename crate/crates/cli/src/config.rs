//! TOML run configuration.
//!
//! Sections: `[circuit]`, `[scenario]`, `[output]`, and the optional
//! `[modes]`, `[rwa]` and `[sweep]`. Unknown keys anywhere are rejected
//! before any computation starts.

use std::path::Path;

use nongauss::circuit::CircuitParams;
use nongauss::rwa::{KerrMode, LadderMonomial};
use nongauss::scenario::ScenarioConfig;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    #[serde(default)]
    pub circuit: Option<CircuitParams>,
    /// Kept raw until the scenario name is known; see [`CliConfig::scenario_config`].
    #[serde(default)]
    pub scenario: Option<toml::Table>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub modes: ModesSection,
    #[serde(default)]
    pub rwa: Option<RwaSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// File name prefix, the scenario name by default.
    #[serde(default)]
    pub prefix: Option<String>,
    /// Also write the final state as JSON.
    #[serde(default)]
    pub snapshot: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesSection {
    #[serde(default)]
    pub count: Option<usize>,
    /// Boundary Josephson energy replacing the one derived from the SQUID.
    #[serde(default)]
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RwaSection {
    #[serde(default)]
    pub modes: Option<usize>,
    /// Overrides the circuit spectrum; required with `terms`.
    #[serde(default)]
    pub frequencies: Option<Vec<f64>>,
    /// Pump frequency; defaults to the configured pump, else the triple
    /// resonance.
    #[serde(default)]
    pub drive: Option<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub kerr: KerrMode,
    /// Explicit interaction-picture terms instead of the circuit expansion.
    #[serde(default)]
    pub terms: Option<Vec<LadderMonomial>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Dotted path into the scenario parameter table, e.g.
    /// `envelope.amplitudes`.
    pub param: String,
    pub values: Vec<toml::Value>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

impl CliConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(s) = &cfg.scenario {
            if s.contains_key("circuit") {
                return Err(CliError::Config(
                    "circuit parameters belong in the top-level [circuit] section".into(),
                ));
            }
        }
        if let Some(name) = cfg.scenario.as_ref().and_then(|s| s.get("name")) {
            // Validate the whole section now so schema errors surface early.
            let name = name
                .as_str()
                .ok_or_else(|| CliError::Config("scenario.name must be a string".into()))?;
            cfg.scenario_config(Some(name))?;
        }
        if let Some(s) = &cfg.sweep {
            if s.values.is_empty() {
                return Err(CliError::Config("sweep.values is empty".into()));
            }
            if s.labels.as_ref().is_some_and(|l| l.len() != s.values.len()) {
                return Err(CliError::Config(
                    "sweep.labels and sweep.values differ in length".into(),
                ));
            }
        }
        Ok(cfg)
    }

    /// Scenario configuration for `name`, or for the name in the file when
    /// `name` is `None`.
    pub fn scenario_config(&self, name: Option<&str>) -> CliResult<ScenarioConfig> {
        let mut table = self.scenario.clone().unwrap_or_default();
        let in_file = table
            .get("name")
            .and_then(|v| v.as_str())
            .map(str::to_string);
        let name = match (name, in_file) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Config(format!(
                    "--scenario {a} disagrees with scenario.name = {b}"
                )))
            }
            (Some(a), _) => a.to_string(),
            (None, Some(b)) => b,
            (None, None) => {
                return Err(CliError::Config(
                    "no scenario given: pass --scenario or set scenario.name".into(),
                ))
            }
        };
        table.insert("name".into(), toml::Value::String(name));
        let mut cfg: ScenarioConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("[scenario]: {e}")))?;
        cfg.circuit = self.circuit;
        Ok(cfg)
    }

    pub fn require_circuit(&self) -> CliResult<CircuitParams> {
        self.circuit
            .ok_or_else(|| CliError::Config("this command needs a [circuit] section".into()))
    }
}

/// Sets `path` (dot separated) inside a JSON object, creating tables on
/// the way.
pub fn set_dotted(
    root: &mut serde_json::Map<String, serde_json::Value>,
    path: &str,
    value: serde_json::Value,
) -> CliResult<()> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!(
            "malformed parameter path '{path}'"
        )));
    }
    let mut node = root;
    for k in &keys[..keys.len() - 1] {
        let entry = node
            .entry(k.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
        node = entry
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("'{k}' in '{path}' is not a table")))?;
    }
    node.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}
