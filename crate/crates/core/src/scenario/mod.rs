//! End-to-end experiments: build a Hamiltonian, evolve the initial state on a
//! grid, record observables and evaluate witnesses point by point.
//!
//! Scenarios are looked up by name in a [`ScenarioRegistry`]. Each one only
//! supplies its Hamiltonian, initial state and observables; the shared
//! runner handles evolution, the cutoff check, witnesses and the summary.

mod dce;
mod hybrid;
mod spdc;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::circuit::CircuitParams;
use crate::dynamics::{
    cutoff_sweep, evolve_compiled, ConvergenceReport, HamiltonianSpec, StepControl, Trajectory,
};
use crate::error::{Error, Result};
use crate::hilbert::{QuantumState, RegisterLayout};
use crate::witness::{DvOptions, WitnessContext, WitnessRegistry, WitnessReport};

pub use dce::{window_means, DceParams, DceRabi};
pub use hybrid::{swap_fidelity, HybridParams, HybridSwap};
pub use spdc::{DoubleSpdc, DoubleSpdcParams, TripleSpdc, TripleSpdcParams};

/// Uniform grid `start, …, stop` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.points == 0 {
            return Err(Error::InvalidParameter(
                "grid needs finite bounds and points > 0".into(),
            ));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        if self.stop <= self.start {
            return Err(Error::InvalidParameter(
                "grid stop must exceed start".into(),
            ));
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| self.start + step * i as f64)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceOptions {
    #[serde(default = "yes")]
    pub check: bool,
    #[serde(default = "default_conv_tol")]
    pub tolerance: f64,
    /// The comparison run uses `cutoff + extra`.
    #[serde(default = "default_extra")]
    pub extra: usize,
}

fn yes() -> bool {
    true
}

fn default_conv_tol() -> f64 {
    1e-6
}

fn default_extra() -> usize {
    2
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            check: true,
            tolerance: default_conv_tol(),
            extra: default_extra(),
        }
    }
}

/// Everything needed to run one scenario. Fields left unset fall back to
/// the scenario defaults; `params` holds the scenario-specific table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<String>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub dv: DvOptions,
    #[serde(default)]
    pub convergence: ConvergenceOptions,
    #[serde(default)]
    pub step: StepControl,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl ScenarioConfig {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            circuit: None,
            cutoff: None,
            grid: None,
            witnesses: None,
            seed: 0,
            restarts: None,
            dv: DvOptions::default(),
            convergence: ConvergenceOptions::default(),
            step: StepControl::default(),
            params: serde_json::Map::new(),
        }
    }

    /// Sets one entry of the scenario-specific table.
    pub fn with_param<T: Serialize>(mut self, key: &str, value: T) -> Result<Self> {
        self.params
            .insert(key.to_string(), serde_json::to_value(value)?);
        Ok(self)
    }

    /// Decodes the scenario-specific table, rejecting unknown keys.
    pub fn parse_params<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(serde_json::Value::Object(self.params.clone()))
            .map_err(|e| Error::InvalidParameter(format!("{} parameters: {e}", self.name)))
    }
}

/// Values a scenario uses when the config leaves them open.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDefaults {
    pub cutoff: usize,
    pub grid: TimeGrid,
    pub witnesses: Vec<&'static str>,
}

/// A prepared run at one cutoff.
#[derive(Debug, Clone)]
pub struct Plan {
    pub hamiltonian: HamiltonianSpec,
    pub initial: QuantumState,
    /// Rate converting the grid axis into time, `t = axis/rate`. Zero means
    /// the axis already is time.
    pub rate: f64,
    /// Name of the grid axis in outputs, e.g. `g0t`.
    pub axis: &'static str,
    /// Extra Hamiltonians evolved from the same state; their observables
    /// are stored with the given suffix.
    pub companions: Vec<(&'static str, HamiltonianSpec)>,
}

impl Plan {
    pub fn layout(&self) -> &RegisterLayout {
        self.initial.layout()
    }
}

pub trait Scenario: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn defaults(&self) -> ScenarioDefaults;
    fn prepare(&self, cfg: &ScenarioConfig, cutoff: usize) -> Result<Plan>;
    /// Records the scenario observables on a finished trajectory.
    fn observe(&self, traj: &mut Trajectory) -> Result<()>;
    fn witness_context(&self, _layout: &RegisterLayout) -> WitnessContext {
        WitnessContext::default()
    }
    /// Scenario-specific summary entries.
    fn finish(&self, _cfg: &ScenarioConfig, _out: &mut ScenarioOutput) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub seed: u64,
    pub cutoff: usize,
    pub points: usize,
    pub axis: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g2_peak: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s_peak: Option<f64>,
    /// Largest value of each witness over the grid.
    pub peaks: BTreeMap<String, f64>,
    /// Axis value where each peak occurs.
    pub peak_at: BTreeMap<String, f64>,
    /// Closed axis intervals where each witness detects.
    pub detection_windows: BTreeMap<String, Vec<[f64; 2]>>,
    pub norm_drift: f64,
    /// Relative energy drift, static Hamiltonians only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub energy_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub convergence: Option<ConvergenceReport>,
    pub converged: bool,
    pub steps: usize,
    pub extras: BTreeMap<String, f64>,
    pub extra_series: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub summary: ScenarioSummary,
    pub trajectory: Trajectory,
    /// Witness reports per grid point, in config order.
    pub reports: Vec<Vec<WitnessReport>>,
}

impl ScenarioOutput {
    pub fn series(&self, name: &str) -> Result<&[f64]> {
        self.trajectory
            .observables
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Unknown {
                what: "observable",
                name: name.to_string(),
            })
    }

    /// Grid axis values (`g·t` or `t`).
    pub fn axis(&self) -> &[f64] {
        &self.trajectory.observables[&self.summary.axis]
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary)?)
    }
}

/// Contiguous runs of detecting points as `[first, last]` axis intervals.
pub fn detection_windows(axis: &[f64], detects: &[bool]) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &d) in detects.iter().enumerate() {
        match (d, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                out.push([axis[s], axis[i - 1]]);
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        out.push([axis[s], axis[detects.len() - 1]]);
    }
    out
}

fn dynamics(
    scenario: &dyn Scenario,
    cfg: &ScenarioConfig,
    cutoff: usize,
    times: &[f64],
) -> Result<(Trajectory, Plan, Option<f64>)> {
    let plan = scenario.prepare(cfg, cutoff)?;
    let compiled = plan.hamiltonian.compile(plan.layout())?;
    let mut traj = evolve_compiled(&compiled, &plan.initial, times, cfg.step)?;
    let energy_drift = if plan.hamiltonian.is_static() {
        let e = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, s)| compiled.energy(t, s))
            .collect::<Result<Vec<_>>>()?;
        let scale = e[0]
            .abs()
            .max(if plan.rate > 0.0 { plan.rate } else { 1.0 });
        Some(e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max) / scale)
    } else {
        None
    };
    scenario.observe(&mut traj)?;
    for (suffix, h) in &plan.companions {
        let mut side = evolve_compiled(&h.compile(plan.layout())?, &plan.initial, times, cfg.step)?;
        scenario.observe(&mut side)?;
        for (k, v) in side.observables {
            traj.observables.insert(format!("{k}{suffix}"), v);
        }
        traj.steps += side.steps;
    }
    Ok((traj, plan, energy_drift))
}

/// Runs `scenario` as configured by `cfg`.
pub fn run_scenario(scenario: &dyn Scenario, cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    if cfg.name != scenario.name() {
        return Err(Error::InvalidParameter(format!(
            "config names scenario '{}' but '{}' was requested",
            cfg.name,
            scenario.name()
        )));
    }
    cfg.step.validate()?;
    let defaults = scenario.defaults();
    let registry = WitnessRegistry::builtin();
    let witnesses: Vec<String> = match &cfg.witnesses {
        Some(w) => w.clone(),
        None => defaults.witnesses.iter().map(|s| s.to_string()).collect(),
    };
    for w in &witnesses {
        registry.get(w)?;
    }
    if cfg.restarts == Some(0) {
        return Err(Error::InvalidParameter("restarts must be positive".into()));
    }
    if !(cfg.convergence.tolerance > 0.0) {
        return Err(Error::InvalidParameter(
            "convergence tolerance must be positive".into(),
        ));
    }
    let cutoff = cfg.cutoff.unwrap_or(defaults.cutoff);
    let axis = cfg.grid.unwrap_or(defaults.grid).values()?;
    if axis[0] < 0.0 {
        return Err(Error::InvalidParameter(
            "grid must start at a non-negative time".into(),
        ));
    }

    // The rate is only known once the Hamiltonian is built.
    let probe = scenario.prepare(cfg, cutoff)?;
    let times: Vec<f64> = if probe.rate > 0.0 {
        axis.iter().map(|x| x / probe.rate).collect()
    } else {
        axis.clone()
    };
    let axis_name = probe.axis;
    drop(probe);

    let (mut traj, plan, energy_drift) = dynamics(scenario, cfg, cutoff, &times)?;

    let convergence = if cfg.convergence.check && !plan.layout().boson_indices().is_empty() {
        let main = traj.clone();
        let cutoffs = [cutoff, cutoff + cfg.convergence.extra.max(1)];
        Some(cutoff_sweep(
            |c| {
                if c == cutoff {
                    Ok(main.clone())
                } else {
                    Ok(dynamics(scenario, cfg, c, &times)?.0)
                }
            },
            &cutoffs,
            cfg.convergence.tolerance,
        )?)
    } else {
        None
    };
    traj.observables.insert(axis_name.to_string(), axis.clone());

    let mut ctx = scenario.witness_context(plan.layout());
    ctx.seed = cfg.seed;
    ctx.dv = cfg.dv;
    if let Some(r) = cfg.restarts {
        ctx.restarts = r;
    }
    let reports: Vec<Vec<WitnessReport>> = traj
        .states
        .par_iter()
        .map(|s| {
            witnesses
                .iter()
                .map(|w| registry.evaluate(w, s, &ctx))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut peaks = BTreeMap::new();
    let mut peak_at = BTreeMap::new();
    let mut windows = BTreeMap::new();
    for (k, w) in witnesses.iter().enumerate() {
        let values: Vec<f64> = reports.iter().map(|r| r[k].value).collect();
        let detects: Vec<bool> = reports.iter().map(|r| r[k].detects).collect();
        let best = values
            .iter()
            .enumerate()
            .fold(0, |b, (i, v)| if *v > values[b] { i } else { b });
        peaks.insert(w.clone(), values[best]);
        peak_at.insert(w.clone(), axis[best]);
        windows.insert(w.clone(), detection_windows(&axis, &detects));
        if w == "negativity" {
            for key in reports[0][k].components.keys() {
                let series = reports.iter().map(|r| r[k].components[key]).collect();
                traj.observables.insert(key.clone(), series);
            }
        }
        traj.observables.insert(w.clone(), values);
    }

    let converged = convergence.as_ref().map_or(true, |c| c.converged());
    let summary = ScenarioSummary {
        scenario: cfg.name.clone(),
        seed: cfg.seed,
        cutoff,
        points: axis.len(),
        axis: axis_name.to_string(),
        g2_peak: peaks.get("g2").copied(),
        s_peak: peaks.get("vlf_s_opt").copied(),
        peaks,
        peak_at,
        detection_windows: windows,
        norm_drift: traj.max_norm_drift(),
        energy_drift,
        convergence,
        converged,
        steps: traj.steps,
        extras: BTreeMap::new(),
        extra_series: BTreeMap::new(),
    };
    let mut out = ScenarioOutput {
        summary,
        trajectory: traj,
        reports,
    };
    scenario.finish(cfg, &mut out)?;
    Ok(out)
}

/// Name-indexed collection of scenarios.
pub struct ScenarioRegistry {
    entries: BTreeMap<&'static str, Box<dyn Scenario>>,
}

impl ScenarioRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(TripleSpdc));
        r.register(Box::new(DoubleSpdc));
        r.register(Box::new(HybridSwap));
        r.register(Box::new(DceRabi));
        r
    }

    pub fn register(&mut self, s: Box<dyn Scenario>) {
        self.entries.insert(s.name(), s);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Scenario> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Unknown {
                what: "scenario",
                name: name.to_string(),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn run(&self, cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
        run_scenario(self.get(&cfg.name)?, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values() {
        let g = TimeGrid::new(0.0, 1.0, 5).values().unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(TimeGrid::new(1.0, 0.0, 3).values().is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).values().is_err());
    }

    #[test]
    fn windows_are_contiguous_runs() {
        let axis = [0.0, 1.0, 2.0, 3.0, 4.0];
        let w = detection_windows(&axis, &[false, true, true, false, true]);
        assert_eq!(w, vec![[1.0, 2.0], [4.0, 4.0]]);
        assert!(detection_windows(&axis, &[false; 5]).is_empty());
    }

    #[test]
    fn registry_names() {
        let r = ScenarioRegistry::builtin();
        assert_eq!(
            r.names(),
            vec!["22spdc", "3spdc", "dce-rabi", "hybrid-swap"]
        );
        assert!(r.get("4spdc").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let bad = r#"{"name": "3spdc", "cutof": 8}"#;
        assert!(serde_json::from_str::<ScenarioConfig>(bad).is_err());
        let ok: ScenarioConfig = serde_json::from_str(r#"{"name": "3spdc"}"#).unwrap();
        assert_eq!(ok, ScenarioConfig::new("3spdc"));
    }

    #[test]
    fn name_mismatch_is_rejected() {
        let r = ScenarioRegistry::builtin();
        let cfg = ScenarioConfig::new("22spdc");
        assert!(run_scenario(r.get("3spdc").unwrap(), &cfg).is_err());
    }
}
