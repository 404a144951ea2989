//! Tripartite entanglement witnesses.
//!
//! Every witness is reachable by name through [`WitnessRegistry`]. A witness
//! detects entanglement when its value exceeds [`DETECTION_FLOOR`]; the floor
//! keeps round-off on separable states from registering as a detection.

mod bank;
mod gaussian;
mod moments;
mod negativity;
pub mod simplex;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{QuantumState, RegisterLayout};

pub use bank::{epsilon_state, random_product_state, separable_bank};
pub use gaussian::{optimize_vlf, vlf_s, vlf_value, VlfParams};
pub use moments::{
    dv_genuine, genuine_g1, genuine_g2, hz_inseparability, DvAggregate, DvOptions, DvOrdering,
};
pub use negativity::{negativity_scan, ppt_negativity, schmidt_negativity};

/// Values at or below this never count as a detection.
pub const DETECTION_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub name: String,
    pub value: f64,
    pub detects: bool,
    /// Moments and partial terms entering the value.
    pub components: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub params: Option<VlfParams>,
    /// Bipartition that fixed the value, e.g. `"1|23"`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub argmax_bipartition: Option<String>,
}

impl WitnessReport {
    pub fn new(name: &str, value: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            detects: value > DETECTION_FLOOR,
            components: BTreeMap::new(),
            params: None,
            argmax_bipartition: None,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.components.insert(key.to_string(), value);
        self
    }
}

/// Which subsystems play the three parties and how configurable witnesses
/// are set up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessContext {
    /// Bosonic parties for the continuous-variable witnesses.
    #[serde(default)]
    pub modes: Option<[usize; 3]>,
    /// Qubit parties for the discrete-variable witness.
    #[serde(default)]
    pub qubits: Option<[usize; 3]>,
    /// Explicit parties for negativity, overriding the mode/qubit choice.
    #[serde(default)]
    pub parties: Option<[usize; 3]>,
    #[serde(default)]
    pub dv: DvOptions,
    #[serde(default = "VlfParams::uniform")]
    pub vlf: VlfParams,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_restarts() -> usize {
    100
}

impl Default for WitnessContext {
    fn default() -> Self {
        Self {
            modes: None,
            qubits: None,
            parties: None,
            dv: DvOptions::default(),
            vlf: VlfParams::uniform(),
            restarts: default_restarts(),
            seed: 0,
        }
    }
}

fn first_three(found: Vec<usize>, what: &str) -> Result<[usize; 3]> {
    if found.len() < 3 {
        return Err(Error::LayoutMismatch(format!(
            "need three {what} subsystems, found {}",
            found.len()
        )));
    }
    Ok([found[0], found[1], found[2]])
}

impl WitnessContext {
    pub fn modes_for(&self, layout: &RegisterLayout) -> Result<[usize; 3]> {
        match self.modes {
            Some(m) => Ok(m),
            None => first_three(layout.boson_indices(), "bosonic"),
        }
    }

    pub fn qubits_for(&self, layout: &RegisterLayout) -> Result<[usize; 3]> {
        match self.qubits {
            Some(q) => Ok(q),
            None => first_three(layout.qubit_indices(), "qubit"),
        }
    }

    /// Parties for negativity: `parties` if set, else the designated modes
    /// when there are three bosons, otherwise the qubits.
    pub fn parties_for(&self, layout: &RegisterLayout) -> Result<[usize; 3]> {
        if let Some(p) = self.parties {
            return Ok(p);
        }
        if self.modes.is_some() || layout.boson_indices().len() >= 3 {
            self.modes_for(layout)
        } else {
            self.qubits_for(layout)
        }
    }
}

pub trait Witness: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn evaluate(&self, state: &QuantumState, ctx: &WitnessContext) -> Result<WitnessReport>;
}

struct VlfFixed;
struct VlfOptimized;
struct Inseparability(usize);
struct G1;
struct G2;
struct Dv;
struct Negativity;

impl Witness for VlfFixed {
    fn name(&self) -> &'static str {
        "vlf_s"
    }
    fn description(&self) -> &'static str {
        "van Loock-Furusawa S at the context parameters"
    }
    fn evaluate(&self, state: &QuantumState, ctx: &WitnessContext) -> Result<WitnessReport> {
        vlf_s(state, ctx.modes_for(state.layout())?, &ctx.vlf)
    }
}

impl Witness for VlfOptimized {
    fn name(&self) -> &'static str {
        "vlf_s_opt"
    }
    fn description(&self) -> &'static str {
        "van Loock-Furusawa S maximized over (g, h) in [-2, 2]^6"
    }
    fn evaluate(&self, state: &QuantumState, ctx: &WitnessContext) -> Result<WitnessReport> {
        optimize_vlf(
            state,
            ctx.modes_for(state.layout())?,
            ctx.restarts,
            ctx.seed,
        )
    }
}

impl Witness for Inseparability {
    fn name(&self) -> &'static str {
        ["i1", "i2", "i3"][self.0]
    }
    fn description(&self) -> &'static str {
        "Hillery-Zubairy inseparability of one mode from the other two"
    }
    fn evaluate(&self, state: &QuantumState, ctx: &WitnessContext) -> Result<WitnessReport> {
        hz_inseparability(state, ctx.modes_for(state.layout())?, self.0)
    }
}

impl Witness for G1 {
    fn name(&self) -> &'static str {
        "g1"
    }
    fn description(&self) -> &'static str {
        "genuine witness with anti-normal moments summed over bipartitions"
    }
    fn evaluate(&self, state: &QuantumState, ctx: &WitnessContext) -> Result<WitnessReport> {
        genuine_g1(state, ctx.modes_for(state.layout())?)
    }
}

impl Witness for G2 {
    fn name(&self) -> &'static str {
        "g2"
    }
    fn description(&self) -> &'static str {
        "genuine witness with number moments, largest bipartition term"
    }
    fn evaluate(&self, state: &QuantumState, ctx: &WitnessContext) -> Result<WitnessReport> {
        genuine_g2(state, ctx.modes_for(state.layout())?)
    }
}

impl Witness for Dv {
    fn name(&self) -> &'static str {
        "dv"
    }
    fn description(&self) -> &'static str {
        "qubit analog of the genuine witness with lowering operators"
    }
    fn evaluate(&self, state: &QuantumState, ctx: &WitnessContext) -> Result<WitnessReport> {
        dv_genuine(state, ctx.qubits_for(state.layout())?, ctx.dv)
    }
}

impl Witness for Negativity {
    fn name(&self) -> &'static str {
        "negativity"
    }
    fn description(&self) -> &'static str {
        "largest PPT negativity over the single-vs-pair bipartitions"
    }
    fn evaluate(&self, state: &QuantumState, ctx: &WitnessContext) -> Result<WitnessReport> {
        negativity_scan(state, ctx.parties_for(state.layout())?)
    }
}

/// Name-indexed collection of witnesses.
pub struct WitnessRegistry {
    entries: BTreeMap<&'static str, Box<dyn Witness>>,
}

impl WitnessRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(VlfFixed));
        r.register(Box::new(VlfOptimized));
        for i in 0..3 {
            r.register(Box::new(Inseparability(i)));
        }
        r.register(Box::new(G1));
        r.register(Box::new(G2));
        r.register(Box::new(Dv));
        r.register(Box::new(Negativity));
        r
    }

    /// Adds or replaces a witness under its own name.
    pub fn register(&mut self, w: Box<dyn Witness>) {
        self.entries.insert(w.name(), w);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Witness> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Unknown {
                what: "witness",
                name: name.to_string(),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn evaluate(
        &self,
        name: &str,
        state: &QuantumState,
        ctx: &WitnessContext,
    ) -> Result<WitnessReport> {
        self.get(name)?.evaluate(state, ctx)
    }
}

/// `"1|23"`-style label of the bipartition singling out party `alpha`.
pub(crate) fn bipartition_label(alpha: usize) -> String {
    let rest: String = (0..3)
        .filter(|&k| k != alpha)
        .map(|k| char::from(b'1' + k as u8))
        .collect();
    format!("{}|{}", alpha + 1, rest)
}
