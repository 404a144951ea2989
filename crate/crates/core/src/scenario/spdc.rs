use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Plan, Scenario, ScenarioConfig, ScenarioDefaults, TimeGrid};
use crate::circuit::CircuitModel;
use crate::dynamics::{HamiltonianSpec, Trajectory};
use crate::error::{Error, Result};
use crate::hilbert::{covariance_matrix, vacuum, RegisterLayout};
use crate::rwa::{
    default_tolerance, expand_total_hamiltonian, rwa_reduce, KerrMode, LadderMonomial, OpKind,
};

use OpKind::{Annihilate, Create};

const SPDC_WITNESSES: [&str; 7] = ["i1", "i2", "i3", "g1", "g2", "vlf_s_opt", "negativity"];

fn mono(factors: Vec<(usize, OpKind)>, c: Complex64) -> LadderMonomial {
    LadderMonomial::undriven(factors, c)
}

/// `c·(creation word) + h.c.`
fn pair(creators: &[usize], c: Complex64) -> [LadderMonomial; 2] {
    let up = mono(creators.iter().map(|&i| (i, Create)).collect(), c);
    let down = up.conjugate();
    [up, down]
}

/// Mode occupations, the triple moment and the largest off-diagonal
/// quadrature covariances of three modes.
fn observe_three_modes(traj: &mut Trajectory) -> Result<()> {
    let one = Complex64::new(1.0, 0.0);
    for i in 0..3 {
        let n = mono(vec![(i, Create), (i, Annihilate)], one);
        traj.record(&format!("n{}", i + 1), |_, s| Ok(s.moment(&n)?.re))?;
    }
    let triple = mono(vec![(0, Annihilate), (1, Annihilate), (2, Annihilate)], one);
    traj.record("triple_re", |_, s| Ok(s.moment(&triple)?.re))?;
    traj.record("triple_im", |_, s| Ok(s.moment(&triple)?.im))?;
    let offdiag = |block: usize| {
        move |_: f64, s: &crate::hilbert::QuantumState| -> Result<f64> {
            let v = covariance_matrix(s, &[0, 1, 2])?;
            let mut m = 0.0f64;
            for r in 0..3 {
                for c in 0..3 {
                    if r != c {
                        m = m.max(v[(block + r, block + c)].abs());
                    }
                }
            }
            Ok(m)
        }
    };
    traj.record("cov_xx_offdiag", offdiag(0))?;
    traj.record("cov_pp_offdiag", offdiag(3))?;
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpdcParams {
    /// Direct coupling; defaults to 1 when no circuit is given.
    #[serde(default)]
    pub g0: Option<f64>,
    /// Treatment of resonant quartics in the circuit-derived Hamiltonian.
    #[serde(default)]
    pub kerr: KerrMode,
    /// Detuning tolerance of the rotating-wave selection.
    #[serde(default)]
    pub rwa_tolerance: Option<f64>,
    /// Also evolve the full driven lab-frame Hamiltonian of the circuit.
    #[serde(default)]
    pub full_driven: bool,
}

/// Three-mode down-conversion from vacuum.
pub struct TripleSpdc;

impl TripleSpdc {
    fn circuit_plan(
        &self,
        cfg: &ScenarioConfig,
        p: &TripleSpdcParams,
        cutoff: usize,
    ) -> Result<Plan> {
        let circuit = cfg.circuit.expect("checked by caller");
        let model = CircuitModel::derive(circuit, 3)?;
        model.check_pump_regime()?;
        let freqs = model.spectrum.frequencies.clone();
        let resonant = model.resonant_pump();
        let tol = p.rwa_tolerance.unwrap_or_else(|| default_tolerance(&freqs));
        let pump = circuit.squid.pump_frequency;
        let drive = if pump == 0.0 {
            resonant
        } else if (pump - resonant).abs() <= tol {
            pump
        } else {
            return Err(Error::PumpMismatch(format!(
                "pump {pump} differs from ω₁+ω₂+ω₃ = {resonant} by more than {tol}"
            )));
        };
        let expanded =
            expand_total_hamiltonian(&freqs, &model.couplings, circuit.squid.pump_amplitude)?;
        let terms = rwa_reduce(&expanded.interaction, &freqs, drive, tol, p.kerr)?;
        let layout = RegisterLayout::bosons(3, cutoff)?;
        let mut companions = Vec::new();
        if p.full_driven {
            companions.push((
                "_full",
                HamiltonianSpec {
                    static_terms: expanded.all_terms(),
                    driven: Vec::new(),
                    drive_frequency: drive,
                },
            ));
        }
        Ok(Plan {
            hamiltonian: HamiltonianSpec::from_static(terms),
            initial: vacuum(&layout),
            rate: model.g0()?,
            axis: "g0t",
            companions,
        })
    }
}

impl Scenario for TripleSpdc {
    fn name(&self) -> &'static str {
        "3spdc"
    }

    fn description(&self) -> &'static str {
        "three-mode down-conversion g0(a1'a2'a3' + h.c.) from vacuum"
    }

    fn defaults(&self) -> ScenarioDefaults {
        ScenarioDefaults {
            cutoff: 8,
            grid: TimeGrid::new(0.0, 0.18, 101),
            witnesses: SPDC_WITNESSES.to_vec(),
        }
    }

    fn prepare(&self, cfg: &ScenarioConfig, cutoff: usize) -> Result<Plan> {
        let p: TripleSpdcParams = cfg.parse_params()?;
        if cfg.circuit.is_some() {
            if p.g0.is_some() {
                return Err(Error::InvalidParameter(
                    "3spdc takes either a circuit or a direct g0, not both".into(),
                ));
            }
            return self.circuit_plan(cfg, &p, cutoff);
        }
        if p.full_driven || p.rwa_tolerance.is_some() || p.kerr != KerrMode::default() {
            return Err(Error::InvalidParameter(
                "kerr, rwa_tolerance and full_driven need a circuit".into(),
            ));
        }
        let g0 = p.g0.unwrap_or(1.0);
        if !g0.is_finite() {
            return Err(Error::InvalidParameter("g0 must be finite".into()));
        }
        let layout = RegisterLayout::bosons(3, cutoff)?;
        Ok(Plan {
            hamiltonian: HamiltonianSpec::from_static(
                pair(&[0, 1, 2], Complex64::new(g0, 0.0)).to_vec(),
            ),
            initial: vacuum(&layout),
            rate: g0.abs(),
            axis: "g0t",
            companions: Vec::new(),
        })
    }

    fn observe(&self, traj: &mut Trajectory) -> Result<()> {
        observe_three_modes(traj)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleSpdcParams {
    #[serde(default = "unit")]
    pub g: f64,
    /// Phase of both pair-creation couplings.
    #[serde(default = "quarter_turn")]
    pub pump_phase: f64,
    /// Mode frequencies, checked against `pumps` when both are given.
    #[serde(default)]
    pub frequencies: Option<[f64; 3]>,
    /// Pump tones for the (1,2) and (2,3) processes.
    #[serde(default)]
    pub pumps: Option<[f64; 2]>,
    #[serde(default)]
    pub pump_tolerance: Option<f64>,
}

fn unit() -> f64 {
    1.0
}

fn quarter_turn() -> f64 {
    FRAC_PI_2
}

impl Default for DoubleSpdcParams {
    fn default() -> Self {
        Self {
            g: unit(),
            pump_phase: quarter_turn(),
            frequencies: None,
            pumps: None,
            pump_tolerance: None,
        }
    }
}

impl DoubleSpdcParams {
    fn check_pumps(&self) -> Result<()> {
        match (self.frequencies, self.pumps) {
            (None, None) => Ok(()),
            (Some(w), Some(p)) => {
                let tol = self.pump_tolerance.unwrap_or_else(|| default_tolerance(&w));
                for (k, (a, b)) in [(0, 1), (1, 2)].into_iter().enumerate() {
                    if (p[k] - w[a] - w[b]).abs() > tol {
                        return Err(Error::PumpMismatch(format!(
                            "pump {} is {}, expected ω{}+ω{} = {}",
                            k + 1,
                            p[k],
                            a + 1,
                            b + 1,
                            w[a] + w[b]
                        )));
                    }
                }
                Ok(())
            }
            _ => Err(Error::InvalidParameter(
                "frequencies and pumps must be given together".into(),
            )),
        }
    }
}

/// Two simultaneous two-mode down-conversions sharing the middle mode.
pub struct DoubleSpdc;

impl Scenario for DoubleSpdc {
    fn name(&self) -> &'static str {
        "22spdc"
    }

    fn description(&self) -> &'static str {
        "double two-mode down-conversion g(a1'a2' + a2'a3') + h.c. from vacuum"
    }

    fn defaults(&self) -> ScenarioDefaults {
        ScenarioDefaults {
            cutoff: 8,
            grid: TimeGrid::new(0.0, 0.2, 101),
            witnesses: SPDC_WITNESSES.to_vec(),
        }
    }

    fn prepare(&self, cfg: &ScenarioConfig, cutoff: usize) -> Result<Plan> {
        if cfg.circuit.is_some() {
            return Err(Error::InvalidParameter(
                "22spdc takes direct parameters only".into(),
            ));
        }
        let p: DoubleSpdcParams = cfg.parse_params()?;
        if !(p.g.is_finite() && p.pump_phase.is_finite()) {
            return Err(Error::InvalidParameter(
                "g and pump_phase must be finite".into(),
            ));
        }
        p.check_pumps()?;
        let c = Complex64::from_polar(p.g, p.pump_phase);
        let mut terms = pair(&[0, 1], c).to_vec();
        terms.extend(pair(&[1, 2], c));
        let layout = RegisterLayout::bosons(3, cutoff)?;
        Ok(Plan {
            hamiltonian: HamiltonianSpec::from_static(terms),
            initial: vacuum(&layout),
            rate: p.g.abs(),
            axis: "gt",
            companions: Vec::new(),
        })
    }

    fn observe(&self, traj: &mut Trajectory) -> Result<()> {
        observe_three_modes(traj)
    }
}
