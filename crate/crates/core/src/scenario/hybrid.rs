use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Plan, Scenario, ScenarioConfig, ScenarioDefaults, TimeGrid};
use crate::dynamics::{HamiltonianSpec, Trajectory};
use crate::error::{Error, Result};
use crate::hilbert::{vacuum, QuantumState, RegisterLayout};
use crate::rwa::{LadderMonomial, OpKind};
use crate::witness::WitnessContext;

use OpKind::{Annihilate, Create, PauliMinus, PauliPlus};

const QUBITS: [usize; 3] = [3, 4, 5];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridParams {
    #[serde(default)]
    pub g0: Option<f64>,
    /// Jaynes–Cummings couplings, `10·g0` each by default.
    #[serde(default)]
    pub lambda: Option<[f64; 3]>,
}

/// Largest overlap of a three-qubit state with `(|000⟩ + η|111⟩)/√(1+|η|²)`
/// over complex `η`, including the `|111⟩` limit.
pub fn swap_fidelity(qubits: &QuantumState) -> Result<f64> {
    let l = qubits.layout();
    if l.len() != 3 || l.dim() != 8 {
        return Err(Error::LayoutMismatch(
            "swap fidelity needs three qubits".into(),
        ));
    }
    let rho = qubits.density_matrix();
    let (a, d, b) = (rho[(0, 0)].re, rho[(7, 7)].re, rho[(0, 7)].norm());
    Ok(0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt())
}

/// Three-mode down-conversion with each mode swapping into a resonant qubit.
///
/// Written in the interaction frame, where the free terms cancel.
/// Subsystems 0–2 are the modes and 3–5 their qubits.
pub struct HybridSwap;

impl Scenario for HybridSwap {
    fn name(&self) -> &'static str {
        "hybrid-swap"
    }

    fn description(&self) -> &'static str {
        "down-conversion with Jaynes-Cummings transfer into three qubits"
    }

    fn defaults(&self) -> ScenarioDefaults {
        ScenarioDefaults {
            cutoff: 4,
            grid: TimeGrid::new(0.0, 0.2, 21),
            witnesses: vec!["dv", "negativity", "g2"],
        }
    }

    fn prepare(&self, cfg: &ScenarioConfig, cutoff: usize) -> Result<Plan> {
        if cfg.circuit.is_some() {
            return Err(Error::InvalidParameter(
                "hybrid-swap takes direct parameters only".into(),
            ));
        }
        let p: HybridParams = cfg.parse_params()?;
        let g0 = p.g0.unwrap_or(1.0);
        let lambda = p.lambda.unwrap_or([10.0 * g0; 3]);
        if !g0.is_finite() || lambda.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::InvalidParameter(
                "hybrid-swap needs finite g0 and non-negative couplings".into(),
            ));
        }
        let layout = RegisterLayout::hybrid(3, cutoff, 3)?;
        let c = |v: f64| Complex64::new(v, 0.0);
        let up = LadderMonomial::undriven(vec![(0, Create), (1, Create), (2, Create)], c(g0));
        let mut terms = vec![up.conjugate(), up];
        for (i, &l) in lambda.iter().enumerate() {
            let jc = LadderMonomial::undriven(vec![(QUBITS[i], PauliPlus), (i, Annihilate)], c(l));
            terms.push(jc.conjugate());
            terms.push(jc);
        }
        Ok(Plan {
            hamiltonian: HamiltonianSpec::from_static(terms),
            initial: vacuum(&layout),
            rate: g0.abs(),
            axis: "g0t",
            companions: Vec::new(),
        })
    }

    fn observe(&self, traj: &mut Trajectory) -> Result<()> {
        let one = Complex64::new(1.0, 0.0);
        for i in 0..3 {
            let n = LadderMonomial::undriven(vec![(i, Create), (i, Annihilate)], one);
            traj.record(&format!("n{}", i + 1), |_, s| Ok(s.moment(&n)?.re))?;
            let e = LadderMonomial::undriven(
                vec![(QUBITS[i], PauliPlus), (QUBITS[i], PauliMinus)],
                one,
            );
            traj.record(&format!("p{}", i + 1), |_, s| Ok(s.moment(&e)?.re))?;
        }
        traj.record("swap_fidelity", |_, s| {
            swap_fidelity(&s.partial_trace(&QUBITS)?)
        })?;
        traj.record("qubit_purity", |_, s| {
            Ok(s.partial_trace(&QUBITS)?.purity())
        })?;
        Ok(())
    }

    fn witness_context(&self, _layout: &RegisterLayout) -> WitnessContext {
        WitnessContext {
            modes: Some([0, 1, 2]),
            qubits: Some(QUBITS),
            parties: Some(QUBITS),
            ..WitnessContext::default()
        }
    }
}
