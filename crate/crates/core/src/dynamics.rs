//! Schrödinger evolution of pure states on a truncated register.
//!
//! The Hamiltonian is
//! `H(t) = H₀ + e^{+iω_d t} H₊ + e^{−iω_d t} H₋ + Σ_k f_k(t) G_k`,
//! where `H±` collect the monomials carrying a drive sign and each `G_k` is a
//! group of undriven monomials modulated by a real envelope `f_k`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{build_sum, OperatorMatrix, QuantumState, RegisterLayout};
use crate::rwa::{is_conjugation_closed, LadderMonomial};

/// Largest register handled by the dense eigendecomposition path.
pub const DENSE_LIMIT: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// Real time-dependent coupling profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Envelope {
    Constant {
        value: f64,
    },
    /// `amplitude · cos(frequency·t + phase)`
    Cosine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Sum of two cosines.
    TwoTone {
        amplitudes: [f64; 2],
        frequencies: [f64; 2],
        #[serde(default)]
        phases: [f64; 2],
    },
    /// `g0 · cos(k·(x0 + v·t))`: a coupler crossing a standing mode function.
    Motional {
        g0: f64,
        k: f64,
        x0: f64,
        v: f64,
    },
}

impl Envelope {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Envelope::Constant { value } => value,
            Envelope::Cosine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).cos(),
            Envelope::TwoTone {
                amplitudes,
                frequencies,
                phases,
            } => (0..2)
                .map(|i| amplitudes[i] * (frequencies[i] * t + phases[i]).cos())
                .sum(),
            Envelope::Motional { g0, k, x0, v } => g0 * (k * (x0 + v * t)).cos(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let values: Vec<f64> = match *self {
            Envelope::Constant { value } => vec![value],
            Envelope::Cosine {
                amplitude,
                frequency,
                phase,
            } => vec![amplitude, frequency, phase],
            Envelope::TwoTone {
                amplitudes,
                frequencies,
                phases,
            } => amplitudes
                .iter()
                .chain(&frequencies)
                .chain(&phases)
                .copied()
                .collect(),
            Envelope::Motional { g0, k, x0, v } => vec![g0, k, x0, v],
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite envelope parameter".into(),
            ));
        }
        Ok(())
    }

    /// Upper bound on `|f(t)|`.
    pub fn peak(&self) -> f64 {
        match *self {
            Envelope::Constant { value } => value.abs(),
            Envelope::Cosine { amplitude, .. } => amplitude.abs(),
            Envelope::TwoTone { amplitudes, .. } => amplitudes[0].abs() + amplitudes[1].abs(),
            Envelope::Motional { g0, .. } => g0.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrivenGroup {
    pub envelope: Envelope,
    pub terms: Vec<LadderMonomial>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    pub static_terms: Vec<LadderMonomial>,
    #[serde(default)]
    pub driven: Vec<DrivenGroup>,
    /// Pump frequency ω_d used by terms with a non-zero drive sign.
    #[serde(default)]
    pub drive_frequency: f64,
}

impl HamiltonianSpec {
    pub fn from_static(terms: Vec<LadderMonomial>) -> Self {
        Self {
            static_terms: terms,
            ..Self::default()
        }
    }

    pub fn is_static(&self) -> bool {
        self.driven.is_empty() && self.static_terms.iter().all(|t| t.drive_sign == 0)
    }

    /// Checks that `H(t)` is Hermitian at every time: the static list and
    /// each envelope group must be closed under conjugation.
    pub fn validate(&self) -> Result<()> {
        if !self.drive_frequency.is_finite() {
            return Err(Error::InvalidParameter("non-finite drive frequency".into()));
        }
        let scale = |terms: &[LadderMonomial]| {
            terms
                .iter()
                .map(|t| t.coeff.norm())
                .fold(0.0, f64::max)
                .max(1.0)
        };
        if !is_conjugation_closed(&self.static_terms, 1e-12 * scale(&self.static_terms)) {
            return Err(Error::NonHermitian(
                "static terms are not closed under conjugation".into(),
            ));
        }
        for (k, g) in self.driven.iter().enumerate() {
            g.envelope.validate()?;
            if g.terms.iter().any(|t| t.drive_sign != 0) {
                return Err(Error::InvalidParameter(format!(
                    "enveloped group {k} contains drive-signed terms"
                )));
            }
            if !is_conjugation_closed(&g.terms, 1e-12 * scale(&g.terms)) {
                return Err(Error::NonHermitian(format!(
                    "enveloped group {k} is not closed under conjugation"
                )));
            }
        }
        Ok(())
    }

    pub fn compile(&self, layout: &RegisterLayout) -> Result<CompiledHamiltonian> {
        self.validate()?;
        let pick = |s: i8| -> Vec<LadderMonomial> {
            self.static_terms
                .iter()
                .filter(|t| t.drive_sign == s)
                .cloned()
                .collect()
        };
        let groups = self
            .driven
            .iter()
            .map(|g| Ok((g.envelope.clone(), build_sum(&g.terms, layout)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CompiledHamiltonian {
            h0: build_sum(&pick(0), layout)?,
            h_plus: build_sum(&pick(1), layout)?,
            h_minus: build_sum(&pick(-1), layout)?,
            groups,
            omega_d: self.drive_frequency,
        })
    }
}

/// Matrix form of a [`HamiltonianSpec`] on a fixed register.
#[derive(Debug, Clone)]
pub struct CompiledHamiltonian {
    h0: OperatorMatrix,
    h_plus: OperatorMatrix,
    h_minus: OperatorMatrix,
    groups: Vec<(Envelope, OperatorMatrix)>,
    omega_d: f64,
}

impl CompiledHamiltonian {
    pub fn layout(&self) -> &RegisterLayout {
        self.h0.layout()
    }

    /// `out = −i H(t) ψ`.
    pub fn derivative(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = ZERO);
        self.h0.mul_add(MINUS_I, psi, out);
        if self.h_plus.nnz() > 0 {
            let ph = Complex64::from_polar(1.0, self.omega_d * t);
            self.h_plus.mul_add(MINUS_I * ph, psi, out);
            self.h_minus.mul_add(MINUS_I * ph.conj(), psi, out);
        }
        for (env, g) in &self.groups {
            let f = env.eval(t);
            if f != 0.0 {
                g.mul_add(MINUS_I * f, psi, out);
            }
        }
    }

    /// `⟨ψ|H(t)|ψ⟩`.
    pub fn energy(&self, t: f64, state: &QuantumState) -> Result<f64> {
        let psi = state
            .amplitudes()
            .ok_or_else(|| Error::InvalidParameter("energy needs a pure state".into()))?;
        let mut d = vec![ZERO; psi.len()];
        self.derivative(t, psi.as_slice(), &mut d);
        // d = −iHψ, so ⟨ψ|Hψ⟩ = i⟨ψ|d⟩.
        let e: Complex64 = psi.iter().zip(&d).map(|(a, b)| a.conj() * b).sum();
        Ok((Complex64::new(0.0, 1.0) * e).re)
    }

    /// Crude bound on the spectral radius, used for the first step size.
    fn rate_bound(&self) -> f64 {
        let row_max = |m: &OperatorMatrix| {
            let mut rows = vec![0.0f64; m.dim()];
            for (r, _, v) in m.entries() {
                rows[r] += v.norm();
            }
            rows.into_iter().fold(0.0, f64::max)
        };
        let mut bound = row_max(&self.h0) + row_max(&self.h_plus) + row_max(&self.h_minus);
        for (env, g) in &self.groups {
            bound += env.peak() * row_max(g);
        }
        bound + self.omega_d.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepControl {
    pub atol: f64,
    pub rtol: f64,
    /// Optional cap on the step size.
    #[serde(default)]
    pub max_step: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    50_000_000
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-9,
            max_step: None,
            max_steps: default_max_steps(),
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.atol > 0.0 && self.rtol >= 0.0) {
            return Err(Error::InvalidParameter(
                "step control needs atol > 0 and rtol >= 0".into(),
            ));
        }
        if matches!(self.max_step, Some(h) if !(h > 0.0)) {
            return Err(Error::InvalidParameter("max_step must be positive".into()));
        }
        Ok(())
    }
}

/// States on a time grid plus named real observable series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub observables: BTreeMap<String, Vec<f64>>,
    /// Accepted integrator steps, zero for the expm path.
    pub steps: usize,
}

impl Trajectory {
    /// Evaluates `f` on every state and stores the series under `name`.
    pub fn record<F>(&mut self, name: &str, mut f: F) -> Result<()>
    where
        F: FnMut(f64, &QuantumState) -> Result<f64>,
    {
        let series = self
            .times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| f(t, s))
            .collect::<Result<Vec<_>>>()?;
        self.observables.insert(name.to_string(), series);
        Ok(())
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with a `time` column and one column per observable, written with
    /// 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for name in self.observables.keys() {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t:.16e}");
            for series in self.observables.values() {
                let _ = write!(out, ",{:.16e}", series[i]);
            }
            out.push('\n');
        }
        out
    }
}

fn check_initial(psi0: &QuantumState, layout: &RegisterLayout) -> Result<DVector<Complex64>> {
    if psi0.layout() != layout {
        return Err(Error::LayoutMismatch(
            "initial state and Hamiltonian layouts differ".into(),
        ));
    }
    let psi = psi0
        .amplitudes()
        .ok_or_else(|| Error::InvalidParameter("evolution needs a pure initial state".into()))?;
    if (psi.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "initial state norm {} is not 1",
            psi.norm()
        )));
    }
    Ok(psi.clone())
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "time grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Integrator<'a> {
    h: &'a CompiledHamiltonian,
    control: StepControl,
    k: Vec<Vec<Complex64>>,
    stage: Vec<Complex64>,
    y_new: Vec<Complex64>,
    fsal_valid: bool,
    step: f64,
    steps: usize,
}

impl<'a> Integrator<'a> {
    fn new(h: &'a CompiledHamiltonian, control: StepControl, dim: usize) -> Self {
        Self {
            h,
            control,
            k: vec![vec![ZERO; dim]; 7],
            stage: vec![ZERO; dim],
            y_new: vec![ZERO; dim],
            fsal_valid: false,
            step: 0.0,
            steps: 0,
        }
    }

    /// Advances `y` from `t0` to exactly `t1`.
    fn advance(&mut self, y: &mut [Complex64], t0: f64, t1: f64) -> Result<()> {
        let span = t1 - t0;
        if self.step <= 0.0 {
            self.step = (0.01 / self.h.rate_bound().max(1e-300)).min(span);
        }
        let mut t = t0;
        while t < t1 {
            if self.steps >= self.control.max_steps {
                return Err(Error::StepUnderflow { time: t });
            }
            let mut h = self.step.min(t1 - t);
            if let Some(hm) = self.control.max_step {
                h = h.min(hm);
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { time: t });
            }
            if !self.fsal_valid {
                let (k0, _) = self.k.split_at_mut(1);
                self.h.derivative(t, y, &mut k0[0]);
                self.fsal_valid = true;
            }
            for s in 1..7 {
                for i in 0..y.len() {
                    let mut acc = ZERO;
                    for (j, a) in A[s].iter().enumerate().take(s) {
                        if *a != 0.0 {
                            acc += self.k[j][i] * *a;
                        }
                    }
                    self.stage[i] = y[i] + acc * h;
                }
                let (_, rest) = self.k.split_at_mut(s);
                self.h.derivative(t + C[s] * h, &self.stage, &mut rest[0]);
            }
            // Stage 7 was evaluated at the 5th-order solution.
            self.y_new.copy_from_slice(&self.stage);
            let mut err_sq = 0.0;
            for i in 0..y.len() {
                let mut e = ZERO;
                for (j, ej) in E.iter().enumerate() {
                    if *ej != 0.0 {
                        e += self.k[j][i] * *ej;
                    }
                }
                let scale =
                    self.control.atol + self.control.rtol * y[i].norm().max(self.y_new[i].norm());
                err_sq += (e.norm() * h / scale).powi(2);
            }
            let err = (err_sq / y.len() as f64).sqrt();
            if err <= 1.0 {
                t = if t1 - t - h <= 1e-15 * t1.abs().max(1.0) {
                    t1
                } else {
                    t + h
                };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                self.steps += 1;
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // A step clipped to a grid point says little about the next one.
                self.step = if h < self.step {
                    self.step.max(h * factor)
                } else {
                    h * factor
                };
            } else {
                self.step = h * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Ok(())
    }
}

/// Integrates `i dψ/dt = H(t) ψ` with an adaptive Dormand–Prince 5(4) pair.
///
/// `t_grid[0]` is the time of `psi0`. The norm is never renormalized, so
/// its drift is a diagnostic of the step control.
pub fn evolve(
    h: &HamiltonianSpec,
    psi0: &QuantumState,
    t_grid: &[f64],
    control: StepControl,
) -> Result<Trajectory> {
    control.validate()?;
    check_grid(t_grid)?;
    let compiled = h.compile(psi0.layout())?;
    evolve_compiled(&compiled, psi0, t_grid, control)
}

pub fn evolve_compiled(
    h: &CompiledHamiltonian,
    psi0: &QuantumState,
    t_grid: &[f64],
    control: StepControl,
) -> Result<Trajectory> {
    control.validate()?;
    check_grid(t_grid)?;
    let layout = h.layout().clone();
    let mut y: Vec<Complex64> = check_initial(psi0, &layout)?.iter().copied().collect();
    let mut integ = Integrator::new(h, control, y.len());
    let mut states = Vec::with_capacity(t_grid.len());
    states.push(psi0.clone());
    for w in t_grid.windows(2) {
        integ.advance(&mut y, w[0], w[1])?;
        states.push(QuantumState::pure_unnormalized(&layout, y.clone())?);
    }
    Ok(Trajectory {
        times: t_grid.to_vec(),
        states,
        observables: BTreeMap::new(),
        steps: integ.steps,
    })
}

/// Dense eigendecomposition of a static Hamiltonian, reusable across times.
#[derive(Debug, Clone)]
pub struct ExpmPropagator {
    layout: RegisterLayout,
    vectors: DMatrix<Complex64>,
    values: DVector<f64>,
}

impl ExpmPropagator {
    pub fn new(h: &HamiltonianSpec, layout: &RegisterLayout) -> Result<Self> {
        if !h.is_static() {
            return Err(Error::InvalidParameter(
                "the eigendecomposition path needs a static Hamiltonian".into(),
            ));
        }
        let dim = layout.dim();
        if dim > DENSE_LIMIT {
            return Err(Error::DimensionTooLarge {
                dim,
                limit: DENSE_LIMIT,
            });
        }
        let m = h.compile(layout)?.h0.to_dense();
        let eig = SymmetricEigen::new(m);
        Ok(Self {
            layout: layout.clone(),
            vectors: eig.eigenvectors,
            values: eig.eigenvalues,
        })
    }

    /// `exp(−iHt) ψ₀`.
    pub fn propagate(&self, psi0: &QuantumState, t: f64) -> Result<QuantumState> {
        let psi = check_initial(psi0, &self.layout)?;
        let mut coeffs = self.vectors.ad_mul(&psi);
        for (c, &e) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = &self.vectors * coeffs;
        QuantumState::pure_unnormalized(&self.layout, out.iter().copied().collect())
    }
}

/// `exp(−iHt) ψ₀` through a dense eigendecomposition; the integration
/// oracle.
pub fn evolve_static_expm(
    h: &HamiltonianSpec,
    psi0: &QuantumState,
    t: f64,
) -> Result<QuantumState> {
    ExpmPropagator::new(h, psi0.layout())?.propagate(psi0, t)
}

/// Largest absolute change of each observable between successive cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub cutoffs: Vec<usize>,
    /// One map per successive pair of cutoffs.
    pub changes: Vec<BTreeMap<String, f64>>,
    pub tolerance: f64,
}

impl ConvergenceReport {
    /// Change between the last two cutoffs, per observable.
    pub fn final_changes(&self) -> &BTreeMap<String, f64> {
        self.changes.last().expect("at least one cutoff pair")
    }

    pub fn max_final_change(&self) -> f64 {
        self.final_changes().values().copied().fold(0.0, f64::max)
    }

    pub fn converged(&self) -> bool {
        self.max_final_change() <= self.tolerance
    }

    /// Observables whose final change exceeds the tolerance.
    pub fn offenders(&self) -> Vec<String> {
        self.final_changes()
            .iter()
            .filter(|(_, v)| **v > self.tolerance)
            .map(|(k, _)| k.clone())
            .collect()
    }
}

/// Runs `run` at every cutoff and compares recorded observables.
///
/// Non-finite changes count as infinite, so a diverging run is flagged.
pub fn cutoff_sweep<F>(mut run: F, cutoffs: &[usize], tolerance: f64) -> Result<ConvergenceReport>
where
    F: FnMut(usize) -> Result<Trajectory>,
{
    if cutoffs.len() < 2 {
        return Err(Error::InvalidParameter(
            "cutoff sweep needs at least two cutoffs".into(),
        ));
    }
    let runs = cutoffs
        .iter()
        .map(|&c| run(c))
        .collect::<Result<Vec<_>>>()?;
    let mut changes = Vec::new();
    for pair in runs.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.times != b.times {
            return Err(Error::InvalidParameter(
                "cutoff runs used different time grids".into(),
            ));
        }
        let mut map = BTreeMap::new();
        for (name, sa) in &a.observables {
            if let Some(sb) = b.observables.get(name) {
                let d = sa
                    .iter()
                    .zip(sb)
                    .map(|(x, y)| {
                        let d = (x - y).abs();
                        if d.is_finite() {
                            d
                        } else {
                            f64::INFINITY
                        }
                    })
                    .fold(0.0, f64::max);
                map.insert(name.clone(), d);
            }
        }
        changes.push(map);
    }
    Ok(ConvergenceReport {
        cutoffs: cutoffs.to_vec(),
        changes,
        tolerance,
    })
}
