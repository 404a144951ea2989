//! Circuit model: asymmetric SQUID terminating an open transmission-line
//! cavity.
//!
//! Everything here works in the internal unit system `ħ = 1`, `φ₀ = 1`, with
//! energies in rad/s. Capacitances and inductances are therefore expressed in
//! the matching units (`C·φ₀²/ħ` and `L·ħ/φ₀²`), which leaves products such
//! as `l·c` and ratios such as `l·d·E` unchanged from SI.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum `|Δ|` accepted by [`SquidParams::validate`].
pub const MAX_ASYMMETRY: f64 = 0.2;
/// Maximum pump amplitude (in flux-quantum units).
pub const MAX_PUMP_AMPLITUDE: f64 = 0.1;

const SINGULAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquidParams {
    pub ej1: f64,
    pub ej2: f64,
    pub c1: f64,
    pub c2: f64,
    /// Static flux bias, in units of the reduced flux quantum.
    pub flux_bias: f64,
    /// Pump amplitude λ, same units as `flux_bias`.
    pub pump_amplitude: f64,
    /// Pump angular frequency ω_d. Scenarios usually overwrite this with the
    /// resonance condition derived from the spectrum.
    #[serde(default)]
    pub pump_frequency: f64,
}

impl SquidParams {
    /// Junction asymmetry `(E_J2 − E_J1)/(E_J1 + E_J2)`.
    pub fn asymmetry(&self) -> f64 {
        (self.ej2 - self.ej1) / (self.ej1 + self.ej2)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.ej1,
            self.ej2,
            self.c1,
            self.c2,
            self.flux_bias,
            self.pump_amplitude,
            self.pump_frequency,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite SQUID parameter".into()));
        }
        if self.ej1 <= 0.0 || self.ej2 <= 0.0 {
            return Err(Error::InvalidParameter(
                "Josephson energies must be positive".into(),
            ));
        }
        if self.c1 < 0.0 || self.c2 < 0.0 {
            return Err(Error::InvalidParameter(
                "junction capacitances must be non-negative".into(),
            ));
        }
        if self.asymmetry().abs() >= MAX_ASYMMETRY {
            return Err(Error::InvalidParameter(format!(
                "asymmetry |Δ| = {:.4} outside the small-asymmetry regime (< {MAX_ASYMMETRY})",
                self.asymmetry().abs()
            )));
        }
        if !(0.0..MAX_PUMP_AMPLITUDE).contains(&self.pump_amplitude) {
            return Err(Error::InvalidParameter(format!(
                "pump amplitude {} must lie in [0, {MAX_PUMP_AMPLITUDE})",
                self.pump_amplitude
            )));
        }
        Ok(())
    }
}

/// Static parameters of the single effective junction equivalent to the
/// weakly pumped SQUID.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveJunction {
    /// Static effective Josephson energy `E`.
    pub e_bar: f64,
    /// Sensitivity of the Josephson energy to the pump, `δE`.
    pub delta_e: f64,
    /// Pump-induced phase-offset amplitude `δα`.
    pub delta_alpha: f64,
    pub c_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityParams {
    pub length: f64,
    pub cap_per_len: f64,
    pub ind_per_len: f64,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length", self.length),
            ("cap_per_len", self.cap_per_len),
            ("ind_per_len", self.ind_per_len),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "cavity {name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Right-hand side `R = l·d·E/(2φ₀²)` of the wavenumber equation.
    pub fn boundary_strength(&self, e_bar: f64) -> f64 {
        self.ind_per_len * self.length * e_bar / 2.0
    }
}

/// Exact two-junction effective Josephson energy at external flux `phi_ext`.
pub fn exact_josephson_energy(ej1: f64, ej2: f64, phi_ext: f64) -> f64 {
    (ej1 * ej1 + ej2 * ej2 + 2.0 * ej1 * ej2 * phi_ext.cos())
        .max(0.0)
        .sqrt()
}

/// Effective junction of a slightly asymmetric, weakly pumped SQUID.
pub fn effective_junction(squid: &SquidParams) -> Result<EffectiveJunction> {
    squid.validate()?;
    let phi = squid.flux_bias;
    // δE carries tan(φ) and δα carries sec²(φ/2), tan²(φ/2).
    if phi.cos().abs() < SINGULAR_TOL || (phi / 2.0).cos().abs() < SINGULAR_TOL {
        return Err(Error::SingularBias { bias: phi });
    }
    let delta = squid.asymmetry();
    let e_bar = 2.0 * squid.ej1 * (1.0 + 2.0 * delta).sqrt() * phi.cos().abs();
    let delta_e = e_bar * phi.tan();
    let half = phi / 2.0;
    let sec2 = 1.0 / half.cos().powi(2);
    let tan2 = half.tan().powi(2);
    let delta_alpha = sec2 * delta / (1.0 + tan2 * delta * delta);
    Ok(EffectiveJunction {
        e_bar,
        delta_e,
        delta_alpha,
        c_total: squid.c1 + squid.c2,
    })
}

fn wavenumber_residual(x: f64, rhs: f64) -> f64 {
    x * x.tan() - rhs
}

/// Root of `x·tan(x) = rhs` on branch `(bπ, bπ + π/2)`.
fn branch_root(branch: usize, rhs: f64) -> f64 {
    let base = branch as f64 * PI;
    let pole = base + FRAC_PI_2;
    let eps = 1e-9 * PI;
    let mut lo = base + eps;
    let mut hi = pole - eps;
    if wavenumber_residual(lo, rhs) > 0.0 {
        lo = base;
    }
    // Very stiff boundaries push the root into the last ε before the pole.
    let mut guard = 0;
    while wavenumber_residual(hi, rhs) < 0.0 && guard < 200 {
        hi = 0.5 * (hi + pole);
        guard += 1;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if wavenumber_residual(mid, rhs) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    // One Newton polish, kept only if it stays bracketed and helps.
    let f = wavenumber_residual(x, rhs);
    let df = x.tan() + x / x.cos().powi(2);
    let polished = x - f / df;
    if polished > lo && polished < hi && wavenumber_residual(polished, rhs).abs() < f.abs() {
        polished
    } else {
        x
    }
}

/// The `n_modes` smallest positive solutions `k` of `k·d·tan(k·d) = R`.
///
/// For `R > 0` the n-th root sits in `(nπ, nπ + π/2)/d` for `n = 0, 1, …`.
/// For `R = 0` the zero root is not a mode and the roots are `nπ/d` for
/// `n = 1, 2, …`.
pub fn solve_wavenumbers(cavity: &CavityParams, e_bar: f64, n_modes: usize) -> Result<Vec<f64>> {
    cavity.validate()?;
    if n_modes == 0 {
        return Err(Error::InvalidParameter("n_modes must be at least 1".into()));
    }
    if !(e_bar.is_finite() && e_bar >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "effective Josephson energy must be non-negative, got {e_bar}"
        )));
    }
    let rhs = cavity.boundary_strength(e_bar);
    let d = cavity.length;
    let roots = if rhs == 0.0 {
        (1..=n_modes).map(|n| n as f64 * PI / d).collect()
    } else {
        (0..n_modes).map(|b| branch_root(b, rhs) / d).collect()
    };
    Ok(roots)
}

/// Solved cavity spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub wavenumbers: Vec<f64>,
    pub mode_caps: Vec<f64>,
    pub mode_inds: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// `cos(k_n d)`: mode amplitude at the SQUID edge.
    pub edge_amplitudes: Vec<f64>,
    /// `√(½·√(l_n/c_n))`: flux per unit of `a_n + a_n†`.
    pub zero_point: Vec<f64>,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavenumbers.is_empty()
    }
}

pub fn mode_spectrum(cavity: &CavityParams, e_bar: f64, n_modes: usize) -> Result<ModeSpectrum> {
    let wavenumbers = solve_wavenumbers(cavity, e_bar, n_modes)?;
    let d = cavity.length;
    let (c, l) = (cavity.cap_per_len, cavity.ind_per_len);
    let mut spec = ModeSpectrum {
        wavenumbers: wavenumbers.clone(),
        mode_caps: Vec::with_capacity(n_modes),
        mode_inds: Vec::with_capacity(n_modes),
        frequencies: Vec::with_capacity(n_modes),
        edge_amplitudes: Vec::with_capacity(n_modes),
        zero_point: Vec::with_capacity(n_modes),
    };
    for k in wavenumbers {
        let kd = k * d;
        let sinc = (2.0 * kd).sin() / (2.0 * kd);
        let cap = c * d / 2.0 * (1.0 + sinc);
        let inv_ind = kd * kd / (2.0 * l * d) * (1.0 - sinc);
        let ind = 1.0 / inv_ind;
        spec.mode_caps.push(cap);
        spec.mode_inds.push(ind);
        spec.frequencies.push(1.0 / (ind * cap).sqrt());
        spec.edge_amplitudes.push(kd.cos());
        spec.zero_point.push((0.5 * (ind / cap).sqrt()).sqrt());
    }
    Ok(spec)
}

/// Fully symmetric coupling tensor of a given rank over `n` modes, stored
/// densely in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTensor {
    pub rank: usize,
    pub modes: usize,
    pub data: Vec<f64>,
}

impl CouplingTensor {
    /// `scale · Π_i weights[idx_i]` for every index tuple.
    fn outer(rank: usize, scale: f64, weights: &[f64]) -> Self {
        let modes = weights.len();
        let len = modes.pow(rank as u32);
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; rank];
        for _ in 0..len {
            // Sorted order makes permuted entries bit-identical.
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            data.push(scale * sorted.iter().map(|&i| weights[i]).product::<f64>());
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < modes {
                    break;
                }
                *slot = 0;
            }
        }
        Self { rank, modes, data }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.rank, "index rank mismatch");
        let flat = idx.iter().fold(0, |acc, &i| {
            assert!(i < self.modes, "mode index {i} out of range");
            acc * self.modes + i
        });
        self.data[flat]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    pub m1: CouplingTensor,
    pub m2: CouplingTensor,
    pub m3: CouplingTensor,
    pub n4: CouplingTensor,
    pub m4: CouplingTensor,
}

/// Bare coupling coefficients (multiplying products of mode fluxes) and their
/// tilded forms (multiplying products of `a + a†`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    pub bare: CouplingSet,
    pub tilde: CouplingSet,
}

fn coupling_set(eff: &EffectiveJunction, weights: &[f64]) -> CouplingSet {
    let e = eff.e_bar;
    // φ₀ = 1, so the cubic coefficient's φ₀³ denominator is implicit.
    CouplingSet {
        m1: CouplingTensor::outer(1, e * eff.delta_alpha, weights),
        m2: CouplingTensor::outer(2, e / 2.0, weights),
        m3: CouplingTensor::outer(3, e * eff.delta_alpha / 6.0, weights),
        n4: CouplingTensor::outer(4, e / 24.0, weights),
        m4: CouplingTensor::outer(4, eff.delta_e / 24.0, weights),
    }
}

pub fn coupling_table(spectrum: &ModeSpectrum, eff: &EffectiveJunction) -> CouplingTable {
    let tilde_weights: Vec<f64> = spectrum
        .edge_amplitudes
        .iter()
        .zip(&spectrum.zero_point)
        .map(|(c, z)| c * z)
        .collect();
    CouplingTable {
        bare: coupling_set(eff, &spectrum.edge_amplitudes),
        tilde: coupling_set(eff, &tilde_weights),
    }
}

/// Three-mode down-conversion rate `g₀ = 3·λ·M̃⁽³⁾₁₂₃` on the three lowest
/// modes, as a positive magnitude.
pub fn g0_3spdc(table: &CouplingTable, pump_amplitude: f64) -> Result<f64> {
    if table.tilde.m3.modes < 3 {
        return Err(Error::InvalidParameter(
            "three-mode down-conversion needs at least three modes".into(),
        ));
    }
    Ok((3.0 * pump_amplitude * table.tilde.m3.get(&[0, 1, 2])).abs())
}

/// Full circuit description read from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    pub squid: SquidParams,
    pub cavity: CavityParams,
}

/// Every derived quantity of a circuit in one place.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitModel {
    pub params: CircuitParams,
    pub junction: EffectiveJunction,
    pub spectrum: ModeSpectrum,
    pub couplings: CouplingTable,
}

impl CircuitModel {
    pub fn derive(params: CircuitParams, n_modes: usize) -> Result<Self> {
        let junction = effective_junction(&params.squid)?;
        let spectrum = mode_spectrum(&params.cavity, junction.e_bar, n_modes)?;
        let couplings = coupling_table(&spectrum, &junction);
        Ok(Self {
            params,
            junction,
            spectrum,
            couplings,
        })
    }

    pub fn g0(&self) -> Result<f64> {
        g0_3spdc(&self.couplings, self.params.squid.pump_amplitude)
    }

    /// Requires `E > λ|δE|`, so the pumped Josephson energy never changes
    /// sign and its absolute value can be dropped.
    pub fn check_pump_regime(&self) -> Result<()> {
        let lam = self.params.squid.pump_amplitude;
        if lam * self.junction.delta_e.abs() >= self.junction.e_bar {
            return Err(Error::InvalidParameter(format!(
                "pump too strong: λ|δE| = {} reaches E = {}",
                lam * self.junction.delta_e.abs(),
                self.junction.e_bar
            )));
        }
        Ok(())
    }

    /// Pump tone resonant with three-mode down-conversion on the lowest
    /// three modes.
    pub fn resonant_pump(&self) -> f64 {
        self.spectrum.frequencies.iter().take(3).sum()
    }
}
