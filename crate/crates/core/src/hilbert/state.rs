use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{apply_to_basis, validate_term};
use super::{OperatorMatrix, RegisterLayout, SubsystemKind};
use crate::error::{Error, Result};
use crate::rwa::LadderMonomial;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum StateRepr {
    Pure(DVector<Complex64>),
    Density(DMatrix<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    layout: RegisterLayout,
    repr: StateRepr,
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

impl QuantumState {
    /// Normalized pure state.
    pub fn pure(layout: &RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = Self::pure_unnormalized(layout, amplitudes)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::MalformedState(format!("state norm {norm} is not 1")));
        }
        Ok(s)
    }

    /// Pure amplitude vector without a norm check, for perturbative
    /// constructions that are deliberately unnormalized.
    pub fn pure_unnormalized(layout: &RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        layout.validate()?;
        if amplitudes.len() != layout.dim() {
            return Err(Error::LayoutMismatch(format!(
                "{} amplitudes for dimension {}",
                amplitudes.len(),
                layout.dim()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::MalformedState("non-finite amplitude".into()));
        }
        Ok(Self {
            layout: layout.clone(),
            repr: StateRepr::Pure(DVector::from_vec(amplitudes)),
        })
    }

    /// Density operator: Hermitian, unit trace, positive semidefinite.
    pub fn density(layout: &RegisterLayout, rho: DMatrix<Complex64>) -> Result<Self> {
        layout.validate()?;
        let dim = layout.dim();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::LayoutMismatch(format!(
                "{}x{} density for dimension {dim}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let defect = (&rho - rho.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if defect > 1e-12 {
            return Err(Error::MalformedState(format!(
                "density not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr - ONE).norm() > 1e-9 {
            return Err(Error::MalformedState(format!(
                "density trace {tr} is not 1"
            )));
        }
        let min = hermitian_spectrum(&rho)[0];
        if min < -1e-9 {
            return Err(Error::MalformedState(format!(
                "density has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self {
            layout: layout.clone(),
            repr: StateRepr::Density(rho),
        })
    }

    pub(crate) fn density_unchecked(layout: &RegisterLayout, rho: DMatrix<Complex64>) -> Self {
        Self {
            layout: layout.clone(),
            repr: StateRepr::Density(rho),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, StateRepr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&DVector<Complex64>> {
        match &self.repr {
            StateRepr::Pure(v) => Some(v),
            StateRepr::Density(_) => None,
        }
    }

    /// `‖ψ‖` for pure states, `Tr ρ` for densities.
    pub fn norm(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(v) => v.norm(),
            StateRepr::Density(m) => m.trace().re,
        }
    }

    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        match &self.repr {
            StateRepr::Pure(v) => v * v.adjoint(),
            StateRepr::Density(m) => m.clone(),
        }
    }

    pub fn to_density(&self) -> Self {
        Self::density_unchecked(&self.layout, self.density_matrix())
    }

    fn require_layout(&self, other: &RegisterLayout) -> Result<()> {
        if &self.layout != other {
            return Err(Error::LayoutMismatch(
                "state and operator layouts differ".into(),
            ));
        }
        Ok(())
    }

    /// `⟨ψ|O|ψ⟩` or `Tr(ρO)`; no normalization is applied.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<Complex64> {
        self.require_layout(op.layout())?;
        Ok(match &self.repr {
            StateRepr::Pure(v) => {
                let ov = op.apply(v.as_slice());
                v.iter().zip(&ov).map(|(a, b)| a.conj() * b).sum()
            }
            StateRepr::Density(rho) => op.entries().map(|(r, c, val)| val * rho[(c, r)]).sum(),
        })
    }

    /// Expectation of a single monomial without materializing its matrix.
    pub fn moment(&self, term: &LadderMonomial) -> Result<Complex64> {
        validate_term(term, &self.layout)?;
        let strides = self.layout.strides();
        let dim = self.layout.dim();
        let mut acc = ZERO;
        match &self.repr {
            StateRepr::Pure(v) => {
                for col in 0..dim {
                    if v[col] == ZERO {
                        continue;
                    }
                    if let Some((row, val)) = apply_to_basis(term, &self.layout, &strides, col) {
                        acc += v[row].conj() * val * v[col];
                    }
                }
            }
            StateRepr::Density(rho) => {
                for col in 0..dim {
                    if let Some((row, val)) = apply_to_basis(term, &self.layout, &strides, col) {
                        acc += val * rho[(col, row)];
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Reduced density operator over `keep`, with subsystems in the order
    /// listed.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "partial trace keeps nothing".into(),
            ));
        }
        let kept_layout = self.layout.select(keep)?;
        let traced: Vec<usize> = (0..self.layout.len())
            .filter(|i| !keep.contains(i))
            .collect();
        let dk = kept_layout.dim();
        let dt: usize = traced
            .iter()
            .map(|&i| self.layout.subsystems[i].dim)
            .product();
        let dim = self.layout.dim();
        let mut kidx = vec![0usize; dim];
        let mut tidx = vec![0usize; dim];
        for i in 0..dim {
            let d = self.layout.digits(i);
            kidx[i] = keep
                .iter()
                .fold(0, |acc, &s| acc * self.layout.subsystems[s].dim + d[s]);
            tidx[i] = traced
                .iter()
                .fold(0, |acc, &s| acc * self.layout.subsystems[s].dim + d[s]);
        }
        let rho = match &self.repr {
            StateRepr::Pure(v) => {
                let mut m = DMatrix::from_element(dk, dt, ZERO);
                for i in 0..dim {
                    m[(kidx[i], tidx[i])] = v[i];
                }
                &m * m.adjoint()
            }
            StateRepr::Density(full) => {
                let mut groups: Vec<Vec<usize>> = vec![Vec::new(); dt];
                for i in 0..dim {
                    groups[tidx[i]].push(i);
                }
                let mut out = DMatrix::from_element(dk, dk, ZERO);
                for g in &groups {
                    for &i in g {
                        for &j in g {
                            out[(kidx[i], kidx[j])] += full[(i, j)];
                        }
                    }
                }
                out
            }
        };
        Ok(Self::density_unchecked(&kept_layout, rho))
    }

    /// Eigenvalues of the density operator, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        match &self.repr {
            StateRepr::Pure(v) => {
                let mut ev = vec![0.0; self.layout.dim()];
                *ev.last_mut().unwrap() = v.norm_squared();
                ev
            }
            StateRepr::Density(m) => hermitian_spectrum(m),
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(v) => v.norm_squared().powi(2),
            StateRepr::Density(m) => (m * m).trace().re,
        }
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.spectrum()
            .into_iter()
            .filter(|&p| p > 1e-15)
            .map(|p| -p * p.ln())
            .sum()
    }

    /// Tensor product, subsystems concatenated in order.
    pub fn product(parts: &[QuantumState]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
        let mut subs = first.layout.subsystems.clone();
        let mut acc = first.clone();
        for p in &parts[1..] {
            subs.extend(p.layout.subsystems.iter().copied());
            let layout = RegisterLayout::new(subs.clone())?;
            acc = match (&acc.repr, &p.repr) {
                (StateRepr::Pure(a), StateRepr::Pure(b)) => Self {
                    layout,
                    repr: StateRepr::Pure(a.kronecker(b)),
                },
                _ => Self::density_unchecked(
                    &layout,
                    acc.density_matrix().kronecker(&p.density_matrix()),
                ),
            };
        }
        Ok(acc)
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be non-negative and sum
    /// to one.
    pub fn mixture(parts: &[(f64, QuantumState)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let layout = first.1.layout.clone();
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "mixture weights must be non-negative and sum to 1".into(),
            ));
        }
        let dim = layout.dim();
        let mut rho = DMatrix::from_element(dim, dim, ZERO);
        for (w, s) in parts {
            s.require_layout(&layout)?;
            rho += s.density_matrix() * Complex64::new(*w, 0.0);
        }
        Ok(Self::density_unchecked(&layout, rho))
    }

    pub fn to_json(&self) -> Result<String> {
        let (kind, data) = match &self.repr {
            StateRepr::Pure(v) => ("pure", v.iter().map(|c| [c.re, c.im]).collect()),
            // Row-major flattening.
            StateRepr::Density(m) => (
                "density",
                (0..m.nrows())
                    .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
                    .map(|rc| [m[rc].re, m[rc].im])
                    .collect(),
            ),
        };
        let file = StateFile {
            layout: self.layout.clone(),
            kind: kind.into(),
            data,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        file.layout.validate()?;
        let data: Vec<Complex64> = file
            .data
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        match file.kind.as_str() {
            "pure" => Self::pure(&file.layout, data),
            "density" => {
                let dim = file.layout.dim();
                if data.len() != dim * dim {
                    return Err(Error::MalformedState(format!(
                        "{} density entries for dimension {dim}",
                        data.len()
                    )));
                }
                Self::density(&file.layout, DMatrix::from_row_slice(dim, dim, &data))
            }
            other => Err(Error::MalformedState(format!(
                "unknown state kind '{other}'"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    layout: RegisterLayout,
    kind: String,
    data: Vec<[f64; 2]>,
}

pub fn fock_state(layout: &RegisterLayout, occupations: &[usize]) -> Result<QuantumState> {
    if occupations.len() != layout.len() {
        return Err(Error::LayoutMismatch(format!(
            "{} occupations for {} subsystems",
            occupations.len(),
            layout.len()
        )));
    }
    for (i, (&n, s)) in occupations.iter().zip(&layout.subsystems).enumerate() {
        if n >= s.dim {
            return Err(Error::OccupationExceedsCutoff {
                index: i,
                occupation: n,
                cutoff: s.dim - 1,
            });
        }
    }
    let mut amps = vec![ZERO; layout.dim()];
    amps[layout.index(occupations)] = ONE;
    QuantumState::pure(layout, amps)
}

pub fn vacuum(layout: &RegisterLayout) -> QuantumState {
    fock_state(layout, &vec![0; layout.len()]).expect("vacuum fits every layout")
}

fn require_three_qubits(layout: &RegisterLayout) -> Result<()> {
    if layout.len() != 3
        || layout
            .subsystems
            .iter()
            .any(|s| s.kind != SubsystemKind::Qubit)
    {
        return Err(Error::LayoutMismatch(
            "GHZ and W states need exactly three qubits".into(),
        ));
    }
    Ok(())
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz(layout: &RegisterLayout) -> Result<QuantumState> {
    require_three_qubits(layout)?;
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps = vec![ZERO; 8];
    amps[0] = a;
    amps[7] = a;
    QuantumState::pure(layout, amps)
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3`.
pub fn w_state(layout: &RegisterLayout) -> Result<QuantumState> {
    require_three_qubits(layout)?;
    let a = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut amps = vec![ZERO; 8];
    for i in [1, 2, 4] {
        amps[i] = a;
    }
    QuantumState::pure(layout, amps)
}
