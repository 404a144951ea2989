use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simplex::{nelder_mead, SimplexOptions};
use super::WitnessReport;
use crate::error::{Error, Result};
use crate::hilbert::{covariance_matrix, QuantumState};

/// Box searched by [`optimize_vlf`]. S is homogeneous of degree two in
/// `(g, h)`, so an unbounded search would only rescale.
pub const VLF_BOX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VlfParams {
    pub g: [f64; 3],
    pub h: [f64; 3],
}

impl VlfParams {
    pub fn uniform() -> Self {
        Self {
            g: [1.0; 3],
            h: [1.0; 3],
        }
    }

    fn from_slice(x: &[f64]) -> Self {
        Self {
            g: [x[0], x[1], x[2]],
            h: [x[3], x[4], x[5]],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.g.iter().chain(&self.h).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite witness parameter".into(),
            ));
        }
        Ok(())
    }
}

/// Parts of `S`: the bound, `gᵀXg` and `hᵀPh`.
fn vlf_parts(cov: &DMatrix<f64>, p: &VlfParams) -> (f64, f64, f64) {
    let (g, h) = (&p.g, &p.h);
    let mut bound = f64::INFINITY;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        bound = bound.min((h[i] * g[i]).abs() + (h[j] * g[j] + h[k] * g[k]).abs());
    }
    let mut xx = 0.0;
    let mut pp = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            xx += g[i] * g[j] * cov[(i, j)];
            pp += h[i] * h[j] * cov[(3 + i, 3 + j)];
        }
    }
    (bound, xx, pp)
}

/// `S` evaluated directly on a 6×6 covariance matrix ordered
/// `(x₁, x₂, x₃, p₁, p₂, p₃)`.
pub fn vlf_value(cov: &DMatrix<f64>, p: &VlfParams) -> f64 {
    let (b, xx, pp) = vlf_parts(cov, p);
    b - xx - pp
}

fn report(name: &str, cov: &DMatrix<f64>, p: VlfParams) -> WitnessReport {
    let (b, xx, pp) = vlf_parts(cov, &p);
    let mut r = WitnessReport::new(name, b - xx - pp)
        .with("bound", b)
        .with("gXg", xx)
        .with("hPh", pp);
    r.params = Some(p);
    r
}

/// van Loock–Furusawa
/// `S = min_i(|h_i g_i| + |h_j g_j + h_k g_k|) − gᵀXg − hᵀPh`.
pub fn vlf_s(state: &QuantumState, modes: [usize; 3], params: &VlfParams) -> Result<WitnessReport> {
    params.validate()?;
    let cov = covariance_matrix(state, &modes)?;
    Ok(report("vlf_s", &cov, *params))
}

/// Maximizes `S` over `(g, h) ∈ [−2, 2]⁶` with `restarts` seeded simplex
/// searches run in parallel. The result depends only on `seed`.
pub fn optimize_vlf(
    state: &QuantumState,
    modes: [usize; 3],
    restarts: usize,
    seed: u64,
) -> Result<WitnessReport> {
    if restarts == 0 {
        return Err(Error::InvalidParameter(
            "optimize_vlf needs at least one restart".into(),
        ));
    }
    let cov = covariance_matrix(state, &modes)?;
    let opts = SimplexOptions {
        max_iter: 300,
        tol: 1e-10,
        initial_step: 0.5,
        lower: -VLF_BOX,
        upper: VLF_BOX,
    };
    let results: Vec<(f64, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let x0: Vec<f64> = (0..6).map(|_| rng.gen_range(-VLF_BOX..=VLF_BOX)).collect();
            let res = nelder_mead(|x| -vlf_value(&cov, &VlfParams::from_slice(x)), &x0, opts);
            (-res.value, res.x)
        })
        .collect();
    // Ties go to the lowest restart index, keeping the result order-free.
    let best = results
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.0 > results[b].0 { i } else { b });
    let mut r = report("vlf_s_opt", &cov, VlfParams::from_slice(&results[best].1));
    r.components.insert("restarts".into(), restarts as f64);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{vacuum, RegisterLayout};

    #[test]
    fn vacuum_boundary() {
        let l = RegisterLayout::bosons(3, 2).unwrap();
        let r = vlf_s(&vacuum(&l), [0, 1, 2], &VlfParams::uniform()).unwrap();
        assert!(r.value.abs() < 1e-15);
        assert_eq!(r.components["bound"], 3.0);
        let zero = VlfParams {
            g: [0.0; 3],
            h: [0.0; 3],
        };
        assert_eq!(vlf_s(&vacuum(&l), [0, 1, 2], &zero).unwrap().value, 0.0);
    }

    #[test]
    fn vacuum_never_detected() {
        let l = RegisterLayout::bosons(3, 2).unwrap();
        let r = optimize_vlf(&vacuum(&l), [0, 1, 2], 16, 7).unwrap();
        assert!(r.value <= 1e-9 && !r.detects);
    }

    #[test]
    fn optimizer_is_deterministic() {
        // A correlated covariance where S can become positive.
        let mut cov = DMatrix::identity(6, 6) * 0.5;
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            cov[(i, j)] = 0.3;
            cov[(j, i)] = 0.3;
            cov[(3 + i, 3 + j)] = -0.3;
            cov[(3 + j, 3 + i)] = -0.3;
        }
        let p = VlfParams {
            g: [1.0, 1.0, 1.0],
            h: [1.0, -0.5, -0.5],
        };
        assert!(vlf_value(&cov, &p).is_finite());
        let l = RegisterLayout::bosons(3, 1).unwrap();
        let a = optimize_vlf(&vacuum(&l), [0, 1, 2], 8, 3).unwrap();
        let b = optimize_vlf(&vacuum(&l), [0, 1, 2], 8, 3).unwrap();
        assert_eq!(a, b);
    }
}
