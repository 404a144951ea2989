use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{QuantumState, RegisterLayout, Subsystem};

/// Normalized random vector of length `dim`.
fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    // Decaying weights keep bosonic factors away from the cutoff.
    let v: Vec<Complex64> = (0..dim)
        .map(|n| {
            let w = 0.6f64.powi(n as i32);
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w
        })
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

/// Tensor product of independent random pure states, one per subsystem.
pub fn random_product_state<R: Rng>(layout: &RegisterLayout, rng: &mut R) -> Result<QuantumState> {
    let parts = layout
        .subsystems
        .iter()
        .map(|s: &Subsystem| {
            let single = RegisterLayout::new(vec![*s])?;
            QuantumState::pure(&single, random_vector(rng, s.dim))
        })
        .collect::<Result<Vec<_>>>()?;
    QuantumState::product(&parts)
}

/// Seeded fully separable states: pure products and mixtures of up to four
/// products with random weights.
pub fn separable_bank(
    layout: &RegisterLayout,
    count: usize,
    seed: u64,
) -> Result<Vec<QuantumState>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=4usize);
            if k == 1 {
                return random_product_state(layout, &mut rng);
            }
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let parts = raw
                .iter()
                .map(|w| Ok((w / total, random_product_state(layout, &mut rng)?)))
                .collect::<Result<Vec<_>>>()?;
            QuantumState::mixture(&parts)
        })
        .collect()
}

/// `(|000⟩ + ε|111⟩)/√(1 + ε²)` on the first three subsystems.
pub fn epsilon_state(layout: &RegisterLayout, eps: f64) -> Result<QuantumState> {
    if layout.len() < 3 || !eps.is_finite() {
        return Err(Error::InvalidParameter(
            "epsilon state needs three subsystems and a finite ε".into(),
        ));
    }
    let mut occ = vec![0; layout.len()];
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
    let norm = (1.0 + eps * eps).sqrt();
    amps[0] = Complex64::new(1.0 / norm, 0.0);
    occ[..3].fill(1);
    amps[layout.index(&occ)] = Complex64::new(eps / norm, 0.0);
    QuantumState::pure(layout, amps)
}
