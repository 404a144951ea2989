#![allow(dead_code)]

use std::collections::BTreeMap;

use nongauss::circuit::*;
use nongauss::rwa::{LadderMonomial, OpKind};

pub fn reference_params() -> CircuitParams {
    CircuitParams {
        squid: SquidParams {
            ej1: 1.0,
            ej2: 1.05 / 0.95,
            c1: 1.0,
            c2: 1.0,
            flux_bias: 0.3,
            pump_amplitude: 0.01,
            pump_frequency: 0.0,
        },
        cavity: CavityParams {
            length: 1.0,
            cap_per_len: 1.0,
            ind_per_len: 1.0,
        },
    }
}

/// Plain bisection of x·tan x = r on (lo, hi).
pub fn bisect(r: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.tan() < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub type Word = Vec<(usize, bool)>;

/// Stable sort by mode, keeping the order of operators on the same mode.
pub fn key(word: &[(usize, bool)]) -> Word {
    let mut w = word.to_vec();
    w.sort_by_key(|&(m, _)| m);
    w
}

pub fn term_key(t: &LadderMonomial) -> Word {
    key(&t
        .factors
        .iter()
        .map(|&(m, k)| (m, k == OpKind::Create))
        .collect::<Vec<_>>())
}

/// Every mode tuple and creation/annihilation choice of each power of X,
/// each drive sign, kept when its interaction-picture frequency vanishes.
pub fn enumerate_resonant(model: &CircuitModel, lam: f64, tol: f64) -> BTreeMap<Word, f64> {
    let w = &model.spectrum.frequencies;
    let wd = model.resonant_pump();
    let t = &model.couplings.tilde;
    let mut out: BTreeMap<Word, f64> = BTreeMap::new();
    let parts: [(&CouplingTensor, f64, &[i32]); 5] = [
        (&t.m1, lam / 2.0, &[1, -1]),
        (&t.m2, lam / 2.0, &[1, -1]),
        (&t.m3, -lam / 2.0, &[1, -1]),
        (&t.m4, lam / 2.0, &[1, -1]),
        (&t.n4, -1.0, &[0]),
    ];
    for (tensor, scale, signs) in parts {
        let rank = tensor.rank;
        for code in 0..(6usize).pow(rank as u32) {
            let mut c = code;
            let mut word = Vec::with_capacity(rank);
            for _ in 0..rank {
                word.push((c % 6 / 2, c % 2 == 0));
                c /= 6;
            }
            let modes: Vec<usize> = word.iter().map(|p| p.0).collect();
            let freq: f64 = word
                .iter()
                .map(|&(m, up)| if up { w[m] } else { -w[m] })
                .sum();
            for &s in signs {
                if (freq + s as f64 * wd).abs() <= tol {
                    *out.entry(key(&word)).or_insert(0.0) += scale * tensor.get(&modes);
                }
            }
        }
    }
    out.retain(|_, v| *v != 0.0);
    out
}
