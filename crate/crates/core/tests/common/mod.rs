//! Shared generators for the integration suites.
// each test target compiles this module separately and uses a subset
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use num_complex::Complex64;
use tracebound::classical::Distribution;
use tracebound::quantum::{DensityOperator, HermitianOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random dense distribution: exponential weights, normalized.
pub fn random_dense(rng: &mut ChaCha8Rng, n: u64) -> Distribution {
    let raw: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
    let mass: f64 = raw.iter().sum();
    Distribution::dense(raw.into_iter().map(|w| w / mass).collect()).unwrap()
}

/// Random sparse distribution over a power-of-two outcome space.
pub fn random_sparse(rng: &mut ChaCha8Rng, n_bits: u32, max_overrides: usize) -> Distribution {
    let n = 1u64 << n_bits;
    let k = rng.gen_range(0..=max_overrides.min(n as usize / 2));
    let mut overrides = BTreeMap::new();
    while overrides.len() < k {
        overrides.insert(rng.gen_range(0..n), rng.gen::<f64>() * 2.0);
    }
    let background = rng.gen::<f64>();
    let mass = background * (n - overrides.len() as u64) as f64
        + overrides.values().sum::<f64>();
    let overrides = overrides.into_iter().map(|(i, w)| (i, w / mass)).collect();
    Distribution::sparse(n, background / mass, overrides).unwrap()
}

/// Full-rank random density operator: `G G^dagger` with unit-normal
/// complex entries, trace-normalized.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityOperator {
    let g: Vec<Complex64> = (0..dim * dim)
        .map(|_| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
        .collect();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += g[i * dim + k] * g[j * dim + k].conj();
            }
            entries[i * dim + j] = acc;
        }
    }
    let trace: f64 = (0..dim).map(|i| entries[i * dim + i].re).sum();
    for e in entries.iter_mut() {
        *e /= trace;
    }
    DensityOperator::new(HermitianOperator::new(dim, entries).unwrap()).unwrap()
}
