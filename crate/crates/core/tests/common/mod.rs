#![allow(dead_code)]

use ecm_core::{ModelParams, WeightedGraph};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn range(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Erdős–Rényi topology with heavy-tailed integer weights.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> WeightedGraph {
    let mut g = WeightedGraph::empty(labels(n));
    for i in 0..n {
        for j in (i + 1)..n {
            if uniform(rng) < density {
                // Pareto tail with exponent ~1.5
                let u = 1.0 - uniform(rng);
                let w = (u.powf(-1.0 / 1.5)).floor().min(1e6) as u64;
                g.set_weight(i, j, w.max(1)).unwrap();
            }
        }
    }
    g
}

/// Random valid ECM parameters.
pub fn random_ecm(rng: &mut ChaCha8Rng, n: usize) -> ModelParams {
    let x = (0..n).map(|_| range(rng, -2.0, 2.0).exp()).collect();
    let y = (0..n).map(|_| range(rng, 0.05, 0.95)).collect();
    ModelParams::ecm(labels(n), x, y).unwrap()
}

pub fn random_wcm(rng: &mut ChaCha8Rng, n: usize) -> ModelParams {
    let y = (0..n).map(|_| range(rng, 0.05, 0.95)).collect();
    ModelParams::wcm(labels(n), y).unwrap()
}
