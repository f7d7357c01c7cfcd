#![allow(dead_code)]

use laplacian_sketch::generate::{generate, GraphKind, Weights};
use laplacian_sketch::orient::Arc;
use laplacian_sketch::partition::{Stratum, StratumKind};
use laplacian_sketch::WeightedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent recomputation of `Σ w (x_u − x_v)²`.
pub fn oracle_qf(g: &WeightedGraph, x: &[f64]) -> f64 {
    g.edges().iter().map(|e| e.w * (x[e.u] - x[e.v]).powi(2)).sum()
}

/// `‖D^{1/2} x‖₂⁴` with weighted degrees of `g`.
pub fn degree_norm4(g: &WeightedGraph, x: &[f64]) -> f64 {
    let mut d = vec![0.0; g.n()];
    for e in g.edges() {
        d[e.u] += e.w;
        d[e.v] += e.w;
    }
    let s: f64 = d.iter().zip(x).map(|(d, x)| d * x * x).sum();
    s * s
}

pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
}

/// Same topology with weights redrawn uniformly in `[gamma, 2 gamma)`.
pub fn banded(g: &WeightedGraph, gamma: f64, seed: u64) -> WeightedGraph {
    let mut r = rng(seed);
    let edges: Vec<_> = g
        .edges()
        .iter()
        .map(|e| (e.u, e.v, gamma * (1.0 + r.gen::<f64>() * 0.999)))
        .collect();
    WeightedGraph::new(g.n(), edges).unwrap()
}

pub fn topology(kind: GraphKind, n: usize, seed: u64) -> WeightedGraph {
    generate(kind, n, Weights::Constant(1.0), seed).unwrap()
}

/// Erdős–Rényi `G(n, p)` with unit weights.
pub fn gnp(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

/// Circulant tournament `i → i+1, …, i+k (mod n)` with weights in `[1, 2)`,
/// so every tail has out-degree `k`.
pub fn circulant_stratum(n: usize, k: usize, kappa: u32, seed: u64) -> Stratum {
    let mut r = rng(seed);
    let arcs = (0..n)
        .flat_map(|i| (1..=k).map(move |j| (i, (i + j) % n)))
        .map(|(tail, head)| Arc {
            tail,
            head,
            w: 1.0 + r.gen::<f64>() * 0.999,
        })
        .collect();
    Stratum {
        kind: StratumKind::DegreeClass(kappa),
        weight_class: 0,
        gamma: 1.0,
        level: 0,
        n,
        arcs,
    }
}

pub fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}
