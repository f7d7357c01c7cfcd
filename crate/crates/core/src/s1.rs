//! Per-component sketch for graphs with narrow weight spread and certified
//! expansion.
//!
//! Vertices split into light (`δ_v ≤ γα`) and heavy. Every edge touching a
//! light vertex is stored exactly; each heavy vertex `u` keeps its heavy
//! marginal `δ_u^𝓛` and `α` draws (with replacement) from its heavy-heavy
//! edges, edge `(u, v)` drawn with probability `w_uv / δ_u^𝓛`.

use std::collections::BTreeMap;

use crate::alias::AliasTable;
use crate::error::{Result, SketchError};
use crate::graph::{check_dimension, degrees, Edge, WeightedGraph};
use crate::params::SketchParams;
use crate::seed::rng_for;

/// Sampled heavy neighbours of one heavy vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct HeavySamples {
    pub vertex: usize,
    /// `δ_u^𝓛 = Σ_{v∈𝓛} w_uv`.
    pub heavy_degree: f64,
    /// `(v, Y_u^v)` with `Y_u^v > 0`, sorted by `v`. Multiplicities sum to
    /// `α` unless `heavy_degree` is zero.
    pub draws: Vec<(usize, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct S1ComponentSketch {
    pub n: usize,
    pub gamma: f64,
    pub alpha: usize,
    /// `(v, δ_v)` for every vertex of the component, sorted by `v`.
    pub degrees: Vec<(usize, f64)>,
    /// Edges with at least one light endpoint.
    pub light_edges: Vec<Edge>,
    /// One entry per heavy vertex, sorted by vertex.
    pub heavy: Vec<HeavySamples>,
}

impl S1ComponentSketch {
    /// Light/heavy threshold `γα`.
    pub fn threshold(&self) -> f64 {
        self.gamma * self.alpha as f64
    }

    pub fn is_light_degree(&self, degree: f64) -> bool {
        degree <= self.threshold()
    }

    /// Total number of draws stored.
    pub fn draw_count(&self) -> usize {
        self.heavy
            .iter()
            .flat_map(|h| h.draws.iter())
            .map(|&(_, c)| c as usize)
            .sum()
    }

    /// Number of distinct `(u, v, Y)` records stored.
    pub fn sample_records(&self) -> usize {
        self.heavy.iter().map(|h| h.draws.len()).sum()
    }
}

pub(crate) fn check_weight_band(g: &WeightedGraph, gamma: f64) -> Result<()> {
    let tol = gamma * 1e-12;
    for e in g.edges() {
        if e.w < gamma - tol || e.w >= 2.0 * gamma {
            return Err(SketchError::WeightSpread {
                min: g.min_weight().unwrap_or(e.w),
                max: g.max_weight().unwrap_or(e.w),
            });
        }
    }
    Ok(())
}

pub fn build_s1(
    p: &WeightedGraph,
    params: &SketchParams,
    gamma: f64,
    seed: u64,
) -> Result<S1ComponentSketch> {
    build_s1_with_alpha(p, params.alpha(), gamma, seed)
}

/// As [`build_s1`] with an explicit draw count.
pub fn build_s1_with_alpha(
    p: &WeightedGraph,
    alpha: usize,
    gamma: f64,
    seed: u64,
) -> Result<S1ComponentSketch> {
    if alpha == 0 || !(gamma > 0.0 && gamma.is_finite()) {
        return Err(SketchError::InvalidParameter(format!(
            "need alpha ≥ 1 and finite gamma > 0, got alpha={alpha}, gamma={gamma}"
        )));
    }
    check_weight_band(p, gamma)?;

    let deg = degrees(p);
    let threshold = gamma * alpha as f64;
    let support = p.support();
    let heavy_mask: Vec<bool> = (0..p.n())
        .map(|v| deg.unweighted[v] > 0 && deg.weighted[v] > threshold)
        .collect();

    let light_edges: Vec<Edge> = p
        .edges()
        .iter()
        .filter(|e| !heavy_mask[e.u] || !heavy_mask[e.v])
        .copied()
        .collect();

    let mut heavy_adj: BTreeMap<usize, Vec<(usize, f64)>> = support
        .iter()
        .filter(|&&v| heavy_mask[v])
        .map(|&v| (v, Vec::new()))
        .collect();
    for e in p.edges() {
        if heavy_mask[e.u] && heavy_mask[e.v] {
            heavy_adj.get_mut(&e.u).expect("heavy").push((e.v, e.w));
            heavy_adj.get_mut(&e.v).expect("heavy").push((e.u, e.w));
        }
    }

    let mut rng = rng_for(seed);
    let mut heavy = Vec::with_capacity(heavy_adj.len());
    for (u, mut nbrs) in heavy_adj {
        nbrs.sort_by_key(|&(v, _)| v);
        let heavy_degree: f64 = nbrs.iter().map(|&(_, w)| w).sum();
        let mut draws = Vec::new();
        if let Some(table) = AliasTable::new(&nbrs.iter().map(|&(_, w)| w).collect::<Vec<_>>()) {
            let mut counts = vec![0u32; nbrs.len()];
            for _ in 0..alpha {
                counts[table.sample(&mut rng)] += 1;
            }
            draws = nbrs
                .iter()
                .zip(counts)
                .filter(|&(_, c)| c > 0)
                .map(|(&(v, _), c)| (v, c))
                .collect();
        }
        heavy.push(HeavySamples {
            vertex: u,
            heavy_degree,
            draws,
        });
    }

    Ok(S1ComponentSketch {
        n: p.n(),
        gamma,
        alpha,
        degrees: support.iter().map(|&v| (v, deg.weighted[v])).collect(),
        light_edges,
        heavy,
    })
}

/// The estimator `I_G`:
///
/// `Σ_u δ_u x_u² − Σ_{u∈𝒮, v} x_u x_v w_uv − Σ_{u∈𝓛, v∈𝒮} x_u x_v w_uv
///   − Σ_{u∈𝓛} (δ_u^𝓛/α) Σ_{v∈𝓛} x_u x_v Y_u^v`.
///
/// Each stored light edge appears in exactly two of the middle sums' terms,
/// once per orientation, so it contributes `2 x_u x_v w_uv`.
pub fn estimate_s1(sk: &S1ComponentSketch, x: &[f64]) -> Result<f64> {
    check_dimension(sk.n, x)?;
    let diag: f64 = sk.degrees.iter().map(|&(v, d)| d * x[v] * x[v]).sum();
    let light: f64 = sk
        .light_edges
        .iter()
        .map(|e| 2.0 * e.w * x[e.u] * x[e.v])
        .sum();
    let alpha = sk.alpha as f64;
    let sampled: f64 = sk
        .heavy
        .iter()
        .map(|h| {
            let inner: f64 = h.draws.iter().map(|&(v, c)| x[v] * c as f64).sum();
            h.heavy_degree / alpha * x[h.vertex] * inner
        })
        .sum();
    Ok(diag - light - sampled)
}
