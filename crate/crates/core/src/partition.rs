//! Degree-stratified partition for the improved sketch.
//!
//! Each level sparsifies the current graph, orients it with threshold `2s`,
//! buckets arcs by absolute weight class `[2^j, 2^{j+1})`, and within each
//! class peels off arcs by the class-local out-degree of their tail:
//! below `β` (stored whole later) or in a dyadic band `[2^i β, 2^{i+1} β)`
//! with `2^i β ≤ s` (sketched later). Arcs whose tail out-degree is at least
//! `2s` survive to the next level, and their endpoints number at most
//! `|V| / (2 − 1/s)`.
//!
//! `s` is the smallest `β · 2^k` (k ≥ 0) that is at least `η / ε²`; with
//! that choice the bands `i ≤ k` tile `[β, 2s)` exactly.

use std::collections::BTreeMap;

use crate::error::{Result, SketchError};
use crate::graph::WeightedGraph;
use crate::orient::{assign_direction, Arc, OrientedGraph};
use crate::params::SketchParams;
use crate::seed::{derive_seed, TAG_LEVEL, TAG_ORIENT, TAG_SPARSIFY};
use crate::sparsify::{sparsify, SparsifyOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StratumKind {
    /// Fewer than three vertices remained; stored whole.
    Base,
    /// Tails with class-local out-degree below `β`.
    Low,
    /// Tails with class-local out-degree in `[2^κ β, 2^{κ+1} β)`.
    DegreeClass(u32),
}

#[derive(Debug, Clone)]
pub struct Stratum {
    pub kind: StratumKind,
    /// Absolute weight class `j`: weights in `[2^j, 2^{j+1})`.
    pub weight_class: i32,
    pub gamma: f64,
    pub level: usize,
    pub n: usize,
    pub arcs: Vec<Arc>,
}

impl Stratum {
    pub fn kappa(&self) -> Option<u32> {
        match self.kind {
            StratumKind::DegreeClass(k) => Some(k),
            _ => None,
        }
    }

    /// Strata sketched by sampling; the rest are stored whole.
    pub fn is_sampled(&self) -> bool {
        self.kappa().is_some()
    }

    pub fn undirected(&self) -> WeightedGraph {
        self.oriented().undirected()
    }

    pub fn oriented(&self) -> OrientedGraph {
        OrientedGraph::from_arcs(self.n, self.arcs.clone())
    }

    pub fn support_size(&self) -> usize {
        self.undirected().support_size()
    }
}

/// Diagnostics for one level of the recursion.
#[derive(Debug, Clone)]
pub struct LevelTrace {
    pub level: usize,
    pub vertices: usize,
    pub edges_in: usize,
    pub edges_sparsified: usize,
    pub eta: f64,
    pub s: f64,
    pub remainder_vertices: usize,
    pub remainder_edges: usize,
}

#[derive(Debug, Clone)]
pub struct ImprovedPartition {
    pub strata: Vec<Stratum>,
    pub levels: Vec<LevelTrace>,
    pub beta: usize,
}

impl ImprovedPartition {
    pub fn recursion_depth(&self) -> usize {
        self.levels.len()
    }

    /// Union of all strata, i.e. the graph the sketch is unbiased for.
    pub fn effective_graph(&self, n: usize) -> WeightedGraph {
        let parts: Vec<WeightedGraph> = self.strata.iter().map(|s| s.undirected()).collect();
        WeightedGraph::union(n, parts.iter())
    }
}

/// `j` with `w ∈ [2^j, 2^{j+1})`.
pub(crate) fn absolute_weight_class(w: f64) -> i32 {
    let mut j = w.log2().floor() as i32;
    while w < 2f64.powi(j) {
        j -= 1;
    }
    while w >= 2f64.powi(j + 1) {
        j += 1;
    }
    j
}

/// Rounds `s_raw` up to `β · 2^k`.
pub fn round_s(s_raw: f64, beta: usize) -> f64 {
    let mut s = beta as f64;
    while s < s_raw {
        s *= 2.0;
    }
    s
}

/// Band index `i` with `2^i β ≤ d < 2^{i+1} β`, for `d ≥ β`.
fn band(d: usize, beta: usize) -> u32 {
    let mut i = 0;
    while d >= beta << (i + 1) {
        i += 1;
    }
    i
}

fn level_cap(n: usize, eps: f64) -> usize {
    let shrink = 2.0 - eps * eps;
    ((n.max(2) as f64).ln() / shrink.ln()).ceil() as usize + 3
}

pub fn partition(
    g: &WeightedGraph,
    params: &SketchParams,
    opts: &SparsifyOptions,
    seed: u64,
) -> Result<ImprovedPartition> {
    params.validate()?;
    let eps = params.eps;
    let beta = params.beta();
    let cap = level_cap(g.support_size(), eps);
    let mut strata = Vec::new();
    let mut levels = Vec::new();
    let mut current = g.clone();
    let mut level = 0;

    while !current.is_empty() {
        if level >= cap {
            return Err(SketchError::RecursionDepth { depth: level + 1, cap });
        }
        let vertices = current.support_size();
        if vertices < 3 {
            let gamma = current.min_weight().expect("non-empty");
            strata.push(Stratum {
                kind: StratumKind::Base,
                weight_class: absolute_weight_class(gamma),
                gamma,
                level,
                n: g.n(),
                arcs: current
                    .edges()
                    .iter()
                    .map(|e| Arc { tail: e.u, head: e.v, w: e.w })
                    .collect(),
            });
            levels.push(LevelTrace {
                level,
                vertices,
                edges_in: current.edge_count(),
                edges_sparsified: current.edge_count(),
                eta: 0.0,
                s: 0.0,
                remainder_vertices: 0,
                remainder_edges: 0,
            });
            break;
        }

        let level_seed = derive_seed(seed, &[TAG_LEVEL, level as u64]);
        // Level 0 shares the basic sketch's sparsifier stream, so both
        // constructions start from the same sparsified graph.
        let sparsify_seed = if level == 0 {
            derive_seed(seed, &[TAG_SPARSIFY])
        } else {
            derive_seed(level_seed, &[TAG_SPARSIFY])
        };
        let sp = sparsify(&current, eps, *opts, sparsify_seed)?;
        let eta = sp.eta.max(1.0);
        let s = round_s(eta / (eps * eps), beta);
        let oriented = assign_direction(&sp.graph, 2.0 * s, derive_seed(level_seed, &[TAG_ORIENT]))?;

        let mut classes: BTreeMap<i32, Vec<Arc>> = BTreeMap::new();
        for a in &oriented.arcs {
            classes.entry(absolute_weight_class(a.w)).or_default().push(*a);
        }

        let mut remainder: Vec<Arc> = Vec::new();
        for (j, arcs) in classes {
            let mut out = vec![0usize; g.n()];
            for a in &arcs {
                out[a.tail] += 1;
            }
            let mut buckets: BTreeMap<StratumKind, Vec<Arc>> = BTreeMap::new();
            for a in arcs {
                let d = out[a.tail];
                if d < beta {
                    buckets.entry(StratumKind::Low).or_default().push(a);
                    continue;
                }
                let i = band(d, beta);
                if ((beta as f64) * 2f64.powi(i as i32)) <= s {
                    buckets.entry(StratumKind::DegreeClass(i)).or_default().push(a);
                } else {
                    remainder.push(a);
                }
            }
            for (kind, arcs) in buckets {
                strata.push(Stratum {
                    kind,
                    weight_class: j,
                    gamma: 2f64.powi(j),
                    level,
                    n: g.n(),
                    arcs,
                });
            }
        }

        let next = OrientedGraph::from_arcs(g.n(), remainder).undirected();
        let trace = LevelTrace {
            level,
            vertices,
            edges_in: current.edge_count(),
            edges_sparsified: sp.graph.edge_count(),
            eta,
            s,
            remainder_vertices: next.support_size(),
            remainder_edges: next.edge_count(),
        };
        if trace.remainder_vertices as f64 > vertices as f64 / (2.0 - 1.0 / s) + 1e-9 {
            return Err(SketchError::Invariant(format!(
                "level {level}: remainder has {} of {vertices} vertices (s = {s})",
                trace.remainder_vertices
            )));
        }
        levels.push(trace);
        current = next;
        level += 1;
    }

    Ok(ImprovedPartition {
        strata,
        levels,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_class_boundaries() {
        assert_eq!(absolute_weight_class(1.0), 0);
        assert_eq!(absolute_weight_class(1.99), 0);
        assert_eq!(absolute_weight_class(2.0), 1);
        assert_eq!(absolute_weight_class(0.5), -1);
        assert_eq!(absolute_weight_class(0.7), -1);
        assert_eq!(absolute_weight_class(1024.0), 10);
    }

    #[test]
    fn s_rounding_and_bands() {
        assert_eq!(round_s(11.1, 14), 14.0);
        assert_eq!(round_s(15.0, 14), 28.0);
        assert_eq!(round_s(28.0, 14), 28.0);
        assert_eq!(band(14, 14), 0);
        assert_eq!(band(27, 14), 0);
        assert_eq!(band(28, 14), 1);
        assert_eq!(band(55, 14), 1);
    }

    #[test]
    fn two_vertices_is_base_case() {
        let g = WeightedGraph::new(2, [(0, 1, 3.0)]).unwrap();
        let params = SketchParams::new(0.3, 0.1).unwrap();
        let p = partition(&g, &params, &SparsifyOptions::default(), 0).unwrap();
        assert_eq!(p.strata.len(), 1);
        assert_eq!(p.strata[0].kind, StratumKind::Base);
        assert_eq!(p.strata[0].undirected(), g);
    }

    #[test]
    fn bounded_degree_lands_in_low() {
        let n = 40;
        let g = WeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap();
        let params = SketchParams::new(0.3, 0.1).unwrap();
        let p = partition(&g, &params, &SparsifyOptions::default(), 4).unwrap();
        assert_eq!(p.recursion_depth(), 1);
        assert_eq!(p.strata.len(), 1);
        assert_eq!(p.strata[0].kind, StratumKind::Low);
        assert_eq!(p.effective_graph(n), g);
        assert_eq!(p.levels[0].remainder_edges, 0);
    }
}
