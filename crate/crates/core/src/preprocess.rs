//! Recursive sparse-cut decomposition.
//!
//! Splits a graph whose weights lie within a factor of two into
//! vertex-disjoint components that each carry an expansion certificate,
//! collecting every removed cut edge into `Q`. A component is split along
//! its Cheeger sweep cut whenever that cut has conductance at most `h`.
//! Otherwise it stops, and the sweep guarantee `Φ ≤ sqrt(2 λ₁)` gives
//! `λ₁(L̂) > h²/2` for free.

use crate::error::{Result, SketchError};
use crate::graph::{Edge, WeightedGraph};
use crate::spectral::{sweep_cut_certified, SpectralCertificate};

/// Why a component was accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certificate {
    /// Two vertices joined by one edge (`λ₁ = 2`).
    Trivial,
    /// Best sweep cut has conductance above `h`, hence `λ₁(L̂) > h²/2`.
    Expander {
        spectral: SpectralCertificate,
        sweep_conductance: f64,
    },
}

impl Certificate {
    /// Certified `λ₁(L̂)`.
    pub fn lambda1(&self) -> f64 {
        match self {
            Certificate::Trivial => 2.0,
            Certificate::Expander { spectral, .. } => spectral.lambda1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifiedComponent {
    pub graph: WeightedGraph,
    pub certificate: Certificate,
}

/// One executed split, kept for auditing the charging argument.
#[derive(Debug, Clone, Copy)]
pub struct SplitRecord {
    pub conductance: f64,
    /// Volume of the side charged for the cut (the smaller one).
    pub volume_side: f64,
    pub volume_rest: f64,
    pub crossing: usize,
}

#[derive(Debug, Clone)]
pub struct PartitionResult {
    pub components: Vec<CertifiedComponent>,
    /// Cut edges removed along the recursion.
    pub q: WeightedGraph,
    pub splits: Vec<SplitRecord>,
    /// Largest number of smaller-side appearances along any branch.
    pub max_depth: usize,
}

/// Cap on smaller-side appearances along one branch.
pub fn depth_cap(edge_count: usize) -> usize {
    2 * (edge_count.max(1) as f64).log2().ceil() as usize + 10
}

pub fn preprocess(g: &WeightedGraph, h: f64) -> Result<PartitionResult> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(SketchError::InvalidParameter(format!(
            "h must lie in (0, 1], got {h}"
        )));
    }
    if let (Some(lo), Some(hi)) = (g.min_weight(), g.max_weight()) {
        if hi >= 2.0 * lo {
            return Err(SketchError::WeightSpread { min: lo, max: hi });
        }
    }

    let cap = depth_cap(g.edge_count());
    let mut stack: Vec<(WeightedGraph, usize)> = g
        .connected_components()
        .into_iter()
        .rev()
        .map(|c| (c, 0))
        .collect();
    let mut components = Vec::new();
    let mut q_edges: Vec<Edge> = Vec::new();
    let mut splits = Vec::new();
    let mut max_depth = 0;

    while let Some((part, depth)) = stack.pop() {
        max_depth = max_depth.max(depth);
        let support = part.support_size();
        if support < 2 {
            continue;
        }
        if support == 2 {
            components.push(CertifiedComponent {
                graph: part,
                certificate: Certificate::Trivial,
            });
            continue;
        }
        let (cut, spectral) = sweep_cut_certified(&part)?;
        if cut.conductance > h {
            if spectral.lambda1 < h * h / 2.0 {
                return Err(SketchError::Invariant(format!(
                    "sweep conductance {} > h but λ₁ = {} < h²/2",
                    cut.conductance, spectral.lambda1
                )));
            }
            components.push(CertifiedComponent {
                graph: part,
                certificate: Certificate::Expander {
                    spectral,
                    sweep_conductance: cut.conductance,
                },
            });
            continue;
        }

        splits.push(SplitRecord {
            conductance: cut.conductance,
            volume_side: cut.volume_side,
            volume_rest: cut.volume_rest,
            crossing: cut.crossing_edges.len(),
        });
        q_edges.extend_from_slice(&cut.crossing_edges);

        let mut small = vec![false; part.n()];
        for &v in &cut.side {
            small[v] = true;
        }
        let large: Vec<bool> = small.iter().map(|b| !b).collect();
        if depth + 1 > cap {
            return Err(SketchError::RecursionDepth {
                depth: depth + 1,
                cap,
            });
        }
        for c in part.induced(&large).connected_components().into_iter().rev() {
            stack.push((c, depth));
        }
        for c in part.induced(&small).connected_components().into_iter().rev() {
            stack.push((c, depth + 1));
        }
    }

    components.sort_by_key(|c| c.graph.edges().first().map(|e| (e.u, e.v)));
    Ok(PartitionResult {
        components,
        q: WeightedGraph::from_valid_edges(g.n(), q_edges),
        splits,
        max_depth,
    })
}
