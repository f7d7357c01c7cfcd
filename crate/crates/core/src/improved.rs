//! End-to-end improved sketch: partition into strata, store the low-degree
//! and base strata whole, and sketch every degree-class stratum.

use crate::basic::{check_weight_ratio, BuildOptions};
use crate::error::Result;
use crate::graph::{check_dimension, quadratic_form_unchecked, WeightedGraph};
use crate::params::SketchParams;
use crate::partition::{partition, ImprovedPartition, StratumKind};
use crate::s2::{build_s2_traced, estimate_s2, S2BuildTrace, S2Stratum};
use crate::seed::{derive_seed, TAG_STRATUM};

/// A stratum kept verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredStratum {
    pub kind: StratumKind,
    pub weight_class: i32,
    pub graph: WeightedGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImprovedSketch {
    pub n: usize,
    pub beta: usize,
    pub stored: Vec<StoredStratum>,
    pub sampled: Vec<S2Stratum>,
}

#[derive(Debug, Clone)]
pub struct ImprovedTrace {
    pub partition: ImprovedPartition,
    /// One entry per sampled stratum, in the order of `ImprovedSketch::sampled`.
    pub strata: Vec<S2BuildTrace>,
}

pub fn build_improved(
    g: &WeightedGraph,
    params: &SketchParams,
    opts: &BuildOptions,
    seed: u64,
) -> Result<ImprovedSketch> {
    Ok(build_improved_traced(g, params, opts, seed)?.0)
}

pub fn build_improved_traced(
    g: &WeightedGraph,
    params: &SketchParams,
    opts: &BuildOptions,
    seed: u64,
) -> Result<(ImprovedSketch, ImprovedTrace)> {
    params.validate()?;
    check_weight_ratio(g)?;
    let beta = params.beta();
    let part = partition(g, params, &opts.sparsify, seed)?;

    let mut stored = Vec::new();
    let mut sampled = Vec::new();
    let mut traces = Vec::new();
    for (i, stratum) in part.strata.iter().enumerate() {
        if stratum.is_sampled() {
            let (s, t) = build_s2_traced(stratum, beta, derive_seed(seed, &[TAG_STRATUM, i as u64]))?;
            sampled.push(s);
            traces.push(t);
        } else {
            stored.push(StoredStratum {
                kind: stratum.kind,
                weight_class: stratum.weight_class,
                graph: stratum.undirected(),
            });
        }
    }
    let sketch = ImprovedSketch {
        n: g.n(),
        beta,
        stored,
        sampled,
    };
    Ok((
        sketch,
        ImprovedTrace {
            partition: part,
            strata: traces,
        },
    ))
}

/// `Σ_{stored} x^T L(H) x + Σ_{sampled} (x^T L(Q) x + Σ_P I_P(x))`.
pub fn estimate_improved(sk: &ImprovedSketch, x: &[f64]) -> Result<f64> {
    check_dimension(sk.n, x)?;
    let mut total = 0.0;
    for s in &sk.stored {
        total += quadratic_form_unchecked(&s.graph, x);
    }
    for s in &sk.sampled {
        total += quadratic_form_unchecked(&s.q, x);
        for c in &s.components {
            total += estimate_s2(c, x)?;
        }
    }
    Ok(total)
}
