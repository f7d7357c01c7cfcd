//! End-to-end basic sketch: sparsify, split into dyadic weight classes,
//! decompose each class into certified components plus cut edges, and
//! sketch every component independently.

use crate::error::{Result, SketchError};
use crate::graph::{check_dimension, quadratic_form_unchecked, weight_class_partition, WeightedGraph};
use crate::params::{SketchParams, POLY_WEIGHT_EXPONENT};
use crate::preprocess::preprocess;
use crate::s1::{build_s1_with_alpha, estimate_s1, S1ComponentSketch};
use crate::seed::{derive_seed, TAG_CLASS, TAG_SPARSIFY};
use crate::sparsify::{sparsify, SparsifierOutput, SparsifyOptions};

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub sparsify: SparsifyOptions,
    /// Replaces the preprocessing threshold `h` (basic sketch only).
    pub h_override: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicClass {
    pub index: usize,
    pub gamma: f64,
    /// Cut edges stored verbatim.
    pub q: WeightedGraph,
    pub components: Vec<S1ComponentSketch>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicSketch {
    pub n: usize,
    pub alpha: usize,
    pub classes: Vec<BasicClass>,
}

/// Per-class build diagnostics.
#[derive(Debug, Clone)]
pub struct ClassTrace {
    pub index: usize,
    pub gamma: f64,
    pub graph: WeightedGraph,
    pub component_graphs: Vec<WeightedGraph>,
    pub splits: usize,
}

#[derive(Debug, Clone)]
pub struct BasicTrace {
    pub sparsified: SparsifierOutput,
    pub h: f64,
    pub classes: Vec<ClassTrace>,
}

pub(crate) fn check_weight_ratio(g: &WeightedGraph) -> Result<()> {
    let n = g.support_size().max(2) as f64;
    let bound = n.powi(POLY_WEIGHT_EXPONENT);
    let ratio = g.weight_ratio();
    if ratio > bound {
        return Err(SketchError::WeightRatio { ratio, bound });
    }
    Ok(())
}

pub fn build_basic(
    g: &WeightedGraph,
    params: &SketchParams,
    opts: &BuildOptions,
    seed: u64,
) -> Result<BasicSketch> {
    Ok(build_basic_traced(g, params, opts, seed)?.0)
}

pub fn build_basic_traced(
    g: &WeightedGraph,
    params: &SketchParams,
    opts: &BuildOptions,
    seed: u64,
) -> Result<(BasicSketch, BasicTrace)> {
    params.validate()?;
    check_weight_ratio(g)?;
    let h = opts.h_override.unwrap_or_else(|| params.h_basic());
    let alpha = params.alpha();

    let sparsified = sparsify(g, params.eps, opts.sparsify, derive_seed(seed, &[TAG_SPARSIFY]))?;
    let mut classes = Vec::new();
    let mut traces = Vec::new();
    for class in weight_class_partition(&sparsified.graph) {
        let decomposition = preprocess(&class.graph, h)?;
        let mut components = Vec::with_capacity(decomposition.components.len());
        for (ci, comp) in decomposition.components.iter().enumerate() {
            let comp_seed = derive_seed(seed, &[TAG_CLASS, class.index as u64, ci as u64]);
            components.push(build_s1_with_alpha(&comp.graph, alpha, class.gamma, comp_seed)?);
        }
        traces.push(ClassTrace {
            index: class.index,
            gamma: class.gamma,
            graph: class.graph,
            component_graphs: decomposition.components.into_iter().map(|c| c.graph).collect(),
            splits: decomposition.splits.len(),
        });
        classes.push(BasicClass {
            index: class.index,
            gamma: class.gamma,
            q: decomposition.q,
            components,
        });
    }

    let sketch = BasicSketch {
        n: g.n(),
        alpha,
        classes,
    };
    let trace = BasicTrace {
        sparsified,
        h,
        classes: traces,
    };
    Ok((sketch, trace))
}

/// `Σ_classes (Σ_components I_P(x) + x^T L(Q) x)`.
pub fn estimate_basic(sk: &BasicSketch, x: &[f64]) -> Result<f64> {
    check_dimension(sk.n, x)?;
    let mut total = 0.0;
    for class in &sk.classes {
        total += quadratic_form_unchecked(&class.q, x);
        for comp in &class.components {
            total += estimate_s1(comp, x)?;
        }
    }
    Ok(total)
}
