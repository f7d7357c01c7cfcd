//! Spectral sparsification front-end.
//!
//! Reduces a graph to at most `n ln n / ε²` reweighted edges by sampling
//! edges with probability proportional to `w_e · R_eff(e)` and reweighting
//! by the inverse probability. Graphs already under the size bound pass
//! through untouched.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;

use crate::alias::AliasTable;
use crate::error::{Result, SketchError};
use crate::graph::{quadratic_form_unchecked, Edge, WeightedGraph};
use crate::seed::rng_for;

/// Largest component for which effective resistances are computed densely.
pub const DENSE_RESISTANCE_LIMIT: usize = 2000;

/// Support size up to which `verify` runs the quadratic-form check.
pub const VERIFY_LIMIT: usize = 200;

const VERIFY_QUERIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SparsifierKind {
    /// Effective-resistance importance sampling.
    #[default]
    Resistance,
    /// Identity; the input must already satisfy the size bound.
    None,
}

impl fmt::Display for SparsifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SparsifierKind::Resistance => f.write_str("resistance"),
            SparsifierKind::None => f.write_str("none"),
        }
    }
}

impl FromStr for SparsifierKind {
    type Err = SketchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resistance" => Ok(SparsifierKind::Resistance),
            "none" => Ok(SparsifierKind::None),
            other => Err(SketchError::InvalidParameter(format!(
                "unknown sparsifier `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SparsifyOptions {
    pub kind: SparsifierKind,
    /// Check 100 random quadratic forms against the input (support ≤ 200).
    pub verify: bool,
}

#[derive(Debug, Clone)]
pub struct SparsifierOutput {
    pub graph: WeightedGraph,
    /// `|Ẽ| ε² / |V|` measured on the output.
    pub eta: f64,
    /// True when the input was returned unchanged.
    pub passed_through: bool,
}

/// Size bound `|V| ln |V| / ε²` over the edge support.
pub fn size_bound(support: usize, eps: f64) -> f64 {
    if support < 2 {
        return 0.0;
    }
    let n = support as f64;
    n * n.ln() / (eps * eps)
}

pub fn sparsify(
    g: &WeightedGraph,
    eps: f64,
    opts: SparsifyOptions,
    seed: u64,
) -> Result<SparsifierOutput> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SketchError::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let support = g.support_size();
    let bound = size_bound(support, eps);
    let eta_of = |edges: usize| {
        if support == 0 {
            0.0
        } else {
            edges as f64 * eps * eps / support as f64
        }
    };

    if (g.edge_count() as f64) <= bound {
        return Ok(SparsifierOutput {
            graph: g.clone(),
            eta: eta_of(g.edge_count()),
            passed_through: true,
        });
    }
    if opts.kind == SparsifierKind::None {
        return Err(SketchError::InvalidParameter(format!(
            "sparsifier `none` needs at most {bound:.0} edges, input has {}",
            g.edge_count()
        )));
    }

    let resistances = effective_resistances(g)?;
    let leverage: Vec<f64> = g
        .edges()
        .iter()
        .zip(&resistances)
        .map(|(e, r)| e.w * r)
        .collect();
    let total: f64 = leverage.iter().sum();
    let table = AliasTable::new(&leverage)
        .ok_or_else(|| SketchError::Invariant("non-positive leverage scores".into()))?;
    let draws = bound.ceil() as usize;
    let mut rng = rng_for(seed);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..draws {
        *counts.entry(table.sample(&mut rng)).or_insert(0) += 1;
    }
    let edges: Vec<Edge> = counts
        .into_iter()
        .map(|(i, c)| {
            let e = g.edges()[i];
            let p = leverage[i] / total;
            Edge {
                w: c as f64 * e.w / (draws as f64 * p),
                ..e
            }
        })
        .collect();
    let out = WeightedGraph::from_valid_edges(g.n(), edges);

    // w̃_e / w_e = c_e / (q p_e) and leverage ≥ w_min / (n w_max), so the
    // output spread is at most ratio² · q · n ≤ ratio² · n³.
    let ratio_in = g.weight_ratio();
    let n = support as f64;
    let ratio_bound = ratio_in * ratio_in * n * n * n * (1.0 + 1e-9);
    let ratio_out = out.weight_ratio();
    if ratio_out > ratio_bound {
        return Err(SketchError::WeightRatio {
            ratio: ratio_out,
            bound: ratio_bound,
        });
    }

    if opts.verify && support <= VERIFY_LIMIT {
        verify(g, &out, eps, seed)?;
    }

    let eta = eta_of(out.edge_count());
    Ok(SparsifierOutput {
        graph: out,
        eta,
        passed_through: false,
    })
}

fn verify(g: &WeightedGraph, out: &WeightedGraph, eps: f64, seed: u64) -> Result<()> {
    let mut rng = rng_for(seed ^ 0x5e_ed0f_7e57);
    for _ in 0..VERIFY_QUERIES {
        let x: Vec<f64> = (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let exact = quadratic_form_unchecked(g, &x);
        let approx = quadratic_form_unchecked(out, &x);
        let rel_err = (approx - exact).abs() / exact.max(f64::MIN_POSITIVE);
        if rel_err > eps {
            return Err(SketchError::SparsifierVerification { rel_err, eps });
        }
    }
    Ok(())
}

/// Effective resistance of every edge, in edge order.
///
/// Per connected component, `(L + J/k)^{-1} = L⁺ + J/k`, and the `J` term
/// cancels in `(e_u − e_v)ᵀ M⁻¹ (e_u − e_v)`.
pub fn effective_resistances(g: &WeightedGraph) -> Result<Vec<f64>> {
    let mut index_of = BTreeMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        index_of.insert((e.u, e.v), i);
    }
    let mut out = vec![0.0; g.edge_count()];
    for comp in g.connected_components() {
        let (local, ids) = comp.compact();
        let k = ids.len();
        if k > DENSE_RESISTANCE_LIMIT {
            return Err(SketchError::GraphTooLarge {
                n: k,
                limit: DENSE_RESISTANCE_LIMIT,
            });
        }
        let shift = 1.0 / k as f64;
        let mut m = DMatrix::from_element(k, k, shift);
        for e in local.edges() {
            m[(e.u, e.u)] += e.w;
            m[(e.v, e.v)] += e.w;
            m[(e.u, e.v)] -= e.w;
            m[(e.v, e.u)] -= e.w;
        }
        let inv = m
            .cholesky()
            .ok_or_else(|| SketchError::EigenSolver("grounded Laplacian not positive definite".into()))?
            .inverse();
        for e in local.edges() {
            let r = inv[(e.u, e.u)] + inv[(e.v, e.v)] - 2.0 * inv[(e.u, e.v)];
            let gi = index_of[&(ids[e.u], ids[e.v])];
            out[gi] = r.max(0.0);
        }
    }
    Ok(out)
}
