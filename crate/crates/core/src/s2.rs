//! Sketch for degree-class strata.
//!
//! The stratum is split at `h = 2^{−κ}` into certified components plus cut
//! edges `Q`. Inside a component, arcs keep the orientation chosen by the
//! partition. An arc whose tail kept fewer than `2^{κ−1} β` out-arcs is
//! stored (𝒮); the rest (𝓛) are sampled from the head's side: each head `u`
//! draws `β` in-arcs from its 𝓛 in-arcs, `(v, u)` with probability
//! `w_vu / δ^{in,𝓛}_u`.

use std::collections::BTreeMap;

use crate::alias::AliasTable;
use crate::error::{Result, SketchError};
use crate::graph::{check_dimension, WeightedGraph};
use crate::orient::Arc;
use crate::params::SketchParams;
use crate::partition::Stratum;
use crate::preprocess::preprocess;
use crate::s1::check_weight_band;
use crate::seed::{derive_seed, rng_for, TAG_CLASS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S2Vertex {
    pub vertex: usize,
    /// `δ_u(P)`.
    pub degree: f64,
    /// `δ^in_u(P)` over all in-arcs.
    pub in_degree: f64,
}

/// Sampled 𝓛 in-arcs of one head vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct InSamples {
    pub vertex: usize,
    /// `δ^{in,𝓛}_u`, the sampling normalizer.
    pub heavy_in_degree: f64,
    /// `(tail v, Y_u^v)` with `Y_u^v > 0`, sorted by tail; sums to `β`.
    pub draws: Vec<(usize, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct S2ComponentSketch {
    pub n: usize,
    pub gamma: f64,
    pub kappa: u32,
    pub beta: usize,
    /// Every vertex of the component, sorted.
    pub vertices: Vec<S2Vertex>,
    /// 𝒮 arcs, stored verbatim.
    pub s_arcs: Vec<Arc>,
    /// One entry per vertex with a nonempty 𝓛 in-neighbourhood.
    pub samples: Vec<InSamples>,
}

impl S2ComponentSketch {
    /// Tail out-degree below which arcs are stored.
    pub fn light_threshold(&self) -> f64 {
        2f64.powi(self.kappa as i32 - 1) * self.beta as f64
    }

    pub fn draw_count(&self) -> usize {
        self.samples
            .iter()
            .flat_map(|s| s.draws.iter())
            .map(|&(_, c)| c as usize)
            .sum()
    }

    pub fn sample_records(&self) -> usize {
        self.samples.iter().map(|s| s.draws.len()).sum()
    }

    pub fn is_exact(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct S2Stratum {
    pub kappa: u32,
    pub weight_class: i32,
    pub gamma: f64,
    pub q: WeightedGraph,
    pub components: Vec<S2ComponentSketch>,
}

/// Degree-halving diagnostics for one stratum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S2BuildTrace {
    pub kappa: u32,
    pub vertices: usize,
    pub q_edges: usize,
    /// Tails whose out-degree fell below half its stratum value.
    pub halved: usize,
    pub component_graphs: usize,
}

/// Rejects strata that are not degree classes or whose arcs leave the band.
pub(crate) fn check_property2(stratum: &Stratum, beta: usize) -> Result<u32> {
    let kappa = stratum.kappa().ok_or_else(|| {
        SketchError::Invariant(format!("{:?} stratum is stored, not sampled", stratum.kind))
    })?;
    let lo = beta << kappa;
    let hi = beta << (kappa + 1);
    let og = stratum.oriented();
    for a in &stratum.arcs {
        let d = og.out_degree[a.tail];
        if d < lo || d >= hi {
            return Err(SketchError::Invariant(format!(
                "tail {} has out-degree {d} outside [{lo}, {hi})",
                a.tail
            )));
        }
    }
    Ok(kappa)
}

pub fn build_s2(stratum: &Stratum, params: &SketchParams, seed: u64) -> Result<S2Stratum> {
    Ok(build_s2_traced(stratum, params.beta(), seed)?.0)
}

/// As [`build_s2`] with an explicit draw count, returning diagnostics.
pub fn build_s2_traced(
    stratum: &Stratum,
    beta: usize,
    seed: u64,
) -> Result<(S2Stratum, S2BuildTrace)> {
    if beta == 0 {
        return Err(SketchError::InvalidParameter("beta must be at least 1".into()));
    }
    let kappa = check_property2(stratum, beta)?;
    let undirected = stratum.undirected();
    check_weight_band(&undirected, stratum.gamma)?;
    let n = stratum.n;
    let original_out = stratum.oriented().out_degree;

    let h = 2f64.powi(-(kappa as i32));
    let decomposition = preprocess(&undirected, h)?;
    let mut comp_of = vec![usize::MAX; n];
    for (ci, c) in decomposition.components.iter().enumerate() {
        for v in c.graph.support() {
            comp_of[v] = ci;
        }
    }
    let mut comp_arcs: Vec<Vec<Arc>> = vec![Vec::new(); decomposition.components.len()];
    for a in &stratum.arcs {
        let c = comp_of[a.tail];
        if c != usize::MAX && c == comp_of[a.head] {
            comp_arcs[c].push(*a);
        }
    }

    let threshold = 2f64.powi(kappa as i32 - 1) * beta as f64;
    let mut out_after = vec![0usize; n];
    let mut components = Vec::with_capacity(comp_arcs.len());
    for (ci, arcs) in comp_arcs.into_iter().enumerate() {
        for a in &arcs {
            out_after[a.tail] += 1;
        }
        let mut degree: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        let mut heavy_in: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
        let mut s_arcs = Vec::new();
        for a in &arcs {
            degree.entry(a.tail).or_default().0 += a.w;
            let head = degree.entry(a.head).or_default();
            head.0 += a.w;
            head.1 += a.w;
            if (out_after[a.tail] as f64) < threshold {
                s_arcs.push(*a);
            } else {
                heavy_in.entry(a.head).or_default().push((a.tail, a.w));
            }
        }
        s_arcs.sort_by_key(|a| (a.tail, a.head));

        let mut rng = rng_for(derive_seed(seed, &[TAG_CLASS, ci as u64]));
        let mut samples = Vec::with_capacity(heavy_in.len());
        for (u, mut tails) in heavy_in {
            tails.sort_by_key(|&(v, _)| v);
            let weights: Vec<f64> = tails.iter().map(|&(_, w)| w).collect();
            let table = AliasTable::new(&weights).expect("positive weights");
            let mut counts = vec![0u32; tails.len()];
            for _ in 0..beta {
                counts[table.sample(&mut rng)] += 1;
            }
            samples.push(InSamples {
                vertex: u,
                heavy_in_degree: weights.iter().sum(),
                draws: tails
                    .iter()
                    .zip(counts)
                    .filter(|&(_, c)| c > 0)
                    .map(|(&(v, _), c)| (v, c))
                    .collect(),
            });
        }

        components.push(S2ComponentSketch {
            n,
            gamma: stratum.gamma,
            kappa,
            beta,
            vertices: degree
                .into_iter()
                .map(|(vertex, (degree, in_degree))| S2Vertex {
                    vertex,
                    degree,
                    in_degree,
                })
                .collect(),
            s_arcs,
            samples,
        });
    }

    let halved = (0..n)
        .filter(|&v| original_out[v] > 0 && 2 * out_after[v] < original_out[v])
        .count();
    let trace = S2BuildTrace {
        kappa,
        vertices: undirected.support_size(),
        q_edges: decomposition.q.edge_count(),
        halved,
        component_graphs: components.len(),
    };
    let sketch = S2Stratum {
        kappa,
        weight_class: stratum.weight_class,
        gamma: stratum.gamma,
        q: decomposition.q,
        components,
    };
    Ok((sketch, trace))
}

/// `I_P = Σ_u x_u² δ_u − 2 Σ_{(u,v)∈𝒮} x_u x_v w_uv
///        − 2 Σ_u (δ^{in,𝓛}_u / β) x_u Σ_v x_v Y_u^v`.
pub fn estimate_s2(c: &S2ComponentSketch, x: &[f64]) -> Result<f64> {
    check_dimension(c.n, x)?;
    let diag: f64 = c.vertices.iter().map(|v| v.degree * x[v.vertex] * x[v.vertex]).sum();
    let stored: f64 = c.s_arcs.iter().map(|a| a.w * x[a.tail] * x[a.head]).sum();
    let beta = c.beta as f64;
    let sampled: f64 = c
        .samples
        .iter()
        .map(|s| {
            let inner: f64 = s.draws.iter().map(|&(v, y)| x[v] * y as f64).sum();
            s.heavy_in_degree / beta * x[s.vertex] * inner
        })
        .sum();
    Ok(diag - 2.0 * stored - 2.0 * sampled)
}

/// Exact part plus all component estimates of one stratum.
pub fn estimate_s2_stratum(s: &S2Stratum, x: &[f64]) -> Result<f64> {
    let mut total = crate::graph::quadratic_form(&s.q, x)?;
    for c in &s.components {
        total += estimate_s2(c, x)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::quadratic_form;
    use crate::partition::StratumKind;

    /// Circulant tournament-like orientation: `i → i+1, …, i+k` mod `n`.
    fn circulant(n: usize, k: usize, w: f64) -> Vec<Arc> {
        (0..n)
            .flat_map(|i| (1..=k).map(move |d| Arc { tail: i, head: (i + d) % n, w }))
            .collect()
    }

    fn stratum(n: usize, kappa: u32, arcs: Vec<Arc>) -> Stratum {
        Stratum {
            kind: StratumKind::DegreeClass(kappa),
            weight_class: 0,
            gamma: 1.0,
            level: 0,
            n,
            arcs,
        }
    }

    #[test]
    fn sampled_arcs_have_heavy_tails() {
        // Regular tournament on K13: out-degree 6 ∈ [2β, 4β) for β = 3, κ = 1.
        let st = stratum(13, 1, circulant(13, 6, 1.0));
        let (sk, trace) = build_s2_traced(&st, 3, 1).unwrap();
        assert_eq!(trace.q_edges, 0);
        assert_eq!(trace.halved, 0);
        assert_eq!(sk.components.len(), 1);
        let c = &sk.components[0];
        assert!(c.s_arcs.is_empty());
        assert_eq!(c.samples.len(), 13);
        assert_eq!(c.draw_count(), 3 * 13);
        for s in &c.samples {
            assert_eq!(s.heavy_in_degree, 6.0);
        }
    }

    #[test]
    fn constant_query_is_zero_in_mean_and_exact_when_stored() {
        let st = stratum(13, 1, circulant(13, 6, 1.3));
        let sk = build_s2(&st, &SketchParams::new(0.9, 0.1).unwrap(), 2).unwrap();
        assert!(!sk.components[0].is_exact());
        let ones = vec![1.0; 13];
        // Each head's draws sum to β, so the sampled term equals δ^{in,𝓛}_u.
        assert!(estimate_s2_stratum(&sk, &ones).unwrap().abs() < 1e-9);
    }

    #[test]
    fn unit_threshold_dismantles_the_stratum() {
        // κ = 0 splits at h = 1, which every cut meets: only single edges survive.
        let st = stratum(20, 0, circulant(20, 5, 1.0));
        let (sk, _) = build_s2_traced(&st, 3, 1).unwrap();
        assert!(sk.components.iter().all(|c| c.is_exact() && c.vertices.len() == 2));
        let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).cos()).collect();
        let exact = quadratic_form(&st.undirected(), &x).unwrap();
        assert!((estimate_s2_stratum(&sk, &x).unwrap() - exact).abs() <= 1e-9 * exact);
    }

    #[test]
    fn rejects_non_degree_class() {
        let mut st = stratum(20, 0, circulant(20, 5, 1.0));
        st.kind = StratumKind::Low;
        assert!(build_s2_traced(&st, 3, 0).is_err());
        let st = stratum(20, 0, circulant(20, 2, 1.0));
        assert!(matches!(build_s2_traced(&st, 3, 0), Err(SketchError::Invariant(_))));
    }

    #[test]
    fn mean_matches_quadratic_form() {
        let st = stratum(13, 1, circulant(13, 6, 1.0));
        let g = st.undirected();
        let x: Vec<f64> = (0..13).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let exact = quadratic_form(&g, &x).unwrap();
        let trials = 4000;
        let mean: f64 = (0..trials)
            .map(|s| estimate_s2_stratum(&build_s2_traced(&st, 3, s).unwrap().0, &x).unwrap())
            .sum::<f64>()
            / trials as f64;
        assert!((mean - exact).abs() < 0.05 * exact, "{mean} vs {exact}");
    }
}
