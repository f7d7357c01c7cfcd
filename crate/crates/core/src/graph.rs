//! Weighted undirected graphs and the exact quantities the sketches are
//! measured against: Laplacian quadratic forms, degrees, weight classes and
//! conductance.
//!
//! Vertex ids are dense integers `0..n`. Subgraphs produced by splitting keep
//! the global id space, so a component of a 10 000-vertex graph still reads
//! its entries straight out of a global query vector. Routines that need a
//! contiguous local index (eigensolvers, enumeration) call
//! [`WeightedGraph::compact`].

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Result, SketchError};

/// Largest support size accepted by [`exact_cheeger`].
pub const CHEEGER_ENUMERATION_LIMIT: usize = 24;

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Simple undirected graph with strictly positive weights.
///
/// Edges are stored once, normalized to `u < v` and sorted by `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Builds a graph from `(u, v, w)` triples. Repeated pairs are coalesced
    /// by summing their weights.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(SketchError::InvalidEdge {
                    u,
                    v,
                    w,
                    reason: "vertex id out of range",
                });
            }
            if u == v {
                return Err(SketchError::InvalidEdge {
                    u,
                    v,
                    w,
                    reason: "self-loop",
                });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(SketchError::InvalidEdge {
                    u,
                    v,
                    w,
                    reason: "weight must be finite and positive",
                });
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges = merged
            .into_iter()
            .map(|((u, v), w)| Edge { u, v, w })
            .collect();
        Ok(Self { n, edges })
    }

    /// Graph with no edges on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
        }
    }

    /// Trusted constructor for edge sets derived from a valid graph.
    pub(crate) fn from_valid_edges(n: usize, mut edges: Vec<Edge>) -> Self {
        for e in edges.iter_mut() {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        debug_assert!(edges.windows(2).all(|p| (p[0].u, p[0].v) != (p[1].u, p[1].v)));
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::min)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::max)
    }

    /// `w_max / w_min`, or 1 for an empty graph.
    pub fn weight_ratio(&self) -> f64 {
        match (self.max_weight(), self.min_weight()) {
            (Some(hi), Some(lo)) => hi / lo,
            _ => 1.0,
        }
    }

    /// Sorted ids of vertices with at least one incident edge.
    pub fn support(&self) -> Vec<usize> {
        let mut touched = vec![false; self.n];
        for e in &self.edges {
            touched[e.u] = true;
            touched[e.v] = true;
        }
        (0..self.n).filter(|&v| touched[v]).collect()
    }

    pub fn support_size(&self) -> usize {
        self.support().len()
    }

    /// Adjacency lists over the global id space.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        adj
    }

    /// Relabels the support to `0..k`. Returns the local graph and the
    /// local-to-global id map.
    pub fn compact(&self) -> (WeightedGraph, Vec<usize>) {
        let ids = self.support();
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in ids.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: local[e.u],
                v: local[e.v],
                w: e.w,
            })
            .collect();
        (WeightedGraph::from_valid_edges(ids.len(), edges), ids)
    }

    /// Connected components of the edge support, each in the global id
    /// space. Isolated vertices are dropped. Ordered by smallest vertex id.
    pub fn connected_components(&self) -> Vec<WeightedGraph> {
        let label = self.component_labels();
        let count = label.iter().filter_map(|l| *l).max().map_or(0, |m| m + 1);
        let mut parts: Vec<Vec<Edge>> = vec![Vec::new(); count];
        for e in &self.edges {
            let c = label[e.u].expect("edge endpoint is labelled");
            parts[c].push(*e);
        }
        parts
            .into_iter()
            .map(|edges| WeightedGraph::from_valid_edges(self.n, edges))
            .collect()
    }

    /// Number of connected components of the edge support.
    pub fn component_count(&self) -> usize {
        self.component_labels()
            .iter()
            .filter_map(|l| *l)
            .max()
            .map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    fn component_labels(&self) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut label = vec![None; self.n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s].is_some() || adj[s].is_empty() {
                continue;
            }
            label[s] = Some(next);
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &adj[x] {
                    if label[y].is_none() {
                        label[y] = Some(next);
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Edges with both endpoints inside `mask`.
    pub fn induced(&self, mask: &[bool]) -> WeightedGraph {
        let edges = self
            .edges
            .iter()
            .filter(|e| mask[e.u] && mask[e.v])
            .copied()
            .collect();
        WeightedGraph::from_valid_edges(self.n, edges)
    }

    /// Disjoint union of edge sets over the same id space.
    pub fn union<'a, I>(n: usize, parts: I) -> WeightedGraph
    where
        I: IntoIterator<Item = &'a WeightedGraph>,
    {
        let edges = parts
            .into_iter()
            .flat_map(|g| g.edges.iter().copied())
            .collect();
        WeightedGraph::from_valid_edges(n, edges)
    }
}

/// Per-vertex weighted and unweighted degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeTable {
    pub weighted: Vec<f64>,
    pub unweighted: Vec<usize>,
}

impl DegreeTable {
    /// `vol(S)` for a vertex set.
    pub fn volume<I: IntoIterator<Item = usize>>(&self, vertices: I) -> f64 {
        vertices.into_iter().map(|v| self.weighted[v]).sum()
    }
}

pub fn degrees(g: &WeightedGraph) -> DegreeTable {
    let mut weighted = vec![0.0; g.n()];
    let mut unweighted = vec![0; g.n()];
    for e in g.edges() {
        weighted[e.u] += e.w;
        weighted[e.v] += e.w;
        unweighted[e.u] += 1;
        unweighted[e.v] += 1;
    }
    DegreeTable {
        weighted,
        unweighted,
    }
}

pub(crate) fn check_dimension(n: usize, x: &[f64]) -> Result<()> {
    if x.len() != n {
        return Err(SketchError::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    Ok(())
}

/// `x^T L(G) x = Σ_{(u,v)∈E} w_uv (x_u − x_v)²`.
pub fn quadratic_form(g: &WeightedGraph, x: &[f64]) -> Result<f64> {
    check_dimension(g.n(), x)?;
    Ok(quadratic_form_unchecked(g, x))
}

pub(crate) fn quadratic_form_unchecked(g: &WeightedGraph, x: &[f64]) -> f64 {
    g.edges()
        .iter()
        .map(|e| {
            let d = x[e.u] - x[e.v];
            e.w * d * d
        })
        .sum()
}

/// One dyadic weight class: every edge has weight in `[gamma, 2 gamma)`.
#[derive(Debug, Clone)]
pub struct WeightClass {
    /// Class index `i ≥ 1`; the class covers `[2^{i−1} w_min, 2^i w_min)`.
    pub index: usize,
    pub gamma: f64,
    pub graph: WeightedGraph,
}

/// Index `i` with `w ∈ [2^{i−1} base, 2^i base)`, assuming `w ≥ base`.
pub(crate) fn dyadic_index(w: f64, base: f64) -> usize {
    let mut i = ((w / base).log2().floor().max(0.0) as usize) + 1;
    // Correct for rounding in log2 near class boundaries.
    while i > 1 && w < base * 2f64.powi(i as i32 - 1) {
        i -= 1;
    }
    while w >= base * 2f64.powi(i as i32) {
        i += 1;
    }
    i
}

/// Splits the edges into classes `[2^{i−1} w_min, 2^i w_min)`. Empty classes
/// are omitted; each class keeps the global vertex ids.
pub fn weight_class_partition(g: &WeightedGraph) -> Vec<WeightClass> {
    let Some(w_min) = g.min_weight() else {
        return Vec::new();
    };
    let mut classes: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
    for e in g.edges() {
        classes.entry(dyadic_index(e.w, w_min)).or_default().push(*e);
    }
    classes
        .into_iter()
        .map(|(index, edges)| WeightClass {
            index,
            gamma: w_min * 2f64.powi(index as i32 - 1),
            graph: WeightedGraph::from_valid_edges(g.n(), edges),
        })
        .collect()
}

/// A vertex bipartition with its conductance.
#[derive(Debug, Clone)]
pub struct Cut {
    /// Sorted global ids on the reported side `S`.
    pub side: Vec<usize>,
    pub conductance: f64,
    pub cut_weight: f64,
    pub volume_side: f64,
    pub volume_rest: f64,
    pub crossing_edges: Vec<Edge>,
}

/// Conductance of `(S, V_P \ S)` where `V_P` is the support of `g`.
pub fn conductance(g: &WeightedGraph, side: &[usize]) -> Cut {
    let mut in_side = vec![false; g.n()];
    for &v in side {
        in_side[v] = true;
    }
    let deg = degrees(g);
    let mut volume_side = 0.0;
    let mut volume_rest = 0.0;
    for v in 0..g.n() {
        if in_side[v] {
            volume_side += deg.weighted[v];
        } else {
            volume_rest += deg.weighted[v];
        }
    }
    let crossing_edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| in_side[e.u] != in_side[e.v])
        .copied()
        .collect();
    let cut_weight = crossing_edges.iter().map(|e| e.w).sum();
    let denom = volume_side.min(volume_rest);
    let conductance = if denom > 0.0 {
        cut_weight / denom
    } else {
        f64::INFINITY
    };
    let mut side = side.to_vec();
    side.sort_unstable();
    Cut {
        side,
        conductance,
        cut_weight,
        volume_side,
        volume_rest,
        crossing_edges,
    }
}

/// Exact Cheeger constant by enumerating every proper subset of the support.
///
/// Visits subsets in Gray-code order so each step costs one vertex's degree.
/// The returned cut reports the side of smaller volume.
pub fn exact_cheeger(g: &WeightedGraph) -> Result<(f64, Cut)> {
    let (local, ids) = g.compact();
    let k = ids.len();
    if k > CHEEGER_ENUMERATION_LIMIT {
        return Err(SketchError::GraphTooLarge {
            n: k,
            limit: CHEEGER_ENUMERATION_LIMIT,
        });
    }
    if k < 2 {
        return Err(SketchError::InvalidParameter(
            "Cheeger constant needs at least one edge".into(),
        ));
    }
    let components = local.component_count();
    if components > 1 {
        return Err(SketchError::Disconnected { components });
    }

    let adj = local.adjacency();
    let deg = degrees(&local);
    let total_vol: f64 = deg.weighted.iter().sum();

    // Vertex 0 stays outside S; the remaining k−1 vertices are enumerated.
    let mut in_s = vec![false; k];
    let mut cut = 0.0;
    let mut vol = 0.0;
    let mut best = f64::INFINITY;
    let mut best_code = 0u64;
    let subsets = 1u64 << (k - 1);
    for step in 1..subsets {
        let bit = step.trailing_zeros() as usize;
        let v = bit + 1;
        for &(y, w) in &adj[v] {
            if in_s[y] == in_s[v] {
                cut += w;
            } else {
                cut -= w;
            }
        }
        if in_s[v] {
            vol -= deg.weighted[v];
        } else {
            vol += deg.weighted[v];
        }
        in_s[v] = !in_s[v];
        let phi = cut / vol.min(total_vol - vol);
        if phi < best {
            best = phi;
            best_code = step ^ (step >> 1);
        }
    }

    let side: Vec<usize> = (0..k - 1)
        .filter(|b| best_code >> b & 1 == 1)
        .map(|b| ids[b + 1])
        .collect();
    let mut cut = conductance(g, &side);
    if cut.volume_side > cut.volume_rest {
        let mut in_side = vec![false; g.n()];
        for &v in &side {
            in_side[v] = true;
        }
        let other: Vec<usize> = ids.iter().copied().filter(|&v| !in_side[v]).collect();
        cut = conductance(g, &other);
    }
    Ok((cut.conductance, cut))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path3() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    pub(crate) fn two_triangles_bridge() -> WeightedGraph {
        WeightedGraph::new(
            6,
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
                (2, 3, 1.0),
            ],
        )
        .unwrap()
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> WeightedGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v, rng.gen_range(0.5..4.0)));
                }
            }
        }
        WeightedGraph::new(n, edges).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(WeightedGraph::new(3, [(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 3, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, 0.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn coalesces_multi_edges() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 2.5), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges()[0], Edge { u: 0, v: 1, w: 3.5 });
    }

    #[test]
    fn quadratic_form_on_path() {
        assert_eq!(quadratic_form(&path3(), &[1.0, 0.0, -1.0]).unwrap(), 2.0);
    }

    #[test]
    fn quadratic_form_kills_constants() {
        let g = random_graph(15, 0.4, 3);
        assert!(quadratic_form(&g, &[2.75; 15]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn quadratic_form_dimension_mismatch() {
        assert!(matches!(
            quadratic_form(&path3(), &[1.0, 2.0]),
            Err(SketchError::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn quadratic_form_matches_dense_laplacian() {
        let g = random_graph(20, 0.3, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut lap = vec![vec![0.0; 20]; 20];
        for e in g.edges() {
            lap[e.u][e.u] += e.w;
            lap[e.v][e.v] += e.w;
            lap[e.u][e.v] -= e.w;
            lap[e.v][e.u] -= e.w;
        }
        let mut dense = 0.0;
        for i in 0..20 {
            for j in 0..20 {
                dense += x[i] * lap[i][j] * x[j];
            }
        }
        let q = quadratic_form(&g, &x).unwrap();
        assert!((q - dense).abs() <= 1e-10 * dense.abs().max(1.0));
    }

    #[test]
    fn weight_classes_intervals() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 3.0), (2, 3, 4.0)]).unwrap();
        let classes = weight_class_partition(&g);
        let got: Vec<(usize, f64, Vec<f64>)> = classes
            .iter()
            .map(|c| (c.index, c.gamma, c.graph.edges().iter().map(|e| e.w).collect()))
            .collect();
        assert_eq!(
            got,
            vec![(1, 1.0, vec![1.0]), (2, 2.0, vec![3.0]), (3, 4.0, vec![4.0])]
        );
        assert!(classes.iter().all(|c| c.graph.n() == 4));
    }

    #[test]
    fn weight_classes_single_when_uniform() {
        let g = random_graph(10, 0.5, 1);
        let g = WeightedGraph::new(10, g.edges().iter().map(|e| (e.u, e.v, 2.0))).unwrap();
        let classes = weight_class_partition(&g);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].graph, g);
    }

    #[test]
    fn weight_classes_cover_wide_range() {
        let n = 40;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let hi = (n as f64).powi(3);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < 0.2 {
                    edges.push((u, v, rng.gen_range(1.0..hi)));
                }
            }
        }
        let g = WeightedGraph::new(n, edges).unwrap();
        let classes = weight_class_partition(&g);
        let total: usize = classes.iter().map(|c| c.graph.edge_count()).sum();
        assert_eq!(total, g.edge_count());
        let bound = (g.weight_ratio().log2().ceil() as usize) + 1;
        assert!(classes.len() <= bound);
        for c in &classes {
            for e in c.graph.edges() {
                assert!(e.w >= c.gamma && e.w < 2.0 * c.gamma);
            }
        }
    }

    #[test]
    fn degrees_small_cases() {
        let g = WeightedGraph::new(2, [(0, 1, 5.0)]).unwrap();
        let d = degrees(&g);
        assert_eq!(d.weighted, vec![5.0, 5.0]);
        assert_eq!(d.unweighted, vec![1, 1]);
        let tri = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let d = degrees(&tri);
        assert_eq!(d.weighted, vec![2.0; 3]);
        assert_eq!(d.unweighted, vec![2; 3]);
    }

    #[test]
    fn degrees_handshake() {
        let g = random_graph(30, 0.25, 2);
        let d = degrees(&g);
        let sum_w: f64 = d.weighted.iter().sum();
        let sum_d: usize = d.unweighted.iter().sum();
        assert!((sum_w - 2.0 * g.total_weight()).abs() < 1e-9);
        assert_eq!(sum_d, 2 * g.edge_count());
    }

    #[test]
    fn cheeger_small_graphs() {
        let k2 = WeightedGraph::new(2, [(0, 1, 3.0)]).unwrap();
        assert_eq!(exact_cheeger(&k2).unwrap().0, 1.0);
        let tri = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(exact_cheeger(&tri).unwrap().0, 1.0);
        let (h, cut) = exact_cheeger(&two_triangles_bridge()).unwrap();
        assert!((h - 1.0 / 7.0).abs() < 1e-12);
        assert_eq!(cut.crossing_edges, vec![Edge { u: 2, v: 3, w: 1.0 }]);
    }

    #[test]
    fn cheeger_errors() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(exact_cheeger(&g), Err(SketchError::Disconnected { components: 2 })));
        let big = random_graph(30, 0.9, 4);
        assert!(matches!(exact_cheeger(&big), Err(SketchError::GraphTooLarge { .. })));
    }

    #[test]
    fn cheeger_beats_random_cuts() {
        let g = random_graph(12, 0.35, 21);
        assert!(g.is_connected());
        let (h, _) = exact_cheeger(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let side: Vec<usize> = (0..12).filter(|_| rng.gen::<bool>()).collect();
            if side.is_empty() || side.len() == 12 {
                continue;
            }
            assert!(h <= conductance(&g, &side).conductance + 1e-12);
        }
    }

    #[test]
    fn components_split_and_keep_ids() {
        let g = WeightedGraph::new(6, [(0, 1, 1.0), (4, 5, 2.0), (1, 2, 1.0)]).unwrap();
        let parts = g.connected_components();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].support(), vec![0, 1, 2]);
        assert_eq!(parts[1].support(), vec![4, 5]);
        assert!(parts.iter().all(|p| p.n() == 6));
    }

    #[test]
    fn dyadic_index_boundaries() {
        assert_eq!(dyadic_index(1.0, 1.0), 1);
        assert_eq!(dyadic_index(1.999, 1.0), 1);
        assert_eq!(dyadic_index(2.0, 1.0), 2);
        assert_eq!(dyadic_index(8.0, 1.0), 4);
        assert_eq!(dyadic_index(0.3 * 4.0, 0.3), 3);
    }
}
