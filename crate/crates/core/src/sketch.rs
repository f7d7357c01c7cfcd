//! Replicated sketches, the median query, and size accounting.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::basic::{build_basic, estimate_basic, BasicSketch, BuildOptions};
use crate::error::{Result, SketchError};
use crate::graph::{check_dimension, WeightedGraph};
use crate::improved::{build_improved, estimate_improved, ImprovedSketch};
use crate::params::SketchParams;
use crate::seed::{derive_seed, TAG_REPLICA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Basic,
    Improved,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Basic => "basic",
            Algorithm::Improved => "improved",
        })
    }
}

impl FromStr for Algorithm {
    type Err = SketchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Algorithm::Basic),
            "improved" => Ok(Algorithm::Improved),
            other => Err(SketchError::InvalidParameter(format!(
                "unknown algorithm `{other}` (expected basic or improved)"
            ))),
        }
    }
}

/// One independent single-shot estimator.
#[derive(Debug, Clone, PartialEq)]
pub enum Replica {
    Basic(BasicSketch),
    Improved(ImprovedSketch),
}

impl Replica {
    pub fn n(&self) -> usize {
        match self {
            Replica::Basic(s) => s.n,
            Replica::Improved(s) => s.n,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Replica::Basic(_) => Algorithm::Basic,
            Replica::Improved(_) => Algorithm::Improved,
        }
    }

    pub fn estimate(&self, x: &[f64]) -> Result<f64> {
        match self {
            Replica::Basic(s) => estimate_basic(s, x),
            Replica::Improved(s) => estimate_improved(s, x),
        }
    }

    pub fn size(&self) -> SizeReport {
        size_report(self)
    }
}

/// Median-of-replicas sketch with the parameters it was built under.
#[derive(Debug, Clone, PartialEq)]
pub struct Sketch {
    pub algorithm: Algorithm,
    pub params: SketchParams,
    pub seed: u64,
    pub n: usize,
    pub replicas: Vec<Replica>,
}

impl Sketch {
    pub fn query(&self, x: &[f64]) -> Result<QueryReport> {
        check_dimension(self.n, x)?;
        median_query(&self.replicas, x)
    }

    /// Sizes summed over all replicas.
    pub fn size(&self) -> SizeReport {
        self.replicas
            .iter()
            .map(size_report)
            .fold(SizeReport::default(), |a, b| a + b)
    }
}

pub fn replica_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, &[TAG_REPLICA, index as u64])
}

pub fn build_replica(
    g: &WeightedGraph,
    algorithm: Algorithm,
    params: &SketchParams,
    opts: &BuildOptions,
    seed: u64,
) -> Result<Replica> {
    Ok(match algorithm {
        Algorithm::Basic => Replica::Basic(build_basic(g, params, opts, seed)?),
        Algorithm::Improved => Replica::Improved(build_improved(g, params, opts, seed)?),
    })
}

/// Builds `params.replicas()` independent replicas in parallel.
pub fn build_sketch(
    g: &WeightedGraph,
    algorithm: Algorithm,
    params: &SketchParams,
    opts: &BuildOptions,
    seed: u64,
) -> Result<Sketch> {
    build_sketch_with_replicas(g, algorithm, params, opts, seed, params.replicas())
}

pub fn build_sketch_with_replicas(
    g: &WeightedGraph,
    algorithm: Algorithm,
    params: &SketchParams,
    opts: &BuildOptions,
    seed: u64,
    count: usize,
) -> Result<Sketch> {
    if count == 0 {
        return Err(SketchError::InvalidParameter("need at least one replica".into()));
    }
    let replicas = (0..count)
        .into_par_iter()
        .map(|r| build_replica(g, algorithm, params, opts, replica_seed(seed, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sketch {
        algorithm,
        params: *params,
        seed,
        n: g.n(),
        replicas,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryReport {
    pub estimate: f64,
    pub replicas: Vec<f64>,
    pub exact: Option<f64>,
    pub relative_error: Option<f64>,
}

impl QueryReport {
    /// Attaches an exact value and the resulting relative error.
    pub fn with_exact(mut self, exact: f64) -> Self {
        self.exact = Some(exact);
        self.relative_error = Some(relative_error(self.estimate, exact));
        self
    }
}

/// `|estimate − exact| / |exact|`, or the absolute error when `exact` is 0.
pub fn relative_error(estimate: f64, exact: f64) -> f64 {
    let diff = (estimate - exact).abs();
    if exact == 0.0 {
        diff
    } else {
        diff / exact.abs()
    }
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn median_query(replicas: &[Replica], x: &[f64]) -> Result<QueryReport> {
    if replicas.is_empty() {
        return Err(SketchError::InvalidParameter("no replicas to query".into()));
    }
    let values = replicas
        .iter()
        .map(|r| r.estimate(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(QueryReport {
        estimate: median(&values),
        replicas: values,
        exact: None,
        relative_error: None,
    })
}

/// Record counts and bit sizes under a fixed encoding convention: vertex
/// ids take `⌈log₂ n⌉` bits, weights and degrees 32, multiplicities
/// `⌈log₂(α or β)⌉ + 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SizeReport {
    pub stored_edges: u64,
    /// Distinct `(u, v, Y)` records.
    pub sample_records: u64,
    /// Total draws, i.e. the sum of all multiplicities.
    pub draws: u64,
    /// Scalar entries of the degree tables.
    pub degree_entries: u64,
    pub stored_edge_bits: u64,
    pub sample_bits: u64,
    pub degree_table_bits: u64,
}

impl SizeReport {
    pub fn records(&self) -> u64 {
        self.stored_edges + self.sample_records
    }

    pub fn total_bits(&self) -> u64 {
        self.stored_edge_bits + self.sample_bits + self.degree_table_bits
    }
}

impl std::ops::Add for SizeReport {
    type Output = SizeReport;

    fn add(self, o: SizeReport) -> SizeReport {
        SizeReport {
            stored_edges: self.stored_edges + o.stored_edges,
            sample_records: self.sample_records + o.sample_records,
            draws: self.draws + o.draws,
            degree_entries: self.degree_entries + o.degree_entries,
            stored_edge_bits: self.stored_edge_bits + o.stored_edge_bits,
            sample_bits: self.sample_bits + o.sample_bits,
            degree_table_bits: self.degree_table_bits + o.degree_table_bits,
        }
    }
}

pub(crate) const WEIGHT_BITS: u64 = 32;

pub(crate) fn id_bits(n: usize) -> u64 {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1) as u64
}

fn multiplicity_bits(draws: usize) -> u64 {
    id_bits(draws) + 1
}

pub fn size_report(r: &Replica) -> SizeReport {
    let id = id_bits(r.n());
    let edge_bits = 2 * id + WEIGHT_BITS;
    let mut s = SizeReport::default();
    // (rows, scalar values per row)
    let degree_rows = |s: &mut SizeReport, rows: usize, values: u64| {
        s.degree_entries += rows as u64 * values;
        s.degree_table_bits += rows as u64 * (id + values * WEIGHT_BITS);
    };
    match r {
        Replica::Basic(b) => {
            let record_bits = 2 * id + multiplicity_bits(b.alpha);
            for class in &b.classes {
                s.stored_edges += class.q.edge_count() as u64;
                for c in &class.components {
                    s.stored_edges += c.light_edges.len() as u64;
                    s.sample_records += c.sample_records() as u64;
                    s.draws += c.draw_count() as u64;
                    degree_rows(&mut s, c.degrees.len(), 1);
                    degree_rows(&mut s, c.heavy.len(), 1);
                }
            }
            s.sample_bits = s.sample_records * record_bits;
        }
        Replica::Improved(m) => {
            let record_bits = 2 * id + multiplicity_bits(m.beta);
            for st in &m.stored {
                s.stored_edges += st.graph.edge_count() as u64;
            }
            for st in &m.sampled {
                s.stored_edges += st.q.edge_count() as u64;
                for c in &st.components {
                    s.stored_edges += c.s_arcs.len() as u64;
                    s.sample_records += c.sample_records() as u64;
                    s.draws += c.draw_count() as u64;
                    degree_rows(&mut s, c.vertices.len(), 2);
                    degree_rows(&mut s, c.samples.len(), 1);
                }
            }
            s.sample_bits = s.sample_records * record_bits;
        }
    }
    s.stored_edge_bits = s.stored_edges * edge_bits;
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3.0, 100.0, 3.1]), 3.1);
        assert_eq!(median(&[7.5]), 7.5);
        assert_eq!(median(&[1.0, 4.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn id_bit_widths() {
        assert_eq!(id_bits(1), 1);
        assert_eq!(id_bits(2), 1);
        assert_eq!(id_bits(3), 2);
        assert_eq!(id_bits(4), 2);
        assert_eq!(id_bits(5), 3);
        assert_eq!(id_bits(500), 9);
        assert_eq!(id_bits(1024), 10);
    }

    #[test]
    fn single_replica_median_is_that_replica() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)]).unwrap();
        let params = SketchParams::new(0.3, 0.1).unwrap();
        let sk = build_sketch_with_replicas(&g, Algorithm::Basic, &params, &BuildOptions::default(), 1, 1)
            .unwrap();
        let x = [1.0, 0.0, -1.0, 2.0];
        let report = sk.query(&x).unwrap();
        assert_eq!(report.replicas.len(), 1);
        assert_eq!(report.estimate, report.replicas[0]);
    }

    #[test]
    fn sizes_of_trivial_sketches() {
        let params = SketchParams::new(0.3, 0.1).unwrap();
        let opts = BuildOptions::default();
        for algo in [Algorithm::Basic, Algorithm::Improved] {
            let empty = build_replica(&WeightedGraph::empty(5), algo, &params, &opts, 0).unwrap();
            assert_eq!(size_report(&empty), SizeReport::default());
            let k2 = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
            let r = build_replica(&k2, algo, &params, &opts, 0).unwrap();
            assert_eq!(size_report(&r).records(), 1);
            assert_eq!(size_report(&r).stored_edges, 1);
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [Algorithm::Basic, Algorithm::Improved] {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert!("fast".parse::<Algorithm>().is_err());
    }
}
