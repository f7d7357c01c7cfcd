//! Synthetic graph families.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Result, SketchError};
use crate::graph::WeightedGraph;
use crate::seed::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    /// Uniform `d`-regular simple graph.
    RandomRegular { degree: usize },
    /// Two cliques on `⌊n/2⌋` and `⌈n/2⌉` vertices joined by one edge.
    Barbell,
    /// Preferential attachment, `attach` edges per new vertex.
    PowerLaw { attach: usize },
    Complete,
    /// Clique on the first `core` vertices; every other vertex links to
    /// three random core vertices and its ring neighbour.
    DenseCore { core: usize },
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::RandomRegular { degree } => write!(f, "random-regular:{degree}"),
            GraphKind::Barbell => f.write_str("barbell"),
            GraphKind::PowerLaw { attach } => write!(f, "power-law:{attach}"),
            GraphKind::Complete => f.write_str("complete"),
            GraphKind::DenseCore { core } => write!(f, "dense-core:{core}"),
        }
    }
}

/// Accepts `random-regular[:d]`, `barbell`, `power-law[:m]`, `complete`,
/// `dense-core[:k]`.
impl FromStr for GraphKind {
    type Err = SketchError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let num = |default: usize| -> Result<usize> {
            arg.map_or(Ok(default), |a| {
                a.parse()
                    .map_err(|_| SketchError::InvalidParameter(format!("bad generator argument `{a}`")))
            })
        };
        match name {
            "random-regular" => Ok(GraphKind::RandomRegular { degree: num(6)? }),
            "barbell" if arg.is_none() => Ok(GraphKind::Barbell),
            "power-law" => Ok(GraphKind::PowerLaw { attach: num(3)? }),
            "complete" if arg.is_none() => Ok(GraphKind::Complete),
            "dense-core" => Ok(GraphKind::DenseCore { core: num(100)? }),
            _ => Err(SketchError::InvalidParameter(format!("unknown graph kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weights {
    Constant(f64),
    /// `exp(U · ln n³)`, i.e. log-uniform in `[1, n³]`.
    LogUniform,
}

fn invalid(msg: String) -> SketchError {
    SketchError::InvalidParameter(msg)
}

pub fn generate(kind: GraphKind, n: usize, weights: Weights, seed: u64) -> Result<WeightedGraph> {
    let mut rng = rng_for(seed);
    let pairs = match kind {
        GraphKind::Complete => {
            if n < 2 {
                return Err(invalid(format!("complete graph needs n ≥ 2, got {n}")));
            }
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
        }
        GraphKind::Barbell => {
            if n < 4 {
                return Err(invalid(format!("barbell needs n ≥ 4, got {n}")));
            }
            let k = n / 2;
            let mut p: Vec<(usize, usize)> = (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))).collect();
            p.extend((k..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))));
            p.push((k - 1, k));
            p
        }
        GraphKind::RandomRegular { degree } => random_regular(n, degree, &mut rng)?,
        GraphKind::PowerLaw { attach } => preferential_attachment(n, attach, &mut rng)?,
        GraphKind::DenseCore { core } => dense_core(n, core, &mut rng)?,
    };
    let top = (n.max(2) as f64).powi(3).ln();
    let triples: Vec<(usize, usize, f64)> = pairs
        .into_iter()
        .map(|(u, v)| {
            let w = match weights {
                Weights::Constant(c) => c,
                Weights::LogUniform => (rng.gen::<f64>() * top).exp(),
            };
            (u, v, w)
        })
        .collect();
    WeightedGraph::new(n, triples)
}

/// Pairing model with incremental rejection: points are matched one pair
/// at a time, skipping loops and repeats, and the whole pairing restarts
/// when no admissible pair turns up.
fn random_regular<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if d == 0 || d >= n || (n * d) % 2 == 1 {
        return Err(invalid(format!("no simple {d}-regular graph on {n} vertices")));
    }
    'restart: for _ in 0..1000 {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        let mut edges = BTreeSet::new();
        while !points.is_empty() {
            let mut placed = false;
            for _ in 0..64 {
                let i = rng.gen_range(0..points.len());
                let j = rng.gen_range(0..points.len());
                let (u, v) = (points[i], points[j]);
                if i == j || u == v || edges.contains(&(u.min(v), u.max(v))) {
                    continue;
                }
                edges.insert((u.min(v), u.max(v)));
                let (hi, lo) = (i.max(j), i.min(j));
                points.swap_remove(hi);
                points.swap_remove(lo);
                placed = true;
                break;
            }
            if !placed {
                continue 'restart;
            }
        }
        return Ok(edges.into_iter().collect());
    }
    Err(invalid(format!("failed to sample a {d}-regular graph on {n} vertices")))
}

fn preferential_attachment<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if m == 0 || n < m + 1 {
        return Err(invalid(format!("power-law needs 1 ≤ attach < n, got attach={m}, n={n}")));
    }
    let mut edges: Vec<(usize, usize)> = (0..=m).flat_map(|u| (u + 1..=m).map(move |v| (u, v))).collect();
    // Each vertex appears once per incident edge end.
    let mut ends: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    for v in m + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(*ends.choose(rng).expect("seed clique"));
        }
        for t in targets {
            edges.push((t, v));
            ends.push(t);
            ends.push(v);
        }
    }
    Ok(edges)
}

fn dense_core<R: Rng>(n: usize, core: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if core < 4 || core > n {
        return Err(invalid(format!("dense-core needs 4 ≤ core ≤ n, got core={core}, n={n}")));
    }
    let mut edges: BTreeSet<(usize, usize)> =
        (0..core).flat_map(|u| (u + 1..core).map(move |v| (u, v))).collect();
    let core_ids: Vec<usize> = (0..core).collect();
    for v in core..n {
        for &c in core_ids.choose_multiple(rng, 3) {
            edges.insert((c, v));
        }
        if v + 1 < n {
            edges.insert((v, v + 1));
        }
    }
    Ok(edges.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degrees;

    #[test]
    fn barbell_of_eight() {
        let g = generate(GraphKind::Barbell, 8, Weights::Constant(1.0), 0).unwrap();
        assert_eq!(g.edge_count(), 13);
        assert!(g.is_connected());
    }

    #[test]
    fn random_regular_degrees() {
        let g = generate(GraphKind::RandomRegular { degree: 6 }, 100, Weights::Constant(1.0), 3).unwrap();
        assert_eq!(g.edge_count(), 300);
        assert!(degrees(&g).unweighted.iter().all(|&d| d == 6));
        assert!(generate(GraphKind::RandomRegular { degree: 3 }, 7, Weights::Constant(1.0), 0).is_err());
    }

    #[test]
    fn power_law_handshake() {
        let g = generate(GraphKind::PowerLaw { attach: 3 }, 200, Weights::LogUniform, 5).unwrap();
        let deg = degrees(&g);
        assert_eq!(deg.unweighted.iter().sum::<usize>(), 2 * g.edge_count());
        let total: f64 = deg.weighted.iter().sum();
        assert!((total - 2.0 * g.total_weight()).abs() <= 1e-9 * total);
        assert!(g.is_connected());
        let top = 200f64.powi(3);
        assert!(g.edges().iter().all(|e| e.w >= 1.0 && e.w <= top));
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("barbell".parse::<GraphKind>().unwrap(), GraphKind::Barbell);
        assert_eq!(
            "random-regular:4".parse::<GraphKind>().unwrap(),
            GraphKind::RandomRegular { degree: 4 }
        );
        assert_eq!("dense-core".parse::<GraphKind>().unwrap(), GraphKind::DenseCore { core: 100 });
        assert!("grid".parse::<GraphKind>().is_err());
        for k in [GraphKind::Complete, GraphKind::PowerLaw { attach: 2 }] {
            assert_eq!(k.to_string().parse::<GraphKind>().unwrap(), k);
        }
    }

    #[test]
    fn invalid_sizes() {
        assert!(generate(GraphKind::Complete, 1, Weights::Constant(1.0), 0).is_err());
        assert!(generate(GraphKind::Barbell, 3, Weights::Constant(1.0), 0).is_err());
        assert!(generate(GraphKind::DenseCore { core: 10 }, 5, Weights::Constant(1.0), 0).is_err());
    }
}
