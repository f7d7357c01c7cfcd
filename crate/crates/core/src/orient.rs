//! Edge orientation that bounds out-degrees.
//!
//! Starting from a uniformly random orientation, repeatedly reverse an arc
//! `(u, v)` with `d_out(u) ≥ t` and `d_out(v) < t − 1`. On exit every arc
//! satisfies `d_out(tail) < t` or `d_out(head) ≥ t − 1`. Each reversal
//! lowers the potential `Σ_{violating (u,v)} (d_out(u) − d_out(v))` by at
//! least two, which bounds the number of reversals.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Result, SketchError};
use crate::graph::{Edge, WeightedGraph};
use crate::seed::rng_for;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrientedGraph {
    pub n: usize,
    pub arcs: Vec<Arc>,
    pub out_degree: Vec<usize>,
    pub weighted_out: Vec<f64>,
    pub weighted_in: Vec<f64>,
}

impl OrientedGraph {
    pub fn from_arcs(n: usize, arcs: Vec<Arc>) -> Self {
        let mut out_degree = vec![0; n];
        let mut weighted_out = vec![0.0; n];
        let mut weighted_in = vec![0.0; n];
        for a in &arcs {
            out_degree[a.tail] += 1;
            weighted_out[a.tail] += a.w;
            weighted_in[a.head] += a.w;
        }
        Self {
            n,
            arcs,
            out_degree,
            weighted_out,
            weighted_in,
        }
    }

    /// Forgets directions.
    pub fn undirected(&self) -> WeightedGraph {
        let edges = self
            .arcs
            .iter()
            .map(|a| Edge {
                u: a.tail.min(a.head),
                v: a.tail.max(a.head),
                w: a.w,
            })
            .collect();
        WeightedGraph::from_valid_edges(self.n, edges)
    }

    /// True when every arc satisfies `d_out(tail) < t` or `d_out(head) ≥ t − 1`.
    pub fn is_balanced(&self, t: f64) -> bool {
        self.arcs.iter().all(|a| {
            (self.out_degree[a.tail] as f64) < t || (self.out_degree[a.head] as f64) >= t - 1.0
        })
    }
}

/// Termination potential over the violating arcs; zero iff balanced.
pub fn potential(og: &OrientedGraph, t: f64) -> f64 {
    potential_of(&og.arcs, &og.out_degree, t)
}

fn violates(tail_deg: usize, head_deg: usize, t: f64) -> bool {
    (tail_deg as f64) >= t && (head_deg as f64) < t - 1.0
}

fn potential_of(arcs: &[Arc], out_degree: &[usize], t: f64) -> f64 {
    arcs.iter()
        .filter(|a| violates(out_degree[a.tail], out_degree[a.head], t))
        .map(|a| out_degree[a.tail] as f64 - out_degree[a.head] as f64)
        .sum()
}

/// Incremental reversal loop. Candidate tails are served FIFO.
#[derive(Debug, Clone)]
pub struct DirectionAssigner {
    t: f64,
    arcs: Vec<Arc>,
    out_degree: Vec<usize>,
    out_arcs: Vec<Vec<usize>>,
    slot: Vec<usize>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    flips: usize,
}

impl DirectionAssigner {
    /// Orients each edge uniformly at random under `seed`.
    pub fn new(g: &WeightedGraph, t: f64, seed: u64) -> Result<Self> {
        let mut rng = rng_for(seed);
        let arcs = g
            .edges()
            .iter()
            .map(|e| {
                if rng.gen::<bool>() {
                    Arc { tail: e.u, head: e.v, w: e.w }
                } else {
                    Arc { tail: e.v, head: e.u, w: e.w }
                }
            })
            .collect();
        Self::from_arcs(g.n(), arcs, t)
    }

    /// Starts from a given orientation.
    pub fn from_arcs(n: usize, arcs: Vec<Arc>, t: f64) -> Result<Self> {
        if !(t > 1.0 && t.is_finite()) {
            return Err(SketchError::InvalidParameter(format!(
                "orientation threshold must exceed 1, got {t}"
            )));
        }
        let mut out_degree = vec![0; n];
        let mut out_arcs = vec![Vec::new(); n];
        let mut slot = vec![0; arcs.len()];
        for (i, a) in arcs.iter().enumerate() {
            out_degree[a.tail] += 1;
            slot[i] = out_arcs[a.tail].len();
            out_arcs[a.tail].push(i);
        }
        let mut queue = VecDeque::new();
        let mut queued = vec![false; n];
        for v in 0..n {
            if out_degree[v] as f64 >= t {
                queue.push_back(v);
                queued[v] = true;
            }
        }
        Ok(Self {
            t,
            arcs,
            out_degree,
            out_arcs,
            slot,
            queue,
            queued,
            flips: 0,
        })
    }

    pub fn potential(&self) -> f64 {
        potential_of(&self.arcs, &self.out_degree, self.t)
    }

    pub fn flips(&self) -> usize {
        self.flips
    }

    /// Reverses one violating arc. Returns `false` once none remain.
    pub fn step(&mut self) -> bool {
        while let Some(&u) = self.queue.front() {
            if (self.out_degree[u] as f64) >= self.t {
                let found = self.out_arcs[u]
                    .iter()
                    .copied()
                    .find(|&i| violates(self.out_degree[u], self.out_degree[self.arcs[i].head], self.t));
                if let Some(i) = found {
                    self.reverse(i);
                    return true;
                }
            }
            self.queue.pop_front();
            self.queued[u] = false;
        }
        false
    }

    fn reverse(&mut self, i: usize) {
        let Arc { tail, head, w } = self.arcs[i];
        // Detach from the tail's out-list.
        let s = self.slot[i];
        let last = *self.out_arcs[tail].last().expect("arc is listed");
        self.out_arcs[tail].swap_remove(s);
        if last != i {
            self.slot[last] = s;
        }
        self.out_degree[tail] -= 1;

        self.arcs[i] = Arc { tail: head, head: tail, w };
        self.slot[i] = self.out_arcs[head].len();
        self.out_arcs[head].push(i);
        self.out_degree[head] += 1;
        self.flips += 1;

        if (self.out_degree[head] as f64) >= self.t && !self.queued[head] {
            self.queue.push_back(head);
            self.queued[head] = true;
        }
    }

    pub fn finish(self) -> OrientedGraph {
        let n = self.out_degree.len();
        OrientedGraph::from_arcs(n, self.arcs)
    }
}

pub fn assign_direction(g: &WeightedGraph, t: f64, seed: u64) -> Result<OrientedGraph> {
    let mut run = DirectionAssigner::new(g, t, seed)?;
    while run.step() {}
    let og = run.finish();
    debug_assert!(og.is_balanced(t));
    Ok(og)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_out_of_center(m: usize) -> (usize, Vec<Arc>) {
        (m + 1, (1..=m).map(|v| Arc { tail: 0, head: v, w: 1.0 }).collect())
    }

    #[test]
    fn single_edge_any_orientation() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        for seed in 0..8 {
            let og = assign_direction(&g, 2.0, seed).unwrap();
            assert_eq!(og.arcs.len(), 1);
            assert!(og.is_balanced(2.0));
        }
    }

    #[test]
    fn oriented_cycle_is_stable() {
        let n = 7;
        let arcs: Vec<Arc> = (0..n).map(|i| Arc { tail: i, head: (i + 1) % n, w: 1.0 }).collect();
        let mut run = DirectionAssigner::from_arcs(n, arcs.clone(), 2.0).unwrap();
        assert!(!run.step());
        assert_eq!(run.finish().arcs, arcs);
    }

    #[test]
    fn star_trace() {
        let (n, arcs) = star_out_of_center(4);
        let mut run = DirectionAssigner::from_arcs(n, arcs, 2.0).unwrap();
        assert_eq!(run.potential(), 16.0);
        let mut last = run.potential();
        while run.step() {
            let p = run.potential();
            assert!(last - p >= 2.0);
            last = p;
        }
        assert_eq!(run.flips(), 3);
        let og = run.finish();
        assert_eq!(og.out_degree[0], 1);
        assert_eq!(og.out_degree[1..].iter().filter(|&&d| d == 1).count(), 3);
        assert_eq!(potential(&og, 2.0), 0.0);
    }

    #[test]
    fn rejects_small_threshold() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert!(assign_direction(&g, 1.0, 0).is_err());
    }

    #[test]
    fn orientation_is_a_bijection_on_edges() {
        let edges: Vec<(usize, usize, f64)> = (0..30)
            .flat_map(|u| (u + 1..30).filter(move |v| (u * v) % 3 == 0).map(move |v| (u, v, 1.0 + u as f64)))
            .collect();
        let g = WeightedGraph::new(30, edges).unwrap();
        let og = assign_direction(&g, 3.5, 11).unwrap();
        assert_eq!(og.undirected(), g);
        assert!(og.is_balanced(3.5));
    }
}
