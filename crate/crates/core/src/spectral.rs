//! Second eigenpair of the normalized Laplacian and Cheeger sweep cuts.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Result, SketchError};
use crate::graph::{conductance, degrees, Cut, WeightedGraph};

/// Supports up to this size use the dense symmetric eigensolver.
pub const DENSE_EIGEN_LIMIT: usize = 500;

const POWER_MAX_ITERS: usize = 200_000;
const POWER_RESIDUAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    DenseEig,
    PowerIteration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCertificate {
    /// `λ₁(L̂)`, the second-smallest eigenvalue of `D^{-1/2} L D^{-1/2}`.
    pub lambda1: f64,
    pub method: EigenMethod,
}

/// `λ₁` together with its eigenvector over the compacted support.
#[derive(Debug, Clone)]
pub(crate) struct Fiedler {
    pub certificate: SpectralCertificate,
    pub vector: Vec<f64>,
}

fn require_connected(local: &WeightedGraph) -> Result<()> {
    if local.n() < 2 {
        return Err(SketchError::InvalidParameter(
            "spectral routines need at least two vertices".into(),
        ));
    }
    let components = local.component_count();
    if components > 1 {
        return Err(SketchError::Disconnected { components });
    }
    Ok(())
}

pub fn lambda1(g: &WeightedGraph) -> Result<SpectralCertificate> {
    let (local, _) = g.compact();
    Ok(fiedler_local(&local, false)?.certificate)
}

/// Dense eigendecomposition regardless of size; the reference solver.
pub fn lambda1_dense(g: &WeightedGraph) -> Result<SpectralCertificate> {
    let (local, _) = g.compact();
    Ok(fiedler_local(&local, true)?.certificate)
}

pub(crate) fn fiedler_local(local: &WeightedGraph, force_dense: bool) -> Result<Fiedler> {
    require_connected(local)?;
    let k = local.n();
    let d = degrees(local).weighted;
    let inv_sqrt: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    if force_dense || k <= DENSE_EIGEN_LIMIT {
        dense_fiedler(local, &inv_sqrt)
    } else {
        power_fiedler(local, &d, &inv_sqrt)
    }
}

fn dense_fiedler(local: &WeightedGraph, inv_sqrt: &[f64]) -> Result<Fiedler> {
    let k = local.n();
    let mut m = DMatrix::<f64>::identity(k, k);
    for e in local.edges() {
        let a = e.w * inv_sqrt[e.u] * inv_sqrt[e.v];
        m[(e.u, e.v)] -= a;
        m[(e.v, e.u)] -= a;
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let idx = order[1];
    let lambda1 = eig.eigenvalues[idx].clamp(0.0, 2.0);
    if !lambda1.is_finite() {
        return Err(SketchError::EigenSolver("non-finite eigenvalue".into()));
    }
    Ok(Fiedler {
        certificate: SpectralCertificate {
            lambda1,
            method: EigenMethod::DenseEig,
        },
        vector: eig.eigenvectors.column(idx).iter().copied().collect(),
    })
}

/// Power iteration on `2I − L̂ = I + D^{-1/2} A D^{-1/2}` with the trivial
/// eigenvector `D^{1/2} 1` projected out.
fn power_fiedler(local: &WeightedGraph, d: &[f64], inv_sqrt: &[f64]) -> Result<Fiedler> {
    let k = local.n();
    let adj = local.adjacency();
    let mut top: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();
    normalize(&mut top);

    // Deterministic start that is not orthogonal to the target.
    let mut v: Vec<f64> = (0..k)
        .map(|i| ((i as f64 + 1.0) * 0.618_033_988_75).fract() - 0.5)
        .collect();
    deflate(&mut v, &top);
    normalize(&mut v);

    let mut w = vec![0.0; k];
    let mut mu = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        for i in 0..k {
            let mut acc = v[i];
            for &(j, wt) in &adj[i] {
                acc += wt * inv_sqrt[i] * inv_sqrt[j] * v[j];
            }
            w[i] = acc;
        }
        deflate(&mut w, &top);
        mu = dot(&v, &w);
        let residual: f64 = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - mu * b).powi(2))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut v, &mut w);
        normalize(&mut v);
        if residual <= POWER_RESIDUAL_TOL {
            return Ok(Fiedler {
                certificate: SpectralCertificate {
                    lambda1: (2.0 - mu).clamp(0.0, 2.0),
                    method: EigenMethod::PowerIteration,
                },
                vector: v,
            });
        }
    }
    Err(SketchError::EigenSolver(format!(
        "power iteration did not converge in {POWER_MAX_ITERS} steps (last estimate {:.6})",
        2.0 - mu
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn deflate(v: &mut [f64], unit: &[f64]) {
    let c = dot(v, unit);
    v.iter_mut().zip(unit).for_each(|(x, u)| *x -= c * u);
}

/// Best of the `k − 1` prefix cuts along the `D^{-1/2}`-scaled Fiedler
/// vector. The returned side is the one of smaller volume.
pub fn sweep_cut(g: &WeightedGraph) -> Result<Cut> {
    Ok(sweep_cut_certified(g)?.0)
}

/// Sweep cut together with the certificate it was derived from.
pub(crate) fn sweep_cut_certified(g: &WeightedGraph) -> Result<(Cut, SpectralCertificate)> {
    let (local, ids) = g.compact();
    let fiedler = fiedler_local(&local, false)?;
    match sweep_local(g, &local, &ids, &fiedler) {
        Ok(cut) => Ok((cut, fiedler.certificate)),
        Err(_) if fiedler.certificate.method == EigenMethod::PowerIteration
            && local.n() <= crate::sparsify::DENSE_RESISTANCE_LIMIT =>
        {
            let dense = fiedler_local(&local, true)?;
            let cut = sweep_local(g, &local, &ids, &dense)?;
            Ok((cut, dense.certificate))
        }
        Err(e) => Err(e),
    }
}

fn sweep_local(
    g: &WeightedGraph,
    local: &WeightedGraph,
    ids: &[usize],
    fiedler: &Fiedler,
) -> Result<Cut> {
    let k = local.n();
    let d = degrees(local).weighted;
    let total: f64 = d.iter().sum();
    let score: Vec<f64> = fiedler
        .vector
        .iter()
        .zip(&d)
        .map(|(x, di)| x / di.sqrt())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(a.cmp(&b)));

    let adj = local.adjacency();
    let mut in_s = vec![false; k];
    let mut cut = 0.0;
    let mut vol = 0.0;
    let mut best = (f64::INFINITY, 0usize);
    for (j, &v) in order.iter().enumerate().take(k - 1) {
        for &(y, w) in &adj[v] {
            if in_s[y] {
                cut -= w;
            } else {
                cut += w;
            }
        }
        in_s[v] = true;
        vol += d[v];
        let phi = cut / vol.min(total - vol);
        if phi < best.0 {
            best = (phi, j + 1);
        }
    }

    let prefix: Vec<usize> = order[..best.1].iter().map(|&i| ids[i]).collect();
    let mut result = conductance(g, &prefix);
    if result.volume_side > result.volume_rest {
        let suffix: Vec<usize> = order[best.1..].iter().map(|&i| ids[i]).collect();
        result = conductance(g, &suffix);
    }

    let lambda = fiedler.certificate.lambda1;
    let guarantee = (2.0 * lambda).sqrt();
    if result.conductance > guarantee * (1.0 + 1e-9) + 1e-12 {
        return Err(SketchError::EigenSolver(format!(
            "sweep conductance {:.6} exceeds sqrt(2 λ₁) = {:.6}",
            result.conductance, guarantee
        )));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> WeightedGraph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1.0)));
        WeightedGraph::new(n, edges).unwrap()
    }

    fn two_triangles_bridge() -> WeightedGraph {
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

    #[test]
    fn single_edge_lambda_is_two() {
        for w in [0.1, 1.0, 7.5] {
            let g = WeightedGraph::new(2, [(0, 1, w)]).unwrap();
            assert!((lambda1(&g).unwrap().lambda1 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_graph_lambda() {
        for m in [3, 5, 20] {
            let l = lambda1(&complete(m)).unwrap().lambda1;
            let expect = m as f64 / (m as f64 - 1.0);
            assert!((l - expect).abs() <= 1e-6 * expect, "K_{m}: {l}");
        }
    }

    #[test]
    fn disconnected_is_reported() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(lambda1(&g), Err(SketchError::Disconnected { components: 2 })));
    }

    #[test]
    fn power_iteration_agrees_with_dense() {
        // Cycle with chords: small enough for the dense oracle.
        let n = 60;
        let mut edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        edges.extend((0..n).step_by(3).map(|i| (i, (i + 17) % n, 1.5)));
        let g = WeightedGraph::new(n, edges).unwrap();
        let (local, _) = g.compact();
        let d = degrees(&local).weighted;
        let inv: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
        let power = power_fiedler(&local, &d, &inv).unwrap().certificate.lambda1;
        let dense = lambda1_dense(&g).unwrap().lambda1;
        assert!((power - dense).abs() <= 1e-4 * dense, "{power} vs {dense}");
    }

    #[test]
    fn sweep_finds_bridge() {
        let cut = sweep_cut(&two_triangles_bridge()).unwrap();
        assert!((cut.conductance - 1.0 / 7.0).abs() < 1e-12);
        assert_eq!(cut.crossing_edges.len(), 1);
        assert!(cut.volume_side <= cut.volume_rest);
    }

    #[test]
    fn sweep_on_k2_and_path() {
        let k2 = WeightedGraph::new(2, [(0, 1, 2.0)]).unwrap();
        assert_eq!(sweep_cut(&k2).unwrap().conductance, 1.0);
        let p4 = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let cut = sweep_cut(&p4).unwrap();
        assert!((cut.conductance - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(cut.crossing_edges[0].u, 1);
    }
}
