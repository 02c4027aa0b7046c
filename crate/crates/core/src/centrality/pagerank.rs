use crate::centrality::{CentralityMetric, CentralityScores};
use crate::error::{AgeError, Result};
use crate::graph::Graph;

pub const PAGERANK_DEFAULT_DAMPING: f64 = 0.85;
pub const PAGERANK_DEFAULT_TOL: f64 = 1e-8;
pub const PAGERANK_DEFAULT_MAX_ITER: usize = 200;

/// Power iteration for
/// `φ(v) = ρ·Σ_u A[v,u]·φ(u)/deg(u) + (1-ρ)/N`, with the mass of
/// zero-degree nodes spread uniformly. Starts from the uniform vector and
/// stops once the L1 change drops below `tol`.
pub fn pagerank(g: &Graph, rho: f64, tol: f64, max_iter: usize) -> Result<CentralityScores> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(AgeError::Parameter(format!("damping {rho} outside (0, 1)")));
    }
    let n = g.n_nodes();
    if n == 0 {
        return Err(AgeError::Parameter("PageRank of an empty graph".into()));
    }
    let nf = n as f64;
    let teleport = (1.0 - rho) / nf;
    let mut scores = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut converged = false;

    for _ in 0..max_iter {
        let dangling: f64 = (0..n).filter(|&u| g.degree(u) == 0).map(|u| scores[u]).sum();
        let base = teleport + rho * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g
                .neighbors(v)
                .iter()
                .map(|&u| scores[u] / g.degree(u) as f64)
                .sum();
            *slot = base + rho * inflow;
        }
        let change: f64 = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        if change < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("PageRank did not reach tolerance {tol} within {max_iter} iterations");
    }
    Ok(CentralityScores {
        metric: CentralityMetric::PageRank,
        scores,
        damping: Some(rho),
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense transition matrix iterated until the change is below 1e-15.
    fn dense_oracle(n: usize, edges: &[(usize, usize)], rho: f64) -> Vec<f64> {
        let mut a = vec![vec![0.0; n]; n];
        for &(u, v) in edges {
            a[u][v] = 1.0;
            a[v][u] = 1.0;
        }
        let deg: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let col = if deg[j] > 0.0 { a[i][j] / deg[j] } else { 1.0 / n as f64 };
                m[i][j] = rho * col + (1.0 - rho) / n as f64;
            }
        }
        let mut x = vec![1.0 / n as f64; n];
        for _ in 0..10_000 {
            let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * x[j]).sum()).collect();
            let change: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
            x = y;
            if change < 1e-15 {
                break;
            }
        }
        x
    }

    #[test]
    fn cycle_is_uniform() {
        let edges: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let (g, _) = Graph::from_edges(5, &edges).unwrap();
        for rho in [0.5, 0.85, 0.95] {
            let pr = pagerank(&g, rho, 1e-12, 200).unwrap();
            for s in &pr.scores {
                assert!((s - 0.2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn path_of_three_matches_dense_oracle() {
        let edges = [(0, 1), (1, 2)];
        let (g, _) = Graph::from_edges(3, &edges).unwrap();
        let pr = pagerank(&g, 0.85, 1e-14, 1000).unwrap();
        let want = dense_oracle(3, &edges, 0.85);
        for (a, b) in pr.scores.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10, "{:?} vs {want:?}", pr.scores);
        }
        // Closed form: endpoints (1 + ρ/2) / (3(1 + ρ)).
        assert!((want[0] - (1.0 + 0.425) / (3.0 * 1.85)).abs() < 1e-12);
        assert!(pr.scores[1] > pr.scores[0] && pr.scores[1] > pr.scores[2]);
    }

    #[test]
    fn dangling_nodes_keep_mass() {
        let edges = [(0, 1), (1, 2), (1, 3)];
        let (g, _) = Graph::from_edges(6, &edges).unwrap();
        let pr = pagerank(&g, 0.85, 1e-14, 1000).unwrap();
        assert!(pr.converged);
        let sum: f64 = pr.scores.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        let want = dense_oracle(6, &edges, 0.85);
        for (a, b) in pr.scores.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(pr.scores.iter().all(|&s| s >= 0.15 / 6.0));
    }

    #[test]
    fn rejects_bad_damping() {
        let (g, _) = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(pagerank(&g, 1.0, 1e-8, 10).is_err());
        assert!(pagerank(&g, 0.0, 1e-8, 10).is_err());
    }

    #[test]
    fn flags_non_convergence() {
        let (g, _) = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let pr = pagerank(&g, 0.85, 1e-30, 3).unwrap();
        assert!(!pr.converged);
        assert!((pr.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
