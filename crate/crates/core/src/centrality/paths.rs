//! Shortest-path centralities on unweighted graphs.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::centrality::{CentralityMetric, CentralityScores};
use crate::graph::Graph;

const UNREACHED: usize = usize::MAX;

fn bfs_distances(g: &Graph, source: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) {
    dist.fill(UNREACHED);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == UNREACHED {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
}

fn per_source<F>(g: &Graph, f: F) -> Vec<f64>
where
    F: Fn(usize, &[usize]) -> f64 + Sync,
{
    let n = g.n_nodes();
    (0..n)
        .into_par_iter()
        .map_init(
            || (vec![UNREACHED; n], VecDeque::new()),
            |(dist, queue), v| {
                bfs_distances(g, v, dist, queue);
                f(v, dist)
            },
        )
        .collect()
}

/// Closeness scaled by the reachable fraction:
/// `(r/(N-1)) · (r / Σ d(v,u))` over the `r` nodes reachable from `v`.
pub fn closeness_centrality(g: &Graph) -> CentralityScores {
    let n = g.n_nodes();
    let scores = per_source(g, |_, dist| {
        let (reach, total) = dist
            .iter()
            .filter(|&&d| d != UNREACHED && d > 0)
            .fold((0usize, 0usize), |(r, t), &d| (r + 1, t + d));
        if reach == 0 || n < 2 {
            0.0
        } else {
            let r = reach as f64;
            (r / (n - 1) as f64) * (r / total as f64)
        }
    });
    CentralityScores::exact(CentralityMetric::Closeness, scores)
}

/// `Σ_{u≠v} 1/d(v,u) / (N-1)`, unreachable pairs contributing 0.
pub fn harmonic_centrality(g: &Graph) -> CentralityScores {
    let n = g.n_nodes();
    let scores = per_source(g, |_, dist| {
        if n < 2 {
            return 0.0;
        }
        let sum: f64 = dist
            .iter()
            .filter(|&&d| d != UNREACHED && d > 0)
            .map(|&d| 1.0 / d as f64)
            .sum();
        sum / (n - 1) as f64
    });
    CentralityScores::exact(CentralityMetric::Harmonic, scores)
}

struct BrandesScratch {
    sigma: Vec<f64>,
    dist: Vec<usize>,
    delta: Vec<f64>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl BrandesScratch {
    fn new(n: usize) -> Self {
        BrandesScratch {
            sigma: vec![0.0; n],
            dist: vec![UNREACHED; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::new(),
        }
    }

    /// Adds the dependencies of every node on `source` into `acc`.
    fn accumulate(&mut self, g: &Graph, source: usize, acc: &mut [f64]) {
        self.sigma.fill(0.0);
        self.dist.fill(UNREACHED);
        self.delta.fill(0.0);
        self.order.clear();
        self.queue.clear();

        self.sigma[source] = 1.0;
        self.dist[source] = 0;
        self.queue.push_back(source);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            for &w in g.neighbors(v) {
                if self.dist[w] == UNREACHED {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                }
            }
        }
        // Predecessors are recovered from distances instead of stored lists.
        for &w in self.order.iter().rev() {
            for &v in g.neighbors(w) {
                if self.dist[v] != UNREACHED && self.dist[v] + 1 == self.dist[w] {
                    self.delta[v] += self.sigma[v] / self.sigma[w] * (1.0 + self.delta[w]);
                }
            }
            if w != source {
                acc[w] += self.delta[w];
            }
        }
    }
}

/// Exact Brandes betweenness normalized by `(N-1)(N-2)/2` for undirected graphs.
///
/// Sources are processed in fixed-size blocks whose partial sums are added
/// in block order, so the result does not depend on thread scheduling.
pub fn betweenness_centrality(g: &Graph) -> CentralityScores {
    const BLOCK: usize = 64;
    let n = g.n_nodes();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(BLOCK)
        .map(|block| {
            let mut scratch = BrandesScratch::new(n);
            let mut acc = vec![0.0; n];
            for &s in block {
                scratch.accumulate(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut scores = vec![0.0; n];
    for part in partials {
        for (s, p) in scores.iter_mut().zip(part) {
            *s += p;
        }
    }
    // Every unordered pair was counted from both endpoints.
    let scale = if n > 2 {
        1.0 / ((n - 1) * (n - 2)) as f64
    } else {
        0.0
    };
    scores.iter_mut().for_each(|s| *s *= scale);
    CentralityScores::exact(CentralityMetric::Betweenness, scores)
}
