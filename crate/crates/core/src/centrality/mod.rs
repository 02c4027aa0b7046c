//! Node centrality on the raw (loop-free) adjacency.

mod paths;
mod pagerank;

use std::fmt;
use std::str::FromStr;

pub use pagerank::{pagerank, PAGERANK_DEFAULT_DAMPING, PAGERANK_DEFAULT_MAX_ITER, PAGERANK_DEFAULT_TOL};
pub use paths::{betweenness_centrality, closeness_centrality, harmonic_centrality};

use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CentralityMetric {
    PageRank,
    Degree,
    Closeness,
    Betweenness,
    Harmonic,
}

impl CentralityMetric {
    pub const ALL: [CentralityMetric; 5] = [
        CentralityMetric::PageRank,
        CentralityMetric::Degree,
        CentralityMetric::Closeness,
        CentralityMetric::Betweenness,
        CentralityMetric::Harmonic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CentralityMetric::PageRank => "pagerank",
            CentralityMetric::Degree => "degree",
            CentralityMetric::Closeness => "closeness",
            CentralityMetric::Betweenness => "betweenness",
            CentralityMetric::Harmonic => "harmonic",
        }
    }
}

impl fmt::Display for CentralityMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CentralityMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CentralityMetric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown centrality metric '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralityScores {
    pub metric: CentralityMetric,
    pub scores: Vec<f64>,
    /// Damping factor, PageRank only.
    pub damping: Option<f64>,
    /// False when PageRank hit its iteration cap before the tolerance.
    pub converged: bool,
}

impl CentralityScores {
    pub(crate) fn exact(metric: CentralityMetric, scores: Vec<f64>) -> Self {
        CentralityScores {
            metric,
            scores,
            damping: None,
            converged: true,
        }
    }
}

/// `deg(v) / (N - 1)`; 0 for a single-node graph.
pub fn degree_centrality(g: &Graph) -> CentralityScores {
    let n = g.n_nodes();
    let scale = if n > 1 { 1.0 / (n - 1) as f64 } else { 0.0 };
    let scores = (0..n).map(|v| g.degree(v) as f64 * scale).collect();
    CentralityScores::exact(CentralityMetric::Degree, scores)
}

/// Any metric with its default parameters.
pub fn compute(g: &Graph, metric: CentralityMetric) -> CentralityScores {
    match metric {
        CentralityMetric::PageRank => pagerank(
            g,
            PAGERANK_DEFAULT_DAMPING,
            PAGERANK_DEFAULT_TOL,
            PAGERANK_DEFAULT_MAX_ITER,
        )
        .expect("default damping is valid"),
        CentralityMetric::Degree => degree_centrality(g),
        CentralityMetric::Closeness => closeness_centrality(g),
        CentralityMetric::Betweenness => betweenness_centrality(g),
        CentralityMetric::Harmonic => harmonic_centrality(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_examples() {
        let (star, _) = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(degree_centrality(&star).scores[0], 1.0);

        let (path, _) = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(degree_centrality(&path).scores, vec![0.5, 1.0, 0.5]);

        let (isolated, _) = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(degree_centrality(&isolated).scores[2], 0.0);

        let (single, _) = Graph::from_edges(1, &[]).unwrap();
        assert_eq!(degree_centrality(&single).scores, vec![0.0]);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in CentralityMetric::ALL {
            assert_eq!(m.as_str().parse::<CentralityMetric>().unwrap(), m);
        }
        assert!("eigen".parse::<CentralityMetric>().is_err());
    }
}
