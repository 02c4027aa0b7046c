//! Active graph embedding.
//!
//! A two-layer graph convolutional network is trained on a citation graph
//! while an active-learning engine picks, after every epoch, the unlabeled
//! node whose label should be requested next. Candidates are ranked by a
//! weighted sum of three percentile-normalized criteria: prediction entropy,
//! closeness to a k-means centroid in embedding space, and PageRank. The
//! weights are resampled at each query so that the structural criterion
//! dominates early and the embedding-based criteria take over later.

pub mod active;
pub mod centrality;
pub mod error;
pub mod gcn;
pub mod graph;
pub mod harness;
pub mod numerics;

pub use active::{QueryState, StrategyKind, TimeWeights};
pub use centrality::{CentralityMetric, CentralityScores};
pub use error::{AgeError, Result};
pub use gcn::{GcnConfig, GcnModel};
pub use graph::{Dataset, Graph, NormalizedAdjacency, SplitTag};
pub use harness::{ExperimentConfig, ExperimentReport, TrialResult};
pub use numerics::{DenseMatrix, SeededRng, SparseMatrix};
