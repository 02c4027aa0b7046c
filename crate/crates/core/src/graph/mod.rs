//! Graphs, datasets and the normalized adjacency used by the GCN.

mod io;

use std::fmt;
use std::str::FromStr;

pub use io::{load_dataset, load_graph, write_dataset, DatasetPaths, LoadOptions};

use crate::error::{AgeError, Result};
use crate::numerics::{DenseMatrix, SeededRng, SparseMatrix};

/// Undirected, unweighted graph without self-loops. Each edge is stored in
/// both directions.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    adjacency: SparseMatrix,
}

/// Bookkeeping from building a graph out of a raw edge list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeStats {
    pub input_edges: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

impl Graph {
    /// Symmetrizes, deduplicates and drops self-loops.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize)]) -> Result<(Graph, EdgeStats)> {
        let mut stats = EdgeStats {
            input_edges: edges.len(),
            ..EdgeStats::default()
        };
        let mut pairs = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n_nodes || v >= n_nodes {
                return Err(AgeError::Validation(format!(
                    "edge ({u}, {v}) references a node outside [0, {n_nodes})"
                )));
            }
            if u == v {
                stats.self_loops_dropped += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        stats.duplicates_collapsed = before - pairs.len();

        let mut triplets = Vec::with_capacity(2 * pairs.len());
        for &(u, v) in &pairs {
            triplets.push((u, v, 1.0));
            triplets.push((v, u, 1.0));
        }
        let adjacency = SparseMatrix::from_triplets(n_nodes, n_nodes, &triplets)?;
        Ok((Graph { adjacency }, stats))
    }

    /// Wraps an adjacency matrix after checking it is binary, symmetric and loop-free.
    pub fn from_adjacency(adjacency: SparseMatrix) -> Result<Graph> {
        if adjacency.rows() != adjacency.cols() {
            return Err(AgeError::Validation("adjacency must be square".into()));
        }
        for i in 0..adjacency.rows() {
            for (j, v) in adjacency.row(i) {
                if i == j || v != 1.0 {
                    return Err(AgeError::Validation(format!(
                        "adjacency entry ({i}, {j}) = {v} is not a binary off-diagonal edge"
                    )));
                }
            }
        }
        if !adjacency.is_symmetric() {
            return Err(AgeError::Validation("adjacency is not symmetric".into()));
        }
        Ok(Graph { adjacency })
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.adjacency.rows()
    }

    /// Number of undirected edges.
    pub fn n_edges(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        self.adjacency.row_indices(v)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Undirected edge list with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n_nodes())
            .flat_map(|u| self.neighbors(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }
}

/// `D̃^(-1/2) (A + I) D̃^(-1/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedAdjacency {
    matrix: SparseMatrix,
}

impl NormalizedAdjacency {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }
}

pub fn normalize_adjacency(g: &Graph) -> NormalizedAdjacency {
    let n = g.n_nodes();
    // Degrees including the added self-loop.
    let inv_sqrt: Vec<f64> = (0..n).map(|v| 1.0 / ((g.degree(v) + 1) as f64).sqrt()).collect();

    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::with_capacity(g.adjacency().nnz() + n);
    let mut values = Vec::with_capacity(g.adjacency().nnz() + n);
    row_offsets.push(0);
    for i in 0..n {
        let mut diagonal_done = false;
        for &j in g.neighbors(i) {
            if !diagonal_done && j > i {
                col_indices.push(i);
                values.push(inv_sqrt[i] * inv_sqrt[i]);
                diagonal_done = true;
            }
            col_indices.push(j);
            // Multiply in a fixed order so (i, j) and (j, i) agree bit for bit.
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            values.push(inv_sqrt[a] * inv_sqrt[b]);
        }
        if !diagonal_done {
            col_indices.push(i);
            values.push(inv_sqrt[i] * inv_sqrt[i]);
        }
        row_offsets.push(col_indices.len());
    }
    let matrix = SparseMatrix::from_csr(n, n, row_offsets, col_indices, values)
        .expect("normalized adjacency keeps CSR invariants");
    NormalizedAdjacency { matrix }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitTag {
    TrainPool,
    Validation,
    Test,
}

impl SplitTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitTag::TrainPool => "train_pool",
            SplitTag::Validation => "validation",
            SplitTag::Test => "test",
        }
    }
}

impl fmt::Display for SplitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train_pool" => Ok(SplitTag::TrainPool),
            "validation" => Ok(SplitTag::Validation),
            "test" => Ok(SplitTag::Test),
            other => Err(format!("unknown split tag '{other}'")),
        }
    }
}

/// Node partition into training pool, validation and test sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    tags: Vec<SplitTag>,
}

impl Split {
    pub fn new(tags: Vec<SplitTag>) -> Self {
        Split { tags }
    }

    pub fn tags(&self) -> &[SplitTag] {
        &self.tags
    }

    pub fn tag(&self, v: usize) -> SplitTag {
        self.tags[v]
    }

    /// Ascending ids of the nodes carrying `tag`.
    pub fn nodes(&self, tag: SplitTag) -> Vec<usize> {
        self.tags
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == tag)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count(&self, tag: SplitTag) -> usize {
        self.tags.iter().filter(|&&t| t == tag).count()
    }

    /// Returns the split unchanged when it already has validation nodes;
    /// otherwise moves `validation_size` uniformly chosen training-pool
    /// nodes into validation.
    pub fn with_sampled_validation(&self, validation_size: usize, rng: &mut SeededRng) -> Result<Split> {
        if self.count(SplitTag::Validation) > 0 {
            return Ok(self.clone());
        }
        let pool = self.nodes(SplitTag::TrainPool);
        if validation_size > pool.len() {
            return Err(AgeError::Config(format!(
                "cannot draw {validation_size} validation nodes from {} non-test nodes",
                pool.len()
            )));
        }
        let mut tags = self.tags.clone();
        for v in rng.sample(&pool, validation_size) {
            tags[v] = SplitTag::Validation;
        }
        Ok(Split { tags })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub graph: Graph,
    /// `N × F`.
    pub features: DenseMatrix,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub split: Split,
    pub edge_stats: EdgeStats,
}

impl Dataset {
    /// Checks shapes, the class range and the split length.
    pub fn new(
        graph: Graph,
        features: DenseMatrix,
        labels: Vec<usize>,
        split: Split,
        edge_stats: EdgeStats,
    ) -> Result<Dataset> {
        let n = graph.n_nodes();
        if features.rows() != n {
            return Err(AgeError::Validation(format!(
                "feature matrix has {} rows for {n} nodes",
                features.rows()
            )));
        }
        if labels.len() != n || split.tags().len() != n {
            return Err(AgeError::Validation(format!(
                "{n} nodes but {} labels and {} split tags",
                labels.len(),
                split.tags().len()
            )));
        }
        let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; num_classes];
        labels.iter().for_each(|&c| seen[c] = true);
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(AgeError::Validation(format!(
                "class ids are not contiguous: class {missing} has no nodes"
            )));
        }
        Ok(Dataset {
            graph,
            features,
            labels,
            num_classes,
            split,
            edge_stats,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }
}

/// Divides every nonzero-sum row by its sum.
pub fn row_normalize(features: &mut DenseMatrix) {
    for i in 0..features.rows() {
        let row = features.row_mut(i);
        let sum: f64 = row.iter().sum();
        if sum != 0.0 {
            row.iter_mut().for_each(|v| *v /= sum);
        }
    }
}
