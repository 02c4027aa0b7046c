//! Query engine: informativeness scores, percentile mixing and node selection.

mod query;
mod scores;
mod weights;

use std::fmt;

pub use query::{
    combined_scores, select_from_raw, select_next, top_candidates, DensityPool, ModelOutputs, QueryOptions,
    QueryState, RawScores, Selection, StrategyKind,
};
pub use scores::{density_scores, density_scores_over_pool, entropy_scores, percentile};
pub use weights::{sample_time_weights, TimeWeights};

/// One line of a trial's query log: `t<TAB>node<TAB>alpha<TAB>beta<TAB>gamma<TAB>score`.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryLogEntry {
    pub t: usize,
    pub node: usize,
    pub weights: TimeWeights,
    pub score: f64,
}

impl QueryLogEntry {
    /// Expands a selection into one entry per node, numbering queries from `first_t`.
    pub fn from_selection(sel: &Selection) -> Vec<QueryLogEntry> {
        sel.nodes
            .iter()
            .zip(&sel.scores)
            .enumerate()
            .map(|(i, (&node, &score))| QueryLogEntry {
                t: sel.first_t + i,
                node,
                weights: sel.weights,
                score,
            })
            .collect()
    }
}

impl fmt::Display for QueryLogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &self.weights;
        write!(
            f,
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            self.t, self.node, w.alpha, w.beta, w.gamma, self.score
        )
    }
}
