use std::fmt;
use std::str::FromStr;

use crate::active::{density_scores_over_pool, entropy_scores, percentile, sample_time_weights, TimeWeights};
use crate::centrality::CentralityScores;
use crate::error::{AgeError, Result};
use crate::numerics::{DenseMatrix, SeededRng};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StrategyKind {
    /// Label `L + B` nodes uniformly at random before training; no queries.
    Random,
    Entropy,
    Density,
    /// Equal weights on entropy and density percentiles.
    EntropyDensity,
    Centrality,
    /// Query all `B` nodes from a converged model, then retrain.
    Pipeline,
    /// Fixed `γ`, `α = β = (1 − γ)/2`.
    AgeFixed { gamma: f64 },
    AgeTimeSensitive,
    /// Class-balanced `(L + B)/C` labels per class before training; no queries.
    Gcn,
}

impl StrategyKind {
    /// Whether the strategy issues queries between epochs.
    pub fn is_interleaved(&self) -> bool {
        !matches!(self, StrategyKind::Random | StrategyKind::Pipeline | StrategyKind::Gcn)
    }

    /// Weights that do not change over time; `None` for sampled weights.
    pub fn fixed_weights(&self) -> Option<TimeWeights> {
        match self {
            StrategyKind::Entropy => Some(TimeWeights::ENTROPY),
            StrategyKind::Density => Some(TimeWeights::DENSITY),
            StrategyKind::Centrality => Some(TimeWeights::CENTRALITY),
            StrategyKind::EntropyDensity => Some(TimeWeights {
                alpha: 0.5,
                beta: 0.5,
                gamma: 0.0,
            }),
            StrategyKind::AgeFixed { gamma } => Some(TimeWeights::fixed(*gamma)),
            StrategyKind::Random | StrategyKind::Gcn => Some(TimeWeights::NONE),
            StrategyKind::AgeTimeSensitive | StrategyKind::Pipeline => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let StrategyKind::AgeFixed { gamma } = self {
            if !(*gamma > 0.0 && *gamma < 1.0) {
                return Err(AgeError::Config(format!("age_fixed needs γ in (0, 1), got {gamma}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyKind::Random => f.write_str("random"),
            StrategyKind::Entropy => f.write_str("entropy"),
            StrategyKind::Density => f.write_str("density"),
            StrategyKind::EntropyDensity => f.write_str("entropy_density"),
            StrategyKind::Centrality => f.write_str("centrality"),
            StrategyKind::Pipeline => f.write_str("pipeline"),
            StrategyKind::AgeFixed { gamma } => write!(f, "age_fixed:{gamma}"),
            StrategyKind::AgeTimeSensitive => f.write_str("age_time_sensitive"),
            StrategyKind::Gcn => f.write_str("gcn"),
        }
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    /// Accepts the names printed by `Display`; `age_fixed` takes its γ as `age_fixed:0.7`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let kind = match s {
            "random" => StrategyKind::Random,
            "entropy" => StrategyKind::Entropy,
            "density" => StrategyKind::Density,
            "entropy_density" => StrategyKind::EntropyDensity,
            "centrality" => StrategyKind::Centrality,
            "pipeline" => StrategyKind::Pipeline,
            "age" | "age_time_sensitive" => StrategyKind::AgeTimeSensitive,
            "gcn" => StrategyKind::Gcn,
            "age_fixed" => return Err("age_fixed needs a γ, e.g. age_fixed:0.7".into()),
            other => match other.strip_prefix("age_fixed:") {
                Some(g) => StrategyKind::AgeFixed {
                    gamma: g.parse().map_err(|_| format!("bad γ in '{other}'"))?,
                },
                None => return Err(format!("unknown strategy '{other}'")),
            },
        };
        kind.validate().map_err(|e| e.to_string())?;
        Ok(kind)
    }
}

/// Labeled set, candidate pool and query budget of one trial.
#[derive(Clone, Debug)]
pub struct QueryState {
    train_pool: Vec<usize>,
    labeled: Vec<usize>,
    candidates: Vec<usize>,
    budget_total: usize,
    t: usize,
    strategy: StrategyKind,
}

impl QueryState {
    /// `initial` must be distinct members of `train_pool`.
    pub fn new(train_pool: &[usize], initial: &[usize], budget_total: usize, strategy: StrategyKind) -> Result<Self> {
        let mut pool = train_pool.to_vec();
        pool.sort_unstable();
        pool.dedup();
        let mut in_labeled = std::collections::HashSet::with_capacity(initial.len());
        for &v in initial {
            if pool.binary_search(&v).is_err() {
                return Err(AgeError::Usage(format!("initial node {v} is not in the training pool")));
            }
            if !in_labeled.insert(v) {
                return Err(AgeError::Usage(format!("initial node {v} listed twice")));
            }
        }
        let candidates = pool.iter().copied().filter(|v| !in_labeled.contains(v)).collect();
        Ok(QueryState {
            train_pool: pool,
            labeled: initial.to_vec(),
            candidates,
            budget_total,
            t: 0,
            strategy,
        })
    }

    /// Labeled nodes in the order they were added.
    pub fn labeled(&self) -> &[usize] {
        &self.labeled
    }

    /// Unlabeled training-pool nodes, ascending.
    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn train_pool(&self) -> &[usize] {
        &self.train_pool
    }

    pub fn budget_total(&self) -> usize {
        self.budget_total
    }

    /// Number of queries issued so far.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn remaining(&self) -> usize {
        self.budget_total - self.t
    }

    pub fn strategy(&self) -> StrategyKind {
        self.strategy
    }

    /// Moves `nodes` from the candidates to the labeled set, counting them as queries.
    pub fn mark_labeled(&mut self, nodes: &[usize]) -> Result<()> {
        if nodes.len() > self.remaining() {
            return Err(AgeError::Usage(format!(
                "{} labels requested with {} queries left",
                nodes.len(),
                self.remaining()
            )));
        }
        for &v in nodes {
            let pos = self
                .candidates
                .binary_search(&v)
                .map_err(|_| AgeError::Usage(format!("node {v} is not a candidate")))?;
            self.candidates.remove(pos);
            self.labeled.push(v);
            self.t += 1;
        }
        Ok(())
    }

    /// Labeled and candidates are disjoint and together cover the training pool.
    pub fn partition_holds(&self) -> bool {
        let mut all: Vec<usize> = self.labeled.iter().chain(&self.candidates).copied().collect();
        all.sort_unstable();
        all == self.train_pool
    }
}

/// Which nodes k-means clusters for the density criterion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DensityPool {
    /// Only the query candidates.
    #[default]
    Candidates,
    /// Every node outside the labeled set, validation and test included.
    AllUnlabeled,
}

impl FromStr for DensityPool {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "candidates" => Ok(DensityPool::Candidates),
            "all" => Ok(DensityPool::AllUnlabeled),
            other => Err(format!("unknown density pool '{other}' (expected candidates|all)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryOptions {
    /// Clusters for the density criterion.
    pub kmeans_k: usize,
    pub density_pool: DensityPool,
}

/// Dropout-free model outputs used for scoring.
#[derive(Clone, Copy)]
pub struct ModelOutputs<'a> {
    pub z: &'a DenseMatrix,
    pub embeddings: &'a DenseMatrix,
}

/// Raw criterion scores aligned with a candidate list; `None` when the
/// criterion carries no weight.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawScores {
    pub entropy: Option<Vec<f64>>,
    pub density: Option<Vec<f64>>,
    pub centrality: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub nodes: Vec<usize>,
    /// Combined score of each selected node.
    pub scores: Vec<f64>,
    pub weights: TimeWeights,
    /// Query index (1-based) of the first selected node.
    pub first_t: usize,
}

/// Percentile-normalizes each present criterion and mixes them with `w`.
pub fn combined_scores(
    p_entropy: &[f64],
    p_density: &[f64],
    p_centrality: &[f64],
    w: &TimeWeights,
) -> Result<Vec<f64>> {
    let n = p_entropy.len();
    if p_density.len() != n || p_centrality.len() != n {
        return Err(AgeError::shape(
            "combined_scores",
            (n, p_density.len()),
            (n, p_centrality.len()),
        ));
    }
    Ok((0..n)
        .map(|i| w.alpha * p_entropy[i] + w.beta * p_density[i] + w.gamma * p_centrality[i])
        .collect())
}

fn combine_raw(raw: &RawScores, n: usize, w: &TimeWeights) -> Result<Vec<f64>> {
    let pct = |s: &Option<Vec<f64>>| -> Result<Vec<f64>> {
        match s {
            Some(v) if v.len() == n => Ok(percentile(v)),
            Some(v) => Err(AgeError::shape("raw scores", (n, 1), (v.len(), 1))),
            None => Ok(vec![0.0; n]),
        }
    };
    combined_scores(&pct(&raw.entropy)?, &pct(&raw.density)?, &pct(&raw.centrality)?, w)
}

/// Top `batch` candidates by score; ties go to the smaller node id.
pub fn top_candidates(candidates: &[usize], scores: &[f64], batch: usize) -> Vec<(usize, f64)> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then(candidates[a].cmp(&candidates[b]))
    });
    order
        .into_iter()
        .take(batch)
        .map(|i| (candidates[i], scores[i]))
        .collect()
}

fn check_can_query(state: &QueryState) -> Result<()> {
    if state.remaining() == 0 {
        return Err(AgeError::Usage("labeling budget exhausted".into()));
    }
    if state.candidates.is_empty() {
        return Err(AgeError::Usage("no candidates left to query".into()));
    }
    Ok(())
}

/// Ranks the candidates by precomputed raw scores and labels the top `batch`.
pub fn select_from_raw(state: &mut QueryState, raw: &RawScores, weights: TimeWeights, batch: usize) -> Result<Selection> {
    check_can_query(state)?;
    let combined = combine_raw(raw, state.candidates.len(), &weights)?;
    let take = batch.max(1).min(state.remaining());
    let top = top_candidates(&state.candidates, &combined, take);
    finish(state, top, weights)
}

fn finish(state: &mut QueryState, top: Vec<(usize, f64)>, weights: TimeWeights) -> Result<Selection> {
    let first_t = state.t + 1;
    let (nodes, scores): (Vec<usize>, Vec<f64>) = top.into_iter().unzip();
    state.mark_labeled(&nodes)?;
    Ok(Selection {
        nodes,
        scores,
        weights,
        first_t,
    })
}

/// Scores the candidates under the state's strategy and labels the best `batch`.
pub fn select_next(
    state: &mut QueryState,
    outputs: ModelOutputs<'_>,
    centrality: &CentralityScores,
    rng: &mut SeededRng,
    batch: usize,
    options: &QueryOptions,
) -> Result<Selection> {
    check_can_query(state)?;
    let take = batch.max(1).min(state.remaining());

    if matches!(state.strategy, StrategyKind::Random | StrategyKind::Gcn) {
        let picks = rng.sample(&state.candidates, take.min(state.candidates.len()));
        let top = picks.into_iter().map(|v| (v, 0.0)).collect();
        return finish(state, top, TimeWeights::NONE);
    }

    let weights = match state.strategy.fixed_weights() {
        Some(w) => w,
        None => sample_time_weights(state.t + 1, state.budget_total, rng)?,
    };
    let candidates = &state.candidates;
    let mut raw = RawScores::default();
    if weights.alpha > 0.0 {
        raw.entropy = Some(entropy_scores(outputs.z, candidates));
    }
    if weights.beta > 0.0 {
        let pool: Vec<usize> = match options.density_pool {
            DensityPool::Candidates => candidates.clone(),
            DensityPool::AllUnlabeled => {
                let mut labeled = vec![false; outputs.embeddings.rows()];
                state.labeled.iter().for_each(|&v| labeled[v] = true);
                (0..labeled.len()).filter(|&v| !labeled[v]).collect()
            }
        };
        raw.density = Some(density_scores_over_pool(
            outputs.embeddings,
            candidates,
            &pool,
            options.kmeans_k,
            rng,
        )?);
    }
    if weights.gamma > 0.0 {
        raw.centrality = Some(candidates.iter().map(|&v| centrality.scores[v]).collect());
    }
    select_from_raw(state, &raw, weights, take)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::pagerank;
    use crate::graph::Graph;

    fn opts() -> QueryOptions {
        QueryOptions {
            kmeans_k: 2,
            density_pool: DensityPool::Candidates,
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [
            StrategyKind::Random,
            StrategyKind::Entropy,
            StrategyKind::Density,
            StrategyKind::EntropyDensity,
            StrategyKind::Centrality,
            StrategyKind::Pipeline,
            StrategyKind::AgeFixed { gamma: 0.3 },
            StrategyKind::AgeTimeSensitive,
            StrategyKind::Gcn,
        ] {
            assert_eq!(s.to_string().parse::<StrategyKind>().unwrap(), s);
        }
        assert!("age_fixed".parse::<StrategyKind>().is_err());
        assert!("age_fixed:1.5".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn centrality_strategy_picks_star_hub() {
        let (g, _) = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let pr = pagerank(&g, 0.85, 1e-10, 200).unwrap();
        let hub = (0..6).max_by(|&a, &b| pr.scores[a].total_cmp(&pr.scores[b])).unwrap();
        assert_eq!(hub, 0);
        let z = DenseMatrix::zeros(6, 2);
        let emb = DenseMatrix::zeros(6, 2);
        let mut state = QueryState::new(&[0, 1, 2, 3, 4, 5], &[], 3, StrategyKind::Centrality).unwrap();
        let outputs = ModelOutputs { z: &z, embeddings: &emb };
        let sel = select_next(&mut state, outputs, &pr, &mut SeededRng::new(0, 0), 1, &opts()).unwrap();
        assert_eq!(sel.nodes, vec![0]);
        assert_eq!(state.t(), 1);
    }

    #[test]
    fn entropy_strategy_picks_uncertain_node() {
        let mut z = DenseMatrix::zeros(4, 3);
        for (v, c) in [(0, 0), (1, 1), (3, 2)] {
            z.set(v, c, 1.0);
        }
        z.row_mut(2).fill(1.0 / 3.0);
        let emb = DenseMatrix::zeros(4, 2);
        let (g, _) = Graph::from_edges(4, &[(0, 1)]).unwrap();
        let pr = pagerank(&g, 0.85, 1e-10, 200).unwrap();
        let mut state = QueryState::new(&[0, 1, 2, 3], &[], 2, StrategyKind::Entropy).unwrap();
        let outputs = ModelOutputs { z: &z, embeddings: &emb };
        let sel = select_next(&mut state, outputs, &pr, &mut SeededRng::new(0, 0), 1, &opts()).unwrap();
        assert_eq!(sel.nodes, vec![2]);
        assert_eq!(sel.weights, TimeWeights::ENTROPY);
    }

    #[test]
    fn batch_selection_labels_distinct_nodes() {
        let n = 10;
        let (g, _) = Graph::from_edges(n, &[(0, 1), (1, 2), (2, 3), (5, 6)]).unwrap();
        let pr = pagerank(&g, 0.85, 1e-10, 200).unwrap();
        let mut rng = SeededRng::new(1, 0);
        let z = crate::numerics::softmax_rows(&crate::numerics::glorot_init(&mut rng, n, 3));
        let emb = crate::numerics::glorot_init(&mut rng, n, 4);
        let pool: Vec<usize> = (0..n).collect();
        let mut state = QueryState::new(&pool, &[0, 9], 5, StrategyKind::AgeTimeSensitive).unwrap();
        let outputs = ModelOutputs { z: &z, embeddings: &emb };
        let sel = select_next(&mut state, outputs, &pr, &mut rng, 3, &opts()).unwrap();
        assert_eq!(sel.nodes.len(), 3);
        let mut uniq = sel.nodes.clone();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(uniq.len(), 3);
        assert_eq!(state.labeled().len(), 5);
        assert_eq!(state.t(), 3);
        assert!(state.partition_holds());
        assert_eq!(sel.weights.sum(), 1.0);

        // Only two queries remain, so a batch of three is capped.
        let sel = select_next(&mut state, outputs, &pr, &mut rng, 3, &opts()).unwrap();
        assert_eq!(sel.nodes.len(), 2);
        assert!(matches!(
            select_next(&mut state, outputs, &pr, &mut rng, 1, &opts()),
            Err(AgeError::Usage(_))
        ));
    }

    #[test]
    fn ties_break_by_smallest_id() {
        let top = top_candidates(&[7, 3, 5], &[0.5, 0.5, 0.1], 2);
        assert_eq!(top, vec![(3, 0.5), (7, 0.5)]);
    }

    #[test]
    fn combined_examples() {
        let w = TimeWeights {
            alpha: 1.0 / 3.0,
            beta: 1.0 / 3.0,
            gamma: 1.0 / 3.0,
        };
        let c = combined_scores(&[0.9], &[0.0], &[0.6], &w).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-15);
        let pe = [0.1, 0.7, 0.3];
        assert_eq!(combined_scores(&pe, &[0.5; 3], &[0.2; 3], &TimeWeights::ENTROPY).unwrap(), pe);
        assert!(combined_scores(&pe, &[0.5; 2], &[0.2; 3], &TimeWeights::ENTROPY).is_err());
    }

    #[test]
    fn state_rejects_foreign_initial_nodes() {
        assert!(QueryState::new(&[1, 2, 3], &[4], 1, StrategyKind::Entropy).is_err());
        assert!(QueryState::new(&[1, 2, 3], &[2, 2], 1, StrategyKind::Entropy).is_err());
        let s = QueryState::new(&[3, 1, 2], &[2], 1, StrategyKind::Entropy).unwrap();
        assert_eq!(s.candidates(), &[1, 3]);
    }

    #[test]
    fn empty_candidates_is_a_usage_error() {
        let (g, _) = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let pr = pagerank(&g, 0.85, 1e-10, 200).unwrap();
        let z = DenseMatrix::zeros(2, 2);
        let mut state = QueryState::new(&[0, 1], &[0, 1], 4, StrategyKind::Centrality).unwrap();
        let outputs = ModelOutputs { z: &z, embeddings: &z };
        let err = select_next(&mut state, outputs, &pr, &mut SeededRng::new(0, 0), 1, &opts()).unwrap_err();
        assert!(err.to_string().contains("no candidates"));
    }
}
