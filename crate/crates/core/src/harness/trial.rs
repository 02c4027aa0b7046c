use crate::active::{select_next, ModelOutputs, QueryLogEntry, QueryOptions, QueryState, Selection, StrategyKind};
use crate::centrality::{self, CentralityScores};
use crate::error::{AgeError, Result};
use crate::gcn::{train_epoch, EpochInputs, ForwardCache, GcnModel};
use crate::graph::{normalize_adjacency, Dataset, NormalizedAdjacency, Split, SplitTag};
use crate::harness::{micro_f1, macro_f1, ExperimentConfig};
use crate::numerics::{SeededRng, SparseMatrix};

// Substream purposes. Every strategy draws validation nodes, initial labels
// and initial weights from the same streams, so trial `i` of two strategies
// starts from the same state.
const STREAM_VALIDATION: u64 = 1;
const STREAM_INITIAL_LABELS: u64 = 2;
const STREAM_INIT: u64 = 3;
const STREAM_DROPOUT: u64 = 4;
const STREAM_QUERY: u64 = 5;
const STREAM_RETRAIN_INIT: u64 = 6;
const STREAM_RETRAIN_DROPOUT: u64 = 7;

/// Dataset plus the per-dataset quantities every trial reuses.
pub struct PreparedDataset<'a> {
    pub dataset: &'a Dataset,
    pub a_hat: NormalizedAdjacency,
    pub features: SparseMatrix,
    pub centrality: CentralityScores,
}

impl<'a> PreparedDataset<'a> {
    pub fn new(dataset: &'a Dataset, metric: centrality::CentralityMetric) -> Self {
        PreparedDataset {
            dataset,
            a_hat: normalize_adjacency(&dataset.graph),
            features: SparseMatrix::from_dense(&dataset.features),
            centrality: centrality::compute(&dataset.graph, metric),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.dataset.num_classes
    }
}

/// Ground-truth labels standing in for a human annotator.
#[derive(Clone, Copy, Debug)]
pub struct Oracle<'a> {
    labels: &'a [usize],
    split: &'a Split,
}

impl<'a> Oracle<'a> {
    pub fn new(labels: &'a [usize], split: &'a Split) -> Self {
        Oracle { labels, split }
    }

    /// Label of a training-pool node; any other node is refused.
    pub fn label(&self, v: usize) -> Result<usize> {
        match self.split.tag(v) {
            SplitTag::TrainPool => Ok(self.labels[v]),
            tag => Err(AgeError::Usage(format!("oracle asked for {tag} node {v}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub train_loss: f64,
    pub val_loss: Option<f64>,
    /// Micro-F1 on the test nodes after this epoch's update.
    pub test_micro_f1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub macro_f1: f64,
    pub micro_f1: f64,
    /// Queried nodes in query order.
    pub selected_nodes: Vec<usize>,
    pub query_log: Vec<QueryLogEntry>,
    pub epochs: Vec<EpochRecord>,
    pub epochs_run: usize,
    pub test_nodes: Vec<usize>,
    pub test_predictions: Vec<usize>,
    /// Set when training aborted on a numeric failure.
    pub failed: Option<String>,
}

/// `per_class` distinct nodes of every class, drawn uniformly from `pool`.
pub fn sample_initial_labels(
    labels: &[usize],
    num_classes: usize,
    pool: &[usize],
    per_class: usize,
    rng: &mut SeededRng,
) -> Result<Vec<usize>> {
    let mut chosen = Vec::with_capacity(per_class * num_classes);
    for class in 0..num_classes {
        let members: Vec<usize> = pool.iter().copied().filter(|&v| labels[v] == class).collect();
        if members.len() < per_class {
            return Err(AgeError::Config(format!(
                "class {class} has {} training-pool nodes, {per_class} required",
                members.len()
            )));
        }
        chosen.extend(rng.sample(&members, per_class));
    }
    Ok(chosen)
}

struct TrialSetup {
    pool: Vec<usize>,
    validation: Vec<usize>,
    test: Vec<usize>,
    split: Split,
}

fn setup(config: &ExperimentConfig, prep: &PreparedDataset<'_>, root: &SeededRng) -> Result<TrialSetup> {
    let split = prep
        .dataset
        .split
        .with_sampled_validation(config.validation_size, &mut root.derive(STREAM_VALIDATION))?;
    Ok(TrialSetup {
        pool: split.nodes(SplitTag::TrainPool),
        validation: split.nodes(SplitTag::Validation),
        test: split.nodes(SplitTag::Test),
        split,
    })
}

struct Recorder<'a> {
    labels: &'a [usize],
    test: &'a [usize],
    num_classes: usize,
    epochs: Vec<EpochRecord>,
    query_log: Vec<QueryLogEntry>,
    selected: Vec<usize>,
}

impl Recorder<'_> {
    fn test_predictions(&self, cache: &ForwardCache) -> Vec<usize> {
        self.test.iter().map(|&v| cache.z.argmax_row(v)).collect()
    }

    fn truths(&self) -> Vec<usize> {
        self.test.iter().map(|&v| self.labels[v]).collect()
    }

    fn record_selection(&mut self, sel: &Selection) {
        self.selected.extend(&sel.nodes);
        self.query_log.extend(QueryLogEntry::from_selection(sel));
    }
}

/// Trains until `max_epochs`, or until the validation loss has not improved
/// for `early_stop_window` epochs once no queries remain. With `interleave`,
/// a query round follows every epoch while budget remains.
#[allow(clippy::too_many_arguments)]
fn train_loop(
    config: &ExperimentConfig,
    prep: &PreparedDataset<'_>,
    inputs: EpochInputs<'_>,
    model: &mut GcnModel,
    state: &mut QueryState,
    interleave: bool,
    oracle: Oracle<'_>,
    dropout_rng: &mut SeededRng,
    query_rng: &mut SeededRng,
    rec: &mut Recorder<'_>,
) -> Result<ForwardCache> {
    let options = QueryOptions {
        kmeans_k: config.kmeans_k_for(prep.num_classes()),
        density_pool: config.density_pool,
    };
    let truths = rec.truths();
    let mut best_val = f64::INFINITY;
    let mut since_best = 0usize;
    let mut last = None;
    for _ in 0..config.gcn.max_epochs {
        let outcome = train_epoch(model, inputs, state.labeled(), &config.gcn, dropout_rng)?;
        let preds = rec.test_predictions(&outcome.inference);
        let test_micro_f1 = if preds.is_empty() {
            0.0
        } else {
            micro_f1(&preds, &truths, rec.num_classes)?
        };
        rec.epochs.push(EpochRecord {
            train_loss: outcome.train_loss,
            val_loss: outcome.val_loss,
            test_micro_f1,
        });

        let querying = interleave && state.remaining() > 0 && !state.candidates().is_empty();
        if querying {
            let outputs = ModelOutputs {
                z: &outcome.inference.z,
                embeddings: &outcome.inference.h1,
            };
            let sel = select_next(state, outputs, &prep.centrality, query_rng, config.batch_size, &options)?;
            for &v in &sel.nodes {
                oracle.label(v)?;
            }
            rec.record_selection(&sel);
        }

        if let Some(val) = outcome.val_loss {
            if val < best_val {
                best_val = val;
                since_best = 0;
            } else {
                since_best += 1;
            }
        }
        let done_querying = !interleave || state.remaining() == 0 || state.candidates().is_empty();
        last = Some(outcome.inference);
        if done_querying && since_best >= config.gcn.early_stop_window {
            break;
        }
    }
    Ok(last.expect("max_epochs is at least 1"))
}

/// One trial of `config.strategy`; trial `i` uses stream `i` of `config.base_seed`.
pub fn run_trial(config: &ExperimentConfig, prep: &PreparedDataset<'_>, trial: usize) -> Result<TrialResult> {
    let root = SeededRng::new(config.base_seed, trial as u64);
    let ds = prep.dataset;
    let c = ds.num_classes;
    let setup = setup(config, prep, &root)?;
    config.validate(c, setup.pool.len())?;
    let budget = config.budget_for(c);
    let oracle = Oracle::new(&ds.labels, &setup.split);
    let inputs = EpochInputs {
        a_hat: &prep.a_hat,
        features: &prep.features,
        labels: &ds.labels,
        validation: &setup.validation,
    };
    let mut rec = Recorder {
        labels: &ds.labels,
        test: &setup.test,
        num_classes: c,
        epochs: Vec::new(),
        query_log: Vec::new(),
        selected: Vec::new(),
    };

    let mut label_rng = root.derive(STREAM_INITIAL_LABELS);
    let initial_total = config.initial_per_class * c;
    let strategy = config.strategy;
    let initial = match strategy {
        StrategyKind::Random => label_rng.sample(&setup.pool, initial_total + budget),
        StrategyKind::Gcn => {
            let total = initial_total + budget;
            let mut chosen = sample_initial_labels(&ds.labels, c, &setup.pool, total / c, &mut label_rng)?;
            let rest: Vec<usize> = setup.pool.iter().copied().filter(|v| !chosen.contains(v)).collect();
            chosen.extend(label_rng.sample(&rest, total - chosen.len()));
            chosen
        }
        _ => sample_initial_labels(&ds.labels, c, &setup.pool, config.initial_per_class, &mut label_rng)?,
    };
    for &v in &initial {
        oracle.label(v)?;
    }
    let state_budget = if strategy.is_interleaved() || strategy == StrategyKind::Pipeline {
        budget
    } else {
        0
    };
    let mut state = QueryState::new(&setup.pool, &initial, state_budget, strategy)?;

    let mut model = GcnModel::new(ds.n_features(), config.gcn.hidden_dim, c, &mut root.derive(STREAM_INIT));
    let mut dropout_rng = root.derive(STREAM_DROPOUT);
    let mut query_rng = root.derive(STREAM_QUERY);

    let outcome = (|| -> Result<ForwardCache> {
        let interleave = strategy.is_interleaved();
        let mut last = train_loop(
            config,
            prep,
            inputs,
            &mut model,
            &mut state,
            interleave,
            oracle,
            &mut dropout_rng,
            &mut query_rng,
            &mut rec,
        )?;
        if strategy == StrategyKind::Pipeline {
            pipeline_select(config, prep, &last, &mut state, oracle, &mut query_rng, &mut rec)?;
            model = GcnModel::new(
                ds.n_features(),
                config.gcn.hidden_dim,
                c,
                &mut root.derive(STREAM_RETRAIN_INIT),
            );
            last = train_loop(
                config,
                prep,
                inputs,
                &mut model,
                &mut state,
                false,
                oracle,
                &mut root.derive(STREAM_RETRAIN_DROPOUT),
                &mut query_rng,
                &mut rec,
            )?;
        }
        Ok(last)
    })();

    let (macro_f1_v, micro_f1_v, preds, failed) = match outcome {
        Ok(cache) => {
            let preds = rec.test_predictions(&cache);
            let truths = rec.truths();
            (
                macro_f1(&preds, &truths, c)?,
                micro_f1(&preds, &truths, c)?,
                preds,
                None,
            )
        }
        Err(AgeError::Numeric(msg)) => {
            log::warn!("trial {trial} ({strategy}) aborted: {msg}");
            (0.0, 0.0, Vec::new(), Some(msg))
        }
        Err(e) => return Err(e),
    };
    Ok(TrialResult {
        trial,
        seed: config.base_seed,
        macro_f1: macro_f1_v,
        micro_f1: micro_f1_v,
        selected_nodes: rec.selected,
        query_log: rec.query_log,
        epochs_run: rec.epochs.len(),
        epochs: rec.epochs,
        test_nodes: setup.test,
        test_predictions: preds,
        failed,
    })
}

/// Greedy selection of the whole remaining budget from one frozen model,
/// resampling the time weights for `t = 1..=B` without retraining.
fn pipeline_select(
    config: &ExperimentConfig,
    prep: &PreparedDataset<'_>,
    frozen: &ForwardCache,
    state: &mut QueryState,
    oracle: Oracle<'_>,
    rng: &mut SeededRng,
    rec: &mut Recorder<'_>,
) -> Result<()> {
    let options = QueryOptions {
        kmeans_k: config.kmeans_k_for(prep.num_classes()),
        density_pool: config.density_pool,
    };
    let outputs = ModelOutputs {
        z: &frozen.z,
        embeddings: &frozen.h1,
    };
    while state.remaining() > 0 && !state.candidates().is_empty() {
        let sel = select_next(state, outputs, &prep.centrality, rng, 1, &options)?;
        for &v in &sel.nodes {
            oracle.label(v)?;
        }
        rec.record_selection(&sel);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::numerics::DenseMatrix;

    /// Two cliques of six nodes joined by one edge; features reveal the clique.
    fn two_cliques() -> Dataset {
        let n = 12;
        let mut edges = Vec::new();
        for base in [0, 6] {
            for i in 0..6 {
                for j in i + 1..6 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edges.push((5, 6));
        let (graph, stats) = Graph::from_edges(n, &edges).unwrap();
        let mut x = DenseMatrix::zeros(n, 3);
        for v in 0..n {
            x.set(v, if v < 6 { 0 } else { 1 }, 1.0);
            x.set(v, 2, 1.0);
        }
        let labels: Vec<usize> = (0..n).map(|v| usize::from(v >= 6)).collect();
        let mut tags = vec![SplitTag::TrainPool; n];
        for v in [2, 3, 8, 9] {
            tags[v] = SplitTag::Test;
        }
        for v in [4, 10] {
            tags[v] = SplitTag::Validation;
        }
        Dataset::new(graph, x, labels, Split::new(tags), stats).unwrap()
    }

    fn config(strategy: StrategyKind) -> ExperimentConfig {
        ExperimentConfig {
            strategy,
            initial_per_class: 1,
            budget: Some(2),
            trials: 1,
            base_seed: 9,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn initial_labels_are_class_balanced() {
        let ds = two_cliques();
        let pool = ds.split.nodes(SplitTag::TrainPool);
        let mut rng = SeededRng::new(1, 0);
        let init = sample_initial_labels(&ds.labels, 2, &pool, 2, &mut rng).unwrap();
        assert_eq!(init.iter().filter(|&&v| ds.labels[v] == 0).count(), 2);
        assert_eq!(init.len(), 4);
        assert!(sample_initial_labels(&ds.labels, 2, &pool, 0, &mut rng).unwrap().is_empty());
        let err = sample_initial_labels(&ds.labels, 2, &pool, 4, &mut rng).unwrap_err();
        assert!(err.to_string().contains("class 0"));
    }

    #[test]
    fn oracle_refuses_evaluation_nodes() {
        let ds = two_cliques();
        let oracle = Oracle::new(&ds.labels, &ds.split);
        assert_eq!(oracle.label(7).unwrap(), 1);
        assert!(oracle.label(2).is_err());
        assert!(oracle.label(4).is_err());
    }

    #[test]
    fn every_strategy_uses_the_same_label_total() {
        let ds = two_cliques();
        let prep = PreparedDataset::new(&ds, centrality::CentralityMetric::PageRank);
        for s in [
            StrategyKind::Random,
            StrategyKind::Gcn,
            StrategyKind::Entropy,
            StrategyKind::Pipeline,
            StrategyKind::AgeTimeSensitive,
            StrategyKind::AgeFixed { gamma: 0.5 },
        ] {
            let r = run_trial(&config(s), &prep, 0).unwrap();
            assert!(r.failed.is_none());
            let queried = r.selected_nodes.len();
            if matches!(s, StrategyKind::Random | StrategyKind::Gcn) {
                assert_eq!(queried, 0);
            } else {
                assert_eq!(queried, 2, "{s}");
            }
            for &v in &r.selected_nodes {
                assert_eq!(ds.split.tag(v), SplitTag::TrainPool);
            }
            assert!((0.0..=1.0).contains(&r.micro_f1));
            assert_eq!(r.test_predictions.len(), 4);
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let ds = two_cliques();
        let prep = PreparedDataset::new(&ds, centrality::CentralityMetric::PageRank);
        let cfg = config(StrategyKind::AgeTimeSensitive);
        let a = run_trial(&cfg, &prep, 3).unwrap();
        let b = run_trial(&cfg, &prep, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.query_log.len(), 2);
        assert_eq!(a.query_log[0].t, 1);
    }

    #[test]
    fn zero_budget_is_plain_training() {
        let ds = two_cliques();
        let prep = PreparedDataset::new(&ds, centrality::CentralityMetric::PageRank);
        let cfg = ExperimentConfig {
            budget: Some(0),
            ..config(StrategyKind::AgeTimeSensitive)
        };
        let r = run_trial(&cfg, &prep, 0).unwrap();
        assert!(r.selected_nodes.is_empty());
        let pipe = run_trial(
            &ExperimentConfig {
                strategy: StrategyKind::Pipeline,
                ..cfg
            },
            &prep,
            0,
        )
        .unwrap();
        assert!(pipe.selected_nodes.is_empty());
    }

    #[test]
    fn separable_graph_is_learned() {
        let ds = two_cliques();
        let prep = PreparedDataset::new(&ds, centrality::CentralityMetric::PageRank);
        let r = run_trial(&config(StrategyKind::AgeTimeSensitive), &prep, 0).unwrap();
        assert_eq!(r.micro_f1, 1.0);
        let first = r.epochs[0].train_loss;
        let late = r.epochs.iter().skip(40).map(|e| e.train_loss).fold(f64::INFINITY, f64::min);
        assert!(late <= 0.5 * first, "{first} -> {late}");
    }
}
