//! `age`: run active-learning experiments, inspect centralities, re-score predictions.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use age_core::active::{DensityPool, StrategyKind};
use age_core::centrality::{self, CentralityMetric};
use age_core::graph::{load_dataset, load_graph, DatasetPaths, LoadOptions};
use age_core::harness::{self, report, ExperimentConfig, ExperimentReport, PreparedDataset};
use age_core::GcnConfig;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "age", version, about = "Active graph embedding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate one or more query strategies over repeated trials.
    Run(RunArgs),
    /// Print one centrality score per node.
    Centrality(CentralityArgs),
    /// Re-score a saved prediction file.
    Eval(EvalArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Directory holding edges.tsv, features.tsv, labels.tsv and splits.tsv.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    splits: Option<PathBuf>,
}

impl DataArgs {
    fn paths(&self) -> Result<DatasetPaths> {
        let base = self.data_dir.as_ref().map(DatasetPaths::in_dir);
        let pick = |given: &Option<PathBuf>, fallback: Option<&PathBuf>, name: &str| -> Result<PathBuf> {
            given
                .clone()
                .or_else(|| fallback.cloned())
                .with_context(|| format!("--{name} is required without --data-dir"))
        };
        Ok(DatasetPaths {
            edges: pick(&self.edges, base.as_ref().map(|b| &b.edges), "edges")?,
            features: pick(&self.features, base.as_ref().map(|b| &b.features), "features")?,
            labels: pick(&self.labels, base.as_ref().map(|b| &b.labels), "labels")?,
            splits: pick(&self.splits, base.as_ref().map(|b| &b.splits), "splits")?,
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated strategies: random, gcn, entropy, density,
    /// entropy_density, centrality, pipeline, age_fixed[:γ], age_time_sensitive.
    #[arg(long, default_value = "age_time_sensitive")]
    strategy: String,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Oracle queries per trial [default: 20·C − per_class·C].
    #[arg(long)]
    budget: Option<usize>,
    /// Initial labels per class.
    #[arg(long, default_value_t = 4)]
    per_class: usize,
    #[arg(long, default_value_t = 1)]
    batch_size: usize,
    /// γ for a bare `age_fixed` strategy.
    #[arg(long)]
    gamma: Option<f64>,
    /// Nodes k-means clusters for the density score.
    #[arg(long, default_value = "candidates", value_parser = parse_density_pool)]
    density_pool: DensityPool,
    #[arg(long, default_value = "pagerank")]
    centrality_metric: CentralityMetric,
    /// k-means clusters [default: number of classes].
    #[arg(long)]
    kmeans_k: Option<usize>,
    /// Validation nodes drawn per trial when the splits file has none.
    #[arg(long, default_value_t = 500)]
    validation_size: usize,
    /// Keep raw feature values instead of dividing each row by its sum.
    #[arg(long)]
    no_row_normalize: bool,
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    #[arg(long, default_value_t = 0.5)]
    dropout: f64,
    #[arg(long, default_value_t = 5e-4)]
    weight_decay: f64,
    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,
    #[arg(long, default_value_t = 200)]
    max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    #[arg(long, default_value_t = 10)]
    patience: usize,
    /// Per-trial results CSV (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG of mean test micro-F1 per epoch.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Directory for per-trial query logs.
    #[arg(long)]
    query_log_dir: Option<PathBuf>,
    /// Directory for per-trial test predictions, readable by `age eval`.
    #[arg(long)]
    predictions_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CentralityArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value = "pagerank")]
    metric: CentralityMetric,
    /// Node count [default: largest id in the edges file + 1].
    #[arg(long)]
    nodes: Option<usize>,
    /// PageRank damping.
    #[arg(long, default_value_t = centrality::PAGERANK_DEFAULT_DAMPING)]
    damping: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// File of `node<TAB>predicted<TAB>truth` lines.
    predictions: PathBuf,
    /// Class count [default: largest class id + 1].
    #[arg(long)]
    classes: Option<usize>,
}

fn parse_density_pool(s: &str) -> Result<DensityPool, String> {
    s.parse()
}

fn parse_strategies(list: &str, gamma: Option<f64>) -> Result<Vec<StrategyKind>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match (s, gamma) {
            ("age_fixed", Some(g)) => Ok(StrategyKind::AgeFixed { gamma: g }),
            _ => s.parse::<StrategyKind>().map_err(anyhow::Error::msg),
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|v| {
            if v.is_empty() {
                bail!("no strategy given")
            }
            Ok(v)
        })
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(args: RunArgs) -> Result<()> {
    let strategies = parse_strategies(&args.strategy, args.gamma)?;
    let paths = args.data.paths()?;
    let dataset = load_dataset(
        &paths,
        LoadOptions {
            row_normalize: !args.no_row_normalize,
        },
    )?;
    log::info!(
        "loaded {} nodes, {} edges, {} features, {} classes",
        dataset.n_nodes(),
        dataset.graph.n_edges(),
        dataset.n_features(),
        dataset.num_classes
    );
    let prep = PreparedDataset::new(&dataset, args.centrality_metric);
    let gcn = GcnConfig {
        hidden_dim: args.hidden,
        dropout_rate: args.dropout,
        weight_decay: args.weight_decay,
        learning_rate: args.learning_rate,
        max_epochs: args.max_epochs,
        early_stop_window: args.patience,
    };

    let mut reports: Vec<ExperimentReport> = Vec::new();
    for strategy in strategies {
        let config = ExperimentConfig {
            strategy,
            initial_per_class: args.per_class,
            budget: args.budget,
            trials: args.trials,
            base_seed: args.seed,
            batch_size: args.batch_size,
            gcn: gcn.clone(),
            validation_size: args.validation_size,
            density_pool: args.density_pool,
            kmeans_k: args.kmeans_k,
            centrality_metric: args.centrality_metric,
        };
        let started = Instant::now();
        let report = harness::run_experiment(&config, &prep)?;
        let s = &report.summary;
        eprintln!(
            "{strategy}: macro-F1 {:.4} ± {:.4}, micro-F1 {:.4} ± {:.4} over {} trials ({:.1}s)",
            s.mean_macro_f1,
            s.std_macro_f1,
            s.mean_micro_f1,
            s.std_micro_f1,
            s.completed,
            started.elapsed().as_secs_f64()
        );
        if s.failed > 0 {
            eprintln!("{strategy}: {} trial(s) failed", s.failed);
        }
        if let Some(dir) = &args.query_log_dir {
            report::write_query_logs(&report, dir)?;
        }
        if let Some(dir) = &args.predictions_dir {
            report::write_predictions(&report, &dataset.labels, dir)?;
        }
        reports.push(report);
    }

    let mut out = output(args.out.as_deref())?;
    report::write_csv(&reports, &mut out)?;
    out.flush()?;
    if let Some(plot) = &args.plot {
        fs::write(plot, report::render_svg(&reports)).with_context(|| format!("writing {}", plot.display()))?;
    }
    Ok(())
}

fn centrality_cmd(args: CentralityArgs) -> Result<()> {
    let (graph, _) = load_graph(&args.edges, args.nodes)?;
    let scores = match args.metric {
        CentralityMetric::PageRank => centrality::pagerank(
            &graph,
            args.damping,
            centrality::PAGERANK_DEFAULT_TOL,
            centrality::PAGERANK_DEFAULT_MAX_ITER,
        )?,
        m => centrality::compute(&graph, m),
    };
    if !scores.converged {
        eprintln!("warning: PageRank did not converge");
    }
    let mut out = output(args.out.as_deref())?;
    for (v, s) in scores.scores.iter().enumerate() {
        writeln!(out, "{v}\t{s:.12}")?;
    }
    out.flush()?;
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let (preds, truths) = report::read_predictions(&args.predictions)?;
    let classes = args
        .classes
        .unwrap_or_else(|| preds.iter().chain(&truths).max().map_or(0, |&m| m + 1));
    let macro_f1 = harness::macro_f1(&preds, &truths, classes)?;
    let micro_f1 = harness::micro_f1(&preds, &truths, classes)?;
    println!("nodes\t{}", preds.len());
    println!("macro_f1\t{macro_f1:.6}");
    println!("micro_f1\t{micro_f1:.6}");
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Centrality(args) => centrality_cmd(args),
        Command::Eval(args) => eval(args),
    }
}
