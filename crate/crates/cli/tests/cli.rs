use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use age_core::graph::{write_dataset, DatasetPaths, EdgeStats, Split};
use age_core::{Dataset, DenseMatrix, Graph, SplitTag};

fn age(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_age")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Two 8-node cliques joined by one edge, features marking the clique.
fn write_toy(dir: &Path) {
    let n = 16;
    let mut edges = vec![(7, 8)];
    for base in [0, 8] {
        for i in 0..8 {
            for j in i + 1..8 {
                edges.push((base + i, base + j));
            }
        }
    }
    let (graph, _) = Graph::from_edges(n, &edges).unwrap();
    let mut x = DenseMatrix::zeros(n, 3);
    for v in 0..n {
        x.set(v, usize::from(v >= 8), 1.0);
        x.set(v, 2, 0.5);
    }
    let labels = (0..n).map(|v| usize::from(v >= 8)).collect();
    let tags = (0..n)
        .map(|v| match v % 8 {
            0 | 1 => SplitTag::Test,
            2 => SplitTag::Validation,
            _ => SplitTag::TrainPool,
        })
        .collect();
    let ds = Dataset::new(graph, x, labels, Split::new(tags), EdgeStats::default()).unwrap();
    write_dataset(&ds, &DatasetPaths::in_dir(dir)).unwrap();
}

#[test]
fn centrality_prints_one_line_per_node() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("e.tsv");
    fs::write(&edges, "0\t1\n1\t2\n").unwrap();
    let o = age(&["centrality", "--edges", edges.to_str().unwrap(), "--metric", "betweenness"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "0\t0.000000000000\n1\t1.000000000000\n2\t0.000000000000\n");

    let o = age(&["centrality", "--edges", edges.to_str().unwrap(), "--nodes", "4"]);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 4);
    let total: f64 = lines.iter().map(|l| l.split('\t').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn eval_scores_a_prediction_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.tsv");
    fs::write(&path, "# node\tpredicted\ttruth\n0\t0\t0\n1\t1\t0\n2\t1\t1\n3\t1\t1\n").unwrap();
    let o = age(&["eval", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "nodes\t4\nmacro_f1\t0.733333\nmicro_f1\t0.750000\n");
}

#[test]
fn run_writes_results_logs_and_predictions() {
    let dir = tempfile::tempdir().unwrap();
    write_toy(dir.path());
    let d = dir.path();
    let csv = d.join("r.csv");
    let o = age(&[
        "run",
        "--data-dir",
        d.to_str().unwrap(),
        "--strategy",
        "age_time_sensitive,random,pipeline",
        "--trials",
        "2",
        "--per-class",
        "1",
        "--budget",
        "3",
        "--validation-size",
        "0",
        "--out",
        csv.to_str().unwrap(),
        "--plot",
        d.join("c.svg").to_str().unwrap(),
        "--query-log-dir",
        d.join("logs").to_str().unwrap(),
        "--predictions-dir",
        d.join("preds").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "strategy,trial,macro_f1,micro_f1,epochs,seed");
    assert_eq!(lines.len(), 1 + 3 * 4);
    assert!(lines[3].starts_with("age_time_sensitive,MEAN,"));
    assert!(lines[12].starts_with("pipeline,STD,"));

    let log = fs::read_to_string(d.join("logs/age_time_sensitive_trial000.log")).unwrap();
    let rows: Vec<Vec<&str>> = log.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.len() == 6));
    assert_eq!(rows[0][0], "1");
    assert!(fs::read_to_string(d.join("logs/random_trial001.log")).unwrap().is_empty());
    assert!(fs::read_to_string(d.join("c.svg")).unwrap().contains("<polyline"));

    let pred = d.join("preds/pipeline_trial000.tsv");
    let o = age(&["eval", pred.to_str().unwrap(), "--classes", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("nodes\t4\n"));
}

#[test]
fn bad_inputs_fail_with_a_message() {
    let o = age(&["run", "--data-dir", "/nonexistent", "--strategy", "bogus"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unknown strategy 'bogus'"));

    let o = age(&["run", "--data-dir", "/nonexistent"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("/nonexistent"));

    let dir = tempfile::tempdir().unwrap();
    write_toy(dir.path());
    let o = age(&["run", "--data-dir", dir.path().to_str().unwrap(), "--trials", "1", "--per-class", "1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("exceed"), "{}", stderr(&o));
}
