//! Tab-separated dataset files.
//!
//! * edges: `u<TAB>v` per line, 0-based ids, `#` starts a comment line.
//! * features: header `N<TAB>F`, then `node<TAB>feature<TAB>value` triplets.
//! * labels: `node<TAB>class_id` for every node.
//! * splits: `node<TAB>tag`, tag one of `train_pool`, `validation`, `test`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{AgeError, Result};
use crate::graph::{row_normalize, Dataset, EdgeStats, Graph, Split, SplitTag};
use crate::numerics::DenseMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetPaths {
    pub edges: PathBuf,
    pub features: PathBuf,
    pub labels: PathBuf,
    pub splits: PathBuf,
}

impl DatasetPaths {
    /// `edges.tsv`, `features.tsv`, `labels.tsv`, `splits.tsv` inside `dir`.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        DatasetPaths {
            edges: dir.join("edges.tsv"),
            features: dir.join("features.tsv"),
            labels: dir.join("labels.tsv"),
            splits: dir.join("splits.tsv"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    /// Divide each feature row by its sum.
    pub row_normalize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { row_normalize: true }
    }
}

struct Lines {
    path: PathBuf,
    reader: BufReader<File>,
    line_no: usize,
    buf: String,
}

impl Lines {
    fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| AgeError::io(path, e))?;
        Ok(Lines {
            path: path.to_path_buf(),
            reader: BufReader::new(file),
            line_no: 0,
            buf: String::new(),
        })
    }

    /// Next non-blank, non-comment line split on tabs.
    fn next_fields(&mut self) -> Result<Option<Vec<String>>> {
        loop {
            self.buf.clear();
            let read = self
                .reader
                .read_line(&mut self.buf)
                .map_err(|e| AgeError::io(&self.path, e))?;
            if read == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let line = self.buf.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Ok(Some(line.split('\t').map(|f| f.trim().to_owned()).collect()));
        }
    }

    fn error(&self, msg: impl Into<String>) -> AgeError {
        AgeError::Parse {
            path: self.path.clone(),
            line: self.line_no,
            msg: msg.into(),
        }
    }

    fn parse<T: std::str::FromStr>(&self, field: &str, what: &str) -> Result<T> {
        field
            .parse()
            .map_err(|_| self.error(format!("cannot parse {what} from '{field}'")))
    }

    fn expect_arity(&self, fields: &[String], n: usize) -> Result<()> {
        if fields.len() != n {
            return Err(self.error(format!("expected {n} tab-separated fields, found {}", fields.len())));
        }
        Ok(())
    }
}

fn read_features(path: &Path) -> Result<DenseMatrix> {
    let mut lines = Lines::open(path)?;
    let header = lines
        .next_fields()?
        .ok_or_else(|| lines.error("missing 'N<TAB>F' header"))?;
    lines.expect_arity(&header, 2)?;
    let n: usize = lines.parse(&header[0], "node count")?;
    let f: usize = lines.parse(&header[1], "feature count")?;
    let mut features = DenseMatrix::zeros(n, f);
    while let Some(fields) = lines.next_fields()? {
        lines.expect_arity(&fields, 3)?;
        let node: usize = lines.parse(&fields[0], "node id")?;
        let idx: usize = lines.parse(&fields[1], "feature index")?;
        let value: f64 = lines.parse(&fields[2], "feature value")?;
        if node >= n || idx >= f {
            return Err(AgeError::Validation(format!(
                "{}:{}: feature entry ({node}, {idx}) outside {n}x{f}",
                path.display(),
                lines.line_no
            )));
        }
        if !value.is_finite() {
            return Err(lines.error("non-finite feature value"));
        }
        features.set(node, idx, value);
    }
    Ok(features)
}

fn read_edges(path: &Path, n: usize) -> Result<Vec<(usize, usize)>> {
    let mut lines = Lines::open(path)?;
    let mut edges = Vec::new();
    while let Some(fields) = lines.next_fields()? {
        lines.expect_arity(&fields, 2)?;
        let u: usize = lines.parse(&fields[0], "node id")?;
        let v: usize = lines.parse(&fields[1], "node id")?;
        if u >= n || v >= n {
            return Err(AgeError::Validation(format!(
                "{}:{}: edge ({u}, {v}) references a node outside [0, {n})",
                path.display(),
                lines.line_no
            )));
        }
        edges.push((u, v));
    }
    Ok(edges)
}

/// Reads an edges file on its own. Without `n_nodes` the graph has
/// `max id + 1` nodes.
pub fn load_graph(path: &Path, n_nodes: Option<usize>) -> Result<(Graph, EdgeStats)> {
    let edges = read_edges(path, n_nodes.unwrap_or(usize::MAX))?;
    let n = n_nodes.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Graph::from_edges(n, &edges)
}

fn read_node_table<T>(path: &Path, n: usize, what: &str, parse: impl Fn(&Lines, &str) -> Result<T>) -> Result<Vec<T>> {
    let mut lines = Lines::open(path)?;
    let mut values: Vec<Option<T>> = (0..n).map(|_| None).collect();
    while let Some(fields) = lines.next_fields()? {
        lines.expect_arity(&fields, 2)?;
        let node: usize = lines.parse(&fields[0], "node id")?;
        if node >= n {
            return Err(AgeError::Validation(format!(
                "{}:{}: node {node} outside [0, {n})",
                path.display(),
                lines.line_no
            )));
        }
        if values[node].is_some() {
            return Err(lines.error(format!("node {node} listed twice")));
        }
        values[node] = Some(parse(&lines, &fields[1])?);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(node, v)| {
            v.ok_or_else(|| AgeError::Validation(format!("node {node} has no {what} in {}", path.display())))
        })
        .collect()
}

/// Reads and validates the four dataset files.
pub fn load_dataset(paths: &DatasetPaths, options: LoadOptions) -> Result<Dataset> {
    let mut features = read_features(&paths.features)?;
    let n = features.rows();
    if options.row_normalize {
        row_normalize(&mut features);
    }
    let edges = read_edges(&paths.edges, n)?;
    let (graph, stats) = Graph::from_edges(n, &edges)?;
    if stats.self_loops_dropped > 0 {
        log::warn!(
            "{}: dropped {} self-loop(s)",
            paths.edges.display(),
            stats.self_loops_dropped
        );
    }
    let labels = read_node_table(&paths.labels, n, "label", |l, f| l.parse(f, "class id"))?;
    let tags = read_node_table(&paths.splits, n, "split tag", |l, f| {
        f.parse::<SplitTag>().map_err(|e| l.error(e))
    })?;
    Dataset::new(graph, features, labels, Split::new(tags), stats)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AgeError::io(path, e))
}

/// Writes `dataset` in the format read by [`load_dataset`]. Feature values
/// use shortest round-trip formatting, so reloading without normalization
/// reproduces the dataset exactly.
pub fn write_dataset(dataset: &Dataset, paths: &DatasetPaths) -> Result<()> {

    let mut w = create(&paths.edges)?;
    for (u, v) in dataset.graph.edges() {
        writeln!(w, "{u}\t{v}").map_err(|e| AgeError::io(&paths.edges, e))?;
    }
    w.flush().map_err(|e| AgeError::io(&paths.edges, e))?;

    let mut w = create(&paths.features)?;
    writeln!(w, "{}\t{}", dataset.n_nodes(), dataset.n_features()).map_err(|e| AgeError::io(&paths.features, e))?;
    for i in 0..dataset.n_nodes() {
        for (j, &v) in dataset.features.row(i).iter().enumerate() {
            if v != 0.0 {
                writeln!(w, "{i}\t{j}\t{v}").map_err(|e| AgeError::io(&paths.features, e))?;
            }
        }
    }
    w.flush().map_err(|e| AgeError::io(&paths.features, e))?;

    let mut w = create(&paths.labels)?;
    for (i, c) in dataset.labels.iter().enumerate() {
        writeln!(w, "{i}\t{c}").map_err(|e| AgeError::io(&paths.labels, e))?;
    }
    w.flush().map_err(|e| AgeError::io(&paths.labels, e))?;

    let mut w = create(&paths.splits)?;
    for (i, t) in dataset.split.tags().iter().enumerate() {
        writeln!(w, "{i}\t{t}").map_err(|e| AgeError::io(&paths.splits, e))?;
    }
    w.flush().map_err(|e| AgeError::io(&paths.splits, e))?;
    Ok(())
}
