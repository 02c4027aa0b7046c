//! Result files: per-trial CSV, query logs, prediction files and an SVG plot.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use crate::error::{AgeError, Result};
use crate::harness::{ExperimentReport, TrialResult};

pub const CSV_HEADER: &str = "strategy,trial,macro_f1,micro_f1,epochs,seed";

fn fmt_f1(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        "nan".to_string()
    }
}

/// One row per trial, then `MEAN` and `STD` rows, for each report in order.
pub fn write_csv(reports: &[ExperimentReport], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        for t in &r.trials {
            let (macro_f1, micro_f1) = match t.failed {
                None => (fmt_f1(t.macro_f1), fmt_f1(t.micro_f1)),
                Some(_) => ("nan".into(), "nan".into()),
            };
            writeln!(
                out,
                "{},{},{macro_f1},{micro_f1},{},{}",
                r.strategy, t.trial, t.epochs_run, t.seed
            )?;
        }
        let s = &r.summary;
        writeln!(
            out,
            "{},MEAN,{},{},{:.1},{}",
            r.strategy,
            fmt_f1(s.mean_macro_f1),
            fmt_f1(s.mean_micro_f1),
            s.mean_epochs,
            r.base_seed
        )?;
        writeln!(
            out,
            "{},STD,{},{},{:.1},{}",
            r.strategy,
            fmt_f1(s.std_macro_f1),
            fmt_f1(s.std_micro_f1),
            s.std_epochs,
            r.base_seed
        )?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>> {
    fs::File::create(path)
        .map(io::BufWriter::new)
        .map_err(|e| AgeError::io(path, e))
}

fn file_stem(report: &ExperimentReport, trial: &TrialResult) -> String {
    let name = report.strategy.to_string().replace(':', "_");
    format!("{name}_trial{:03}", trial.trial)
}

/// Writes `<strategy>_trialNNN.log` per trial into `dir`; returns the paths.
pub fn write_query_logs(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| AgeError::io(dir, e))?;
    let mut paths = Vec::with_capacity(report.trials.len());
    for t in &report.trials {
        let path = dir.join(format!("{}.log", file_stem(report, t)));
        let mut w = create(&path)?;
        for entry in &t.query_log {
            writeln!(w, "{entry}").map_err(|e| AgeError::io(&path, e))?;
        }
        w.flush().map_err(|e| AgeError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Writes `node<TAB>predicted<TAB>truth` per test node for every completed trial.
pub fn write_predictions(report: &ExperimentReport, labels: &[usize], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| AgeError::io(dir, e))?;
    let mut paths = Vec::new();
    for t in report.trials.iter().filter(|t| t.failed.is_none()) {
        let path = dir.join(format!("{}.tsv", file_stem(report, t)));
        let mut w = create(&path)?;
        let mut write = || -> io::Result<()> {
            writeln!(w, "# node\tpredicted\ttruth")?;
            for (&v, &p) in t.test_nodes.iter().zip(&t.test_predictions) {
                writeln!(w, "{v}\t{p}\t{}", labels[v])?;
            }
            w.flush()
        };
        write().map_err(|e| AgeError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Parses a prediction file into `(predicted, truth)` columns.
pub fn read_predictions(path: &Path) -> Result<(Vec<usize>, Vec<usize>)> {
    let file = fs::File::open(path).map_err(|e| AgeError::io(path, e))?;
    let (mut preds, mut truths) = (Vec::new(), Vec::new());
    for (i, line) in io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| AgeError::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| AgeError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected 3 fields, found {}", fields.len())));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| parse_err(format!("bad integer '{s}'")));
        num(fields[0])?;
        preds.push(num(fields[1])?);
        truths.push(num(fields[2])?);
    }
    Ok((preds, truths))
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Mean test micro-F1 per epoch; each epoch averages the trials that reached it.
pub fn mean_curve(report: &ExperimentReport) -> Vec<f64> {
    let ok: Vec<&TrialResult> = report.trials.iter().filter(|t| t.failed.is_none()).collect();
    let len = ok.iter().map(|t| t.epochs.len()).max().unwrap_or(0);
    (0..len)
        .map(|e| {
            let vals: Vec<f64> = ok.iter().filter_map(|t| t.epochs.get(e)).map(|r| r.test_micro_f1).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        })
        .collect()
}

/// Self-contained SVG with one mean test-F1 curve per report.
pub fn render_svg(reports: &[ExperimentReport]) -> String {
    let (w, h) = (720.0, 420.0);
    let (left, right, top, bottom) = (60.0, 180.0, 20.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let curves: Vec<Vec<f64>> = reports.iter().map(mean_curve).collect();
    let max_epochs = curves.iter().map(Vec::len).max().unwrap_or(1).max(2);
    let x = |e: usize| left + pw * e as f64 / (max_epochs - 1) as f64;
    let y = |v: f64| top + ph * (1.0 - v.clamp(0.0, 1.0));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{y0:.1}" x2="{x1:.1}" y2="{y0:.1}" stroke="#ddd"/><text x="{tx:.1}" y="{ty:.1}" text-anchor="end">{v:.1}</text>"##,
            y0 = y(v),
            x1 = left + pw,
            tx = left - 6.0,
            ty = y(v) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">epoch</text>"#,
        left + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">test micro-F1</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (k, (report, curve)) in reports.iter().zip(&curves).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = curve
            .iter()
            .enumerate()
            .map(|(e, &v)| format!("{:.1},{:.1}", x(e), y(v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 16.0 * (k as f64 + 1.0);
        let lx = left + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            report.strategy
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::active::StrategyKind;
    use crate::harness::{summarize, EpochRecord};

    fn report() -> ExperimentReport {
        let trials: Vec<TrialResult> = (0..2)
            .map(|i| TrialResult {
                trial: i,
                seed: 5,
                macro_f1: 0.5 + 0.1 * i as f64,
                micro_f1: 0.6,
                selected_nodes: vec![],
                query_log: vec![],
                epochs: (0..3 + i)
                    .map(|e| EpochRecord {
                        train_loss: 1.0,
                        val_loss: None,
                        test_micro_f1: 0.2 * e as f64,
                    })
                    .collect(),
                epochs_run: 3 + i,
                test_nodes: vec![0, 1],
                test_predictions: vec![1, 1],
                failed: None,
            })
            .collect();
        ExperimentReport {
            strategy: StrategyKind::AgeFixed { gamma: 0.5 },
            base_seed: 5,
            summary: summarize(&trials),
            trials,
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&[report()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "age_fixed:0.5,0,0.500000,0.600000,3,5");
        assert_eq!(lines[3], "age_fixed:0.5,MEAN,0.550000,0.600000,3.5,5");
        assert!(lines[4].starts_with("age_fixed:0.5,STD,0.070711,0.000000,"));
    }

    #[test]
    fn prediction_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_predictions(&report(), &[0, 1], dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        let (p, t) = read_predictions(&paths[0]).unwrap();
        assert_eq!(p, vec![1, 1]);
        assert_eq!(t, vec![0, 1]);
    }

    #[test]
    fn mean_curve_handles_ragged_trials() {
        let c = mean_curve(&report());
        assert_eq!(c.len(), 4);
        assert!((c[3] - 0.6).abs() < 1e-12);
        let svg = render_svg(&[report()]);
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    }
}
