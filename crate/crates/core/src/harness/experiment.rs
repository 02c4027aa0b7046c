use rayon::prelude::*;

use crate::active::StrategyKind;
use crate::error::{AgeError, Result};
use crate::harness::{run_trial, ExperimentConfig, PreparedDataset, TrialResult};

/// Mean and sample standard deviation over the completed trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean_macro_f1: f64,
    pub std_macro_f1: f64,
    pub mean_micro_f1: f64,
    pub std_micro_f1: f64,
    pub mean_epochs: f64,
    pub std_epochs: f64,
    pub completed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub strategy: StrategyKind,
    pub base_seed: u64,
    /// Ordered by trial index.
    pub trials: Vec<TrialResult>,
    pub summary: Summary,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

pub fn summarize(trials: &[TrialResult]) -> Summary {
    let ok: Vec<&TrialResult> = trials.iter().filter(|t| t.failed.is_none()).collect();
    let pick = |f: fn(&TrialResult) -> f64| mean_std(&ok.iter().map(|t| f(t)).collect::<Vec<_>>());
    let (mean_macro_f1, std_macro_f1) = pick(|t| t.macro_f1);
    let (mean_micro_f1, std_micro_f1) = pick(|t| t.micro_f1);
    let (mean_epochs, std_epochs) = pick(|t| t.epochs_run as f64);
    Summary {
        mean_macro_f1,
        std_macro_f1,
        mean_micro_f1,
        std_micro_f1,
        mean_epochs,
        std_epochs,
        completed: ok.len(),
        failed: trials.len() - ok.len(),
    }
}

/// Runs `config.trials` independent trials in parallel; the report does not
/// depend on completion order.
pub fn run_experiment(config: &ExperimentConfig, prep: &PreparedDataset<'_>) -> Result<ExperimentReport> {
    if config.trials == 0 {
        return Err(AgeError::Config("trials must be at least 1".into()));
    }
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, prep, i))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&trials);
    if summary.failed > 0 {
        log::warn!(
            "{}: {} of {} trials failed and are excluded from the means",
            config.strategy,
            summary.failed,
            trials.len()
        );
    }
    Ok(ExperimentReport {
        strategy: config.strategy,
        base_seed: config.base_seed,
        trials,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(i: usize, macro_f1: f64, micro_f1: f64, failed: bool) -> TrialResult {
        TrialResult {
            trial: i,
            seed: 0,
            macro_f1,
            micro_f1,
            selected_nodes: vec![],
            query_log: vec![],
            epochs: vec![],
            epochs_run: 10,
            test_nodes: vec![],
            test_predictions: vec![],
            failed: failed.then(|| "nan".to_string()),
        }
    }

    #[test]
    fn single_trial_summary_is_the_trial() {
        let s = summarize(&[trial(0, 0.7, 0.8, false)]);
        assert_eq!((s.mean_macro_f1, s.mean_micro_f1), (0.7, 0.8));
        assert_eq!(s.std_micro_f1, 0.0);
    }

    #[test]
    fn failed_trials_are_excluded() {
        let s = summarize(&[trial(0, 0.5, 0.5, false), trial(1, 0.0, 0.0, true), trial(2, 1.0, 1.0, false)]);
        assert_eq!(s.completed, 2);
        assert_eq!(s.failed, 1);
        assert_eq!(s.mean_micro_f1, 0.75);
        assert!((s.std_micro_f1 - 0.125f64.sqrt()).abs() < 1e-12);
    }
}
