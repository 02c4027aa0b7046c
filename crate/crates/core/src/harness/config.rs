use crate::active::{DensityPool, StrategyKind};
use crate::centrality::CentralityMetric;
use crate::error::{AgeError, Result};
use crate::gcn::GcnConfig;

/// Everything that determines one experiment besides the dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub strategy: StrategyKind,
    /// Class-balanced labels drawn before training.
    pub initial_per_class: usize,
    /// Oracle queries per trial; `None` means `20·C − initial_per_class·C`.
    pub budget: Option<usize>,
    pub trials: usize,
    pub base_seed: u64,
    /// Nodes labeled per query round.
    pub batch_size: usize,
    pub gcn: GcnConfig,
    /// Validation nodes drawn per trial when the splits file has none.
    pub validation_size: usize,
    pub density_pool: DensityPool,
    /// k-means clusters for density; `None` means the number of classes.
    pub kmeans_k: Option<usize>,
    pub centrality_metric: CentralityMetric,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            strategy: StrategyKind::AgeTimeSensitive,
            initial_per_class: 4,
            budget: None,
            trials: 10,
            base_seed: 0,
            batch_size: 1,
            gcn: GcnConfig::default(),
            validation_size: 500,
            density_pool: DensityPool::Candidates,
            kmeans_k: None,
            centrality_metric: CentralityMetric::PageRank,
        }
    }
}

/// Total labels per class under the default budget.
pub const DEFAULT_LABELS_PER_CLASS: usize = 20;

impl ExperimentConfig {
    pub fn budget_for(&self, num_classes: usize) -> usize {
        self.budget.unwrap_or_else(|| {
            DEFAULT_LABELS_PER_CLASS.saturating_sub(self.initial_per_class) * num_classes
        })
    }

    pub fn kmeans_k_for(&self, num_classes: usize) -> usize {
        self.kmeans_k.unwrap_or(num_classes)
    }

    /// Checks the settings against a dataset with `num_classes` classes and
    /// `pool_size` training-pool nodes (validation already removed).
    pub fn validate(&self, num_classes: usize, pool_size: usize) -> Result<()> {
        self.gcn.validate()?;
        self.strategy.validate()?;
        if self.trials == 0 {
            return Err(AgeError::Config("trials must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(AgeError::Config("batch size must be at least 1".into()));
        }
        if self.kmeans_k == Some(0) {
            return Err(AgeError::Config("k-means needs k ≥ 1".into()));
        }
        let budget = self.budget_for(num_classes);
        let initial = self.initial_per_class * num_classes;
        if initial + budget > pool_size {
            return Err(AgeError::Config(format!(
                "{initial} initial labels plus budget {budget} exceed the {pool_size}-node training pool"
            )));
        }
        if budget > self.gcn.max_epochs * self.batch_size {
            return Err(AgeError::Config(format!(
                "budget {budget} needs more than {} epochs at batch size {}",
                self.gcn.max_epochs, self.batch_size
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_budget_tops_up_to_twenty_per_class() {
        let c = ExperimentConfig::default();
        assert_eq!(c.budget_for(7), 112);
        assert_eq!(c.budget_for(7) + c.initial_per_class * 7, 140);
    }

    #[test]
    fn validation_rules() {
        let c = ExperimentConfig::default();
        assert!(c.validate(7, 1208).is_ok());
        assert!(c.validate(7, 100).is_err());
        let tight = ExperimentConfig {
            budget: Some(300),
            ..ExperimentConfig::default()
        };
        assert!(tight.validate(7, 2000).is_err());
        let batched = ExperimentConfig { batch_size: 2, ..tight };
        assert!(batched.validate(7, 2000).is_ok());
    }
}
