use crate::error::Result;
use crate::gcn::{backward, loss, ForwardCache, ForwardMode, GcnConfig, GcnModel};
use crate::graph::NormalizedAdjacency;
use crate::numerics::{SeededRng, SparseMatrix};

/// Everything an epoch reads besides the model and the labeled set.
#[derive(Clone, Copy)]
pub struct EpochInputs<'a> {
    pub a_hat: &'a NormalizedAdjacency,
    pub features: &'a SparseMatrix,
    pub labels: &'a [usize],
    pub validation: &'a [usize],
}

#[derive(Clone, Debug)]
pub struct EpochOutcome {
    /// Loss of the training (dropout) pass, before the update.
    pub train_loss: f64,
    /// Loss on the validation nodes after the update; `None` without validation nodes.
    pub val_loss: Option<f64>,
    /// Dropout-free pass with the updated weights.
    pub inference: ForwardCache,
}

/// One full-batch step: dropout forward, backward, Adam, then an inference pass.
pub fn train_epoch(
    model: &mut GcnModel,
    inputs: EpochInputs<'_>,
    labeled: &[usize],
    config: &GcnConfig,
    rng: &mut SeededRng,
) -> Result<EpochOutcome> {
    let cache = model.forward(
        inputs.a_hat,
        inputs.features,
        ForwardMode::Training {
            dropout_rate: config.dropout_rate,
            rng,
        },
    )?;
    let train_loss = loss(&cache, inputs.labels, labeled, model, config.weight_decay)?;
    let grads = backward(
        model,
        &cache,
        inputs.a_hat,
        inputs.features,
        inputs.labels,
        labeled,
        config.weight_decay,
    )?;
    model.adam_step(&grads, config)?;

    let inference = model.forward(inputs.a_hat, inputs.features, ForwardMode::Inference)?;
    let val_loss = if inputs.validation.is_empty() {
        None
    } else {
        Some(loss(
            &inference,
            inputs.labels,
            inputs.validation,
            model,
            config.weight_decay,
        )?)
    };
    Ok(EpochOutcome {
        train_loss,
        val_loss,
        inference,
    })
}
