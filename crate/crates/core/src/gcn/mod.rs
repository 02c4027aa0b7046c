//! Two-layer graph convolutional network.
//!
//! ```text
//! H1 = ReLU(Â · drop(X) · W0)
//! Z  = softmax(Â · drop(H1) · W1)
//! L  = -Σ_{l ∈ labeled} ln Z[l, y_l] + λ/2 · ‖W0‖²
//! ```
//!
//! `drop` is inverted dropout, active only in training passes. Gradients are
//! derived by hand; see [`backward`].

mod adam;
mod checkpoint;
mod train;

pub use adam::{AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use train::{train_epoch, EpochInputs, EpochOutcome};

use crate::error::{AgeError, Result};
use crate::graph::NormalizedAdjacency;
use crate::numerics::{glorot_init, softmax_rows, DenseMatrix, SeededRng, SparseMatrix};

/// Floor applied to probabilities inside logarithms.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct GcnConfig {
    pub hidden_dim: usize,
    pub dropout_rate: f64,
    /// L2 penalty on the first-layer weights.
    pub weight_decay: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub early_stop_window: usize,
}

impl Default for GcnConfig {
    fn default() -> Self {
        GcnConfig {
            hidden_dim: 16,
            dropout_rate: 0.5,
            weight_decay: 5e-4,
            learning_rate: 0.01,
            max_epochs: 200,
            early_stop_window: 10,
        }
    }
}

impl GcnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_dim == 0 || self.max_epochs == 0 || self.early_stop_window == 0 {
            return Err(AgeError::Config(
                "hidden_dim, max_epochs and early_stop_window must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(AgeError::Config(format!(
                "dropout rate {} outside [0, 1)",
                self.dropout_rate
            )));
        }
        if !(self.learning_rate > 0.0) || !(self.weight_decay >= 0.0) {
            return Err(AgeError::Config(
                "learning rate must be positive and weight decay non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GcnModel {
    w0: DenseMatrix,
    w1: DenseMatrix,
    adam: AdamState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub w0: DenseMatrix,
    pub w1: DenseMatrix,
}

impl Gradients {
    pub fn is_finite(&self) -> bool {
        self.w0.is_finite() && self.w1.is_finite()
    }
}

pub enum ForwardMode<'r> {
    Inference,
    Training { dropout_rate: f64, rng: &'r mut SeededRng },
}

/// Activations kept from a forward pass for scoring and for [`backward`].
#[derive(Clone, Debug)]
pub struct ForwardCache {
    /// Post-ReLU hidden activations, before hidden dropout.
    pub h1: DenseMatrix,
    /// Row-wise class probabilities.
    pub z: DenseMatrix,
    h1_dropped: DenseMatrix,
    /// Per-stored-entry scale applied to X (0 or 1/(1-p)); `None` without dropout.
    input_scale: Option<Vec<f64>>,
    /// Per-entry scale applied to H1; `None` without dropout.
    hidden_scale: Option<Vec<f64>>,
}

impl ForwardCache {
    pub fn is_training(&self) -> bool {
        self.input_scale.is_some()
    }
}

impl GcnModel {
    /// Glorot-initialized weights with fresh optimizer state.
    pub fn new(n_features: usize, hidden_dim: usize, n_classes: usize, rng: &mut SeededRng) -> Self {
        let w0 = glorot_init(rng, n_features, hidden_dim);
        let w1 = glorot_init(rng, hidden_dim, n_classes);
        let adam = AdamState::new(&w0, &w1);
        GcnModel { w0, w1, adam }
    }

    pub fn from_weights(w0: DenseMatrix, w1: DenseMatrix) -> Result<Self> {
        if w0.cols() != w1.rows() {
            return Err(AgeError::shape("from_weights", w0.shape(), w1.shape()));
        }
        let adam = AdamState::new(&w0, &w1);
        Ok(GcnModel { w0, w1, adam })
    }

    pub fn w0(&self) -> &DenseMatrix {
        &self.w0
    }

    pub fn w1(&self) -> &DenseMatrix {
        &self.w1
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    pub fn n_features(&self) -> usize {
        self.w0.rows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w0.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.w1.cols()
    }

    pub fn forward(&self, a_hat: &NormalizedAdjacency, x: &SparseMatrix, mode: ForwardMode<'_>) -> Result<ForwardCache> {
        let a = a_hat.matrix();
        if x.cols() != self.w0.rows() {
            return Err(AgeError::shape("forward (X·W0)", x.shape(), self.w0.shape()));
        }
        if a.cols() != x.rows() {
            return Err(AgeError::shape("forward (Â·X)", a.shape(), x.shape()));
        }

        let (input_scale, rng, keep) = match mode {
            ForwardMode::Inference => (None, None, 1.0),
            ForwardMode::Training { dropout_rate, rng } => {
                let keep = 1.0 - dropout_rate;
                let scale = dropout_mask(x.nnz(), keep, rng);
                (Some(scale), Some(rng), keep)
            }
        };
        let xw = match &input_scale {
            Some(scale) => x.with_value_scales(scale).spmm(&self.w0)?,
            None => x.spmm(&self.w0)?,
        };
        let h1 = a.spmm(&xw)?.map(|v| v.max(0.0));

        let (h1_dropped, hidden_scale) = match rng {
            Some(rng) => {
                let scale = dropout_mask(h1.rows() * h1.cols(), keep, rng);
                let mut dropped = h1.clone();
                for (v, s) in dropped.as_mut_slice().iter_mut().zip(&scale) {
                    *v *= s;
                }
                (dropped, Some(scale))
            }
            None => (h1.clone(), None),
        };
        let logits = a.spmm(&h1_dropped.matmul(&self.w1)?)?;
        let z = softmax_rows(&logits);
        Ok(ForwardCache {
            h1,
            z,
            h1_dropped,
            input_scale,
            hidden_scale,
        })
    }

    /// One bias-corrected Adam update.
    pub fn adam_step(&mut self, gradients: &Gradients, config: &GcnConfig) -> Result<()> {
        if !gradients.is_finite() {
            return Err(AgeError::Numeric(format!(
                "non-finite gradient at Adam step {}",
                self.adam.step + 1
            )));
        }
        if gradients.w0.shape() != self.w0.shape() || gradients.w1.shape() != self.w1.shape() {
            return Err(AgeError::shape("adam_step", gradients.w0.shape(), self.w0.shape()));
        }
        self.adam
            .update(&mut self.w0, &mut self.w1, gradients, config.learning_rate);
        Ok(())
    }
}

fn dropout_mask(len: usize, keep: f64, rng: &mut SeededRng) -> Vec<f64> {
    if keep >= 1.0 {
        return vec![1.0; len];
    }
    let scale = 1.0 / keep;
    (0..len)
        .map(|_| if rng.uniform() < keep { scale } else { 0.0 })
        .collect()
}

fn check_labeled(labeled: &[usize], labels: &[usize], n_rows: usize, n_classes: usize) -> Result<()> {
    if labeled.is_empty() {
        return Err(AgeError::Usage("loss needs at least one labeled node".into()));
    }
    for &l in labeled {
        if l >= n_rows || l >= labels.len() || labels[l] >= n_classes {
            return Err(AgeError::Usage(format!(
                "labeled node {l} has no valid label among {n_classes} classes"
            )));
        }
    }
    Ok(())
}

/// Summed cross-entropy over `labeled` (duplicates count again) plus the L2 term on W0.
pub fn loss(
    cache: &ForwardCache,
    labels: &[usize],
    labeled: &[usize],
    model: &GcnModel,
    weight_decay: f64,
) -> Result<f64> {
    check_labeled(labeled, labels, cache.z.rows(), cache.z.cols())?;
    let ce: f64 = labeled
        .iter()
        .map(|&l| -cache.z.get(l, labels[l]).max(PROB_FLOOR).ln())
        .sum();
    Ok(ce + 0.5 * weight_decay * model.w0.frobenius_sq())
}

/// Analytic gradients of [`loss`] through the pass recorded in `cache`.
///
/// ```text
/// dS  = (Z - Y) on labeled rows, 0 elsewhere
/// dW1 = (Â·drop(H1))ᵀ · dS                    = drop(H1)ᵀ · (Âᵀ·dS)
/// dP  = (Âᵀ·dS · W1ᵀ) ⊙ dropmask ⊙ [H1 > 0]
/// dW0 = (Â·drop(X))ᵀ · dP + λ·W0              = drop(X)ᵀ · (Âᵀ·dP) + λ·W0
/// ```
pub fn backward(
    model: &GcnModel,
    cache: &ForwardCache,
    a_hat: &NormalizedAdjacency,
    x: &SparseMatrix,
    labels: &[usize],
    labeled: &[usize],
    weight_decay: f64,
) -> Result<Gradients> {
    let a = a_hat.matrix();
    let n = a.rows();
    let classes = model.n_classes();
    if cache.z.shape() != (n, classes)
        || cache.h1.shape() != (n, model.hidden_dim())
        || x.shape() != (n, model.n_features())
        || cache.input_scale.as_ref().is_some_and(|s| s.len() != x.nnz())
    {
        return Err(AgeError::Usage(
            "forward cache does not match the model and inputs passed to backward".into(),
        ));
    }
    check_labeled(labeled, labels, n, classes)?;

    let mut d_logits = DenseMatrix::zeros(n, classes);
    for &l in labeled {
        let row = d_logits.row_mut(l);
        for (c, d) in row.iter_mut().enumerate() {
            *d += cache.z.get(l, c);
        }
        row[labels[l]] -= 1.0;
    }

    let d_hw = a.spmm_transpose(&d_logits)?;
    let grad_w1 = cache.h1_dropped.t_matmul(&d_hw)?;

    let mut d_pre = d_hw.matmul_t(&model.w1)?;
    for (k, (d, &h)) in d_pre
        .as_mut_slice()
        .iter_mut()
        .zip(cache.h1.as_slice())
        .enumerate()
    {
        let mask = cache.hidden_scale.as_ref().map_or(1.0, |s| s[k]);
        *d = if h > 0.0 { *d * mask } else { 0.0 };
    }

    let d_xw = a.spmm_transpose(&d_pre)?;
    let mut grad_w0 = match &cache.input_scale {
        Some(scale) => x.with_value_scales(scale).spmm_transpose(&d_xw)?,
        None => x.spmm_transpose(&d_xw)?,
    };
    grad_w0.add_scaled(&model.w0, weight_decay)?;
    Ok(Gradients {
        w0: grad_w0,
        w1: grad_w1,
    })
}

/// Hidden-layer activations `H1`; pass an inference cache for dropout-free embeddings.
pub fn embeddings(cache: &ForwardCache) -> DenseMatrix {
    cache.h1.clone()
}
