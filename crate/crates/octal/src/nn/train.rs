//! Adam-driven training loop with per-epoch validation checkpoints and
//! early stopping on best validation accuracy.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metrics::evaluate_classification_inputs;
use super::model::{apply_running_updates, batch_loss_and_grad, GraphInput, ModelParams, PackedBatch};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub dropout: f64,
    pub patience: usize,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    pub bn_momentum: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            learning_rate: 1e-5,
            dropout: 0.1,
            patience: 5,
            max_epochs: 200,
            batch_size: 64,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
            bn_momentum: 0.1,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), TrainError> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.dropout)
            && self.patience > 0
            && self.max_epochs > 0
            && self.batch_size > 0
            && self.beta1 > 0.0
            && self.beta1 < 1.0
            && self.beta2 > 0.0
            && self.beta2 < 1.0
            && self.adam_eps > 0.0;
        if ok {
            Ok(())
        } else {
            Err(TrainError::BadHyperparams)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
}

pub type History = Vec<EpochRecord>;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("hyperparameters out of range")]
    BadHyperparams,
    #[error("empty training or validation set")]
    EmptyDataset,
    #[error("feature width {got} does not match model input width {want}")]
    WidthMismatch { got: usize, want: usize },
    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Diverged { epoch: usize },
}

/// First-moment/second-moment optimizer state over the flat parameter vector.
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(len: usize) -> Self {
        Adam {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut Vec<f64>, grads: &[f64], hp: &Hyperparams) {
        self.t += 1;
        let b1c = 1.0 - hp.beta1.powi(self.t as i32);
        let b2c = 1.0 - hp.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = hp.beta1 * self.m[i] + (1.0 - hp.beta1) * grads[i];
            self.v[i] = hp.beta2 * self.v[i] + (1.0 - hp.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / b1c;
            let v_hat = self.v[i] / b2c;
            params[i] -= hp.learning_rate * m_hat / (v_hat.sqrt() + hp.adam_eps);
        }
    }
}

/// Minimize binary cross-entropy with Adam; checkpoint validation accuracy
/// once per epoch and stop after `patience` epochs without a new best.
/// Returns the best-checkpoint weights and the full epoch history.
/// Deterministic in `hp.seed`.
pub fn train(
    mut params: ModelParams,
    train_set: &[GraphInput],
    val_set: &[GraphInput],
    hp: &Hyperparams,
) -> Result<(ModelParams, History), TrainError> {
    hp.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let want = params.desc.input_width;
    for input in train_set.iter().chain(val_set) {
        if input.x.ncols() != want {
            return Err(TrainError::WidthMismatch {
                got: input.x.ncols(),
                want,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut adam = Adam::new(params.trainable_len());
    let mut history = Vec::new();
    let mut best = params.clone();
    let mut best_accuracy = f64::NEG_INFINITY;
    let mut epochs_since_best = 0usize;
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 0..hp.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(hp.batch_size) {
            let members: Vec<&GraphInput> = chunk.iter().map(|&i| &train_set[i]).collect();
            let batch = PackedBatch::pack(&members);
            let (batch_loss, grads, cache) =
                batch_loss_and_grad(&params, &batch, Some((&mut rng, hp.dropout)));
            if !batch_loss.is_finite() {
                return Err(TrainError::Diverged { epoch });
            }
            apply_running_updates(&mut params, &cache, hp.bn_momentum);
            epoch_loss += batch_loss * chunk.len() as f64;
            let mut flat = params.flatten();
            adam.step(&mut flat, &grads.flatten(), hp);
            params.assign_from_flat(&flat);
        }
        let train_loss = epoch_loss / train_set.len() as f64;
        let val_accuracy = evaluate_classification_inputs(&params, val_set).accuracy;
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_accuracy,
        });
        if val_accuracy > best_accuracy {
            best_accuracy = val_accuracy;
            best = params.clone();
            epochs_since_best = 0;
        } else {
            epochs_since_best += 1;
            if epochs_since_best >= hp.patience {
                break;
            }
        }
    }
    Ok((best, history))
}
