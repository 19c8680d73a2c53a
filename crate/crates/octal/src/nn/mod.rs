//! From-scratch neural checker: GIN/GCN message passing, batch
//! normalization, dropout, mean pooling, a two-layer head, BCE + Adam
//! training with early stopping, the graph-agnostic baselines, metrics, and
//! a finite-difference gradient gate.

mod gradcheck;
mod io;
mod layers;
mod metrics;
mod model;
mod train;

pub use gradcheck::{grad_check, GradCheckReport, GRAD_TOLERANCE};
pub use io::{
    checkpoint_from_string, checkpoint_to_string, history_to_string, load_checkpoint,
    load_history, save_checkpoint, save_history, Checkpoint, CheckpointError,
};
pub use layers::{bce_with_logit, sigmoid};
pub use metrics::{
    evaluate_classification, evaluate_classification_inputs, evaluate_ranking,
    metrics_from_confusion, positive_rank, predicted_label, Confusion, Metrics, MetricsError,
};
pub use model::{
    backward, backward_batch, batch_loss_and_grad, forward_train, forward_train_batch,
    graph_input, predict, predict_batch, Descriptor, GraphInput, ModelParams, PackedBatch,
    Variant, DEFAULT_HIDDEN,
};
pub use train::{train, Adam, EpochRecord, History, Hyperparams, TrainError};
