//! Classification and ranking metrics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::SampleRecord;

use super::model::{graph_input, predict, predict_batch, GraphInput, ModelParams, PackedBatch};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub mrr: f64,
    pub hits_at_k: BTreeMap<usize, f64>,
    pub confusion: Confusion,
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty dataset")]
    Empty,
    #[error("group {0} does not contain exactly one positive")]
    MalformedGroup(usize),
}

/// Probability 0.5 counts as predicting label 1 (deterministic tie rule).
pub fn predicted_label(probability: f64) -> u8 {
    if probability >= 0.5 {
        1
    } else {
        0
    }
}

pub fn metrics_from_confusion(c: Confusion) -> Metrics {
    let total = c.tp + c.fp + c.fn_ + c.tn;
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    Metrics {
        accuracy: ratio(c.tp + c.tn, total),
        precision: ratio(c.tp, c.tp + c.fp),
        recall: ratio(c.tp, c.tp + c.fn_),
        mrr: 0.0,
        hits_at_k: BTreeMap::new(),
        confusion: c,
    }
}

pub fn evaluate_classification_inputs(params: &ModelParams, inputs: &[GraphInput]) -> Metrics {
    let mut c = Confusion::default();
    // Inference uses running statistics, so batching only changes speed.
    for chunk in inputs.chunks(64) {
        let refs: Vec<&GraphInput> = chunk.iter().collect();
        let probabilities = predict_batch(params, &PackedBatch::pack(&refs));
        for (input, &p) in chunk.iter().zip(&probabilities) {
            match (input.label, predicted_label(p)) {
                (1, 1) => c.tp += 1,
                (0, 1) => c.fp += 1,
                (1, 0) => c.fn_ += 1,
                (0, 0) => c.tn += 1,
                _ => unreachable!("labels are 0/1"),
            }
        }
    }
    metrics_from_confusion(c)
}

pub fn evaluate_classification(
    params: &ModelParams,
    records: &[SampleRecord],
) -> Result<Metrics, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::Empty);
    }
    let inputs: Vec<GraphInput> = records.iter().map(graph_input).collect();
    Ok(evaluate_classification_inputs(params, &inputs))
}

/// Rank of the positive inside one group under stable descending sort:
/// ties resolve in favor of the earlier candidate index.
pub fn positive_rank(scores: &[f64], positive_index: usize) -> usize {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
            .then(a.cmp(&b))
    });
    order
        .iter()
        .position(|&i| i == positive_index)
        .expect("positive index in range")
        + 1
}

/// MRR and Hits@K (K = 1, 3, 10) over groups of encoded candidates, each
/// group holding exactly one label-1 record.
pub fn evaluate_ranking(
    params: &ModelParams,
    groups: &[Vec<SampleRecord>],
) -> Result<Metrics, MetricsError> {
    if groups.is_empty() {
        return Err(MetricsError::Empty);
    }
    let ks = [1usize, 3, 10];
    let mut reciprocal_sum = 0.0;
    let mut hits: BTreeMap<usize, usize> = ks.iter().map(|&k| (k, 0)).collect();
    for (gi, group) in groups.iter().enumerate() {
        let positives: Vec<usize> = group
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label == 1)
            .map(|(i, _)| i)
            .collect();
        let [positive_index] = positives[..] else {
            return Err(MetricsError::MalformedGroup(gi));
        };
        let scores: Vec<f64> = group
            .iter()
            .map(|r| predict(params, &graph_input(r)))
            .collect();
        let rank = positive_rank(&scores, positive_index);
        reciprocal_sum += 1.0 / rank as f64;
        for &k in &ks {
            if rank <= k {
                *hits.get_mut(&k).expect("key present") += 1;
            }
        }
    }
    let n = groups.len() as f64;
    Ok(Metrics {
        accuracy: 0.0,
        precision: 0.0,
        recall: 0.0,
        mrr: reciprocal_sum / n,
        hits_at_k: hits.into_iter().map(|(k, h)| (k, h as f64 / n)).collect(),
        confusion: Confusion::default(),
    })
}
