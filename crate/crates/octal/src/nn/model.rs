//! The four model variants over one shared parameter layout: three
//! message-passing layers (six for the link predictor's two stacks, none for
//! the feature-only baseline) and a two-layer head.
//!
//! Training processes graphs in packed batches — node features concatenated,
//! adjacency block-diagonal — so batch normalization sees the whole batch's
//! nodes and its running statistics transfer to per-graph inference.

use ndarray::{Array1, Array2, Axis};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{EdgeKind, NodeKind, SampleRecord};

use super::layers::{
    aggregate_norm, aggregate_sum, bce_grad, bce_with_logit, dropout_mask, relu, relu_backward,
    sigmoid, BatchNorm, BnCache, Linear,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Gin,
    Gcn,
    MlpBaseline,
    LinkPredictor,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Gin => "gin",
            Variant::Gcn => "gcn",
            Variant::MlpBaseline => "mlp",
            Variant::LinkPredictor => "linkpred",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gin" => Ok(Variant::Gin),
            "gcn" => Ok(Variant::Gcn),
            "mlp" | "mlp_baseline" => Ok(Variant::MlpBaseline),
            "linkpred" | "link_predictor" => Ok(Variant::LinkPredictor),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descriptor {
    pub variant: Variant,
    pub input_width: usize,
    pub hidden: usize,
}

pub const DEFAULT_HIDDEN: usize = 128;

impl Descriptor {
    pub fn new(variant: Variant, input_width: usize) -> Self {
        Descriptor {
            variant,
            input_width,
            hidden: DEFAULT_HIDDEN,
        }
    }

    fn conv_count(&self) -> usize {
        match self.variant {
            Variant::Gin | Variant::Gcn => 3,
            Variant::LinkPredictor => 6,
            Variant::MlpBaseline => 0,
        }
    }

    fn head_input(&self) -> usize {
        match self.variant {
            Variant::Gin | Variant::Gcn => self.hidden,
            Variant::LinkPredictor => 2 * self.hidden,
            Variant::MlpBaseline => self.input_width,
        }
    }
}

/// One message-passing layer: aggregation feeds a two-linear MLP, then batch
/// normalization and a rectifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub lin1: Linear,
    pub lin2: Linear,
    pub bn: BatchNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Head {
    pub lin1: Linear,
    pub lin2: Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub desc: Descriptor,
    /// GIN epsilon; fixed, not trained.
    pub epsilon: f64,
    pub convs: Vec<ConvLayer>,
    pub head: Head,
}

impl ModelParams {
    pub fn init(desc: Descriptor, seed: u64) -> Self {
        Self::init_scaled(desc, seed, 1.0)
    }

    /// Glorot init with every weight multiplied by `scale`.
    ///
    /// Batch normalization makes the network function invariant to the scale
    /// of the convolution weights, but Adam's per-parameter step is an
    /// absolute distance (~ the learning rate). A smaller init therefore
    /// shortens the distance the weights must travel and speeds convergence
    /// at small learning rates without changing the function class.
    pub fn init_scaled(desc: Descriptor, seed: u64, scale: f64) -> Self {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lin = |input: usize, output: usize, rng: &mut ChaCha8Rng| {
            let mut l = Linear::init(input, output, rng);
            l.w *= scale;
            l
        };
        let mut convs = Vec::new();
        for i in 0..desc.conv_count() {
            // Each stack's first layer reads raw features.
            let input = if i % 3 == 0 { desc.input_width } else { desc.hidden };
            convs.push(ConvLayer {
                lin1: lin(input, desc.hidden, &mut rng),
                lin2: lin(desc.hidden, desc.hidden, &mut rng),
                bn: BatchNorm::new(desc.hidden),
            });
        }
        let head = Head {
            lin1: lin(desc.head_input(), desc.hidden, &mut rng),
            lin2: lin(desc.hidden, 1, &mut rng),
        };
        ModelParams {
            desc,
            epsilon: 0.0,
            convs,
            head,
        }
    }

    /// Same shapes, all zeros; the gradient accumulator.
    pub fn zeros_like(&self) -> Self {
        ModelParams {
            desc: self.desc,
            epsilon: self.epsilon,
            convs: self
                .convs
                .iter()
                .map(|c| ConvLayer {
                    lin1: Linear::zeros(c.lin1.w.nrows(), c.lin1.w.ncols()),
                    lin2: Linear::zeros(c.lin2.w.nrows(), c.lin2.w.ncols()),
                    bn: BatchNorm::zeros(c.bn.gamma.len()),
                })
                .collect(),
            head: Head {
                lin1: Linear::zeros(self.head.lin1.w.nrows(), self.head.lin1.w.ncols()),
                lin2: Linear::zeros(self.head.lin2.w.nrows(), self.head.lin2.w.ncols()),
            },
        }
    }

    fn trainable_arrays(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for c in &self.convs {
            out.push(c.lin1.w.as_slice().expect("contiguous"));
            out.push(c.lin1.b.as_slice().expect("contiguous"));
            out.push(c.lin2.w.as_slice().expect("contiguous"));
            out.push(c.lin2.b.as_slice().expect("contiguous"));
            out.push(c.bn.gamma.as_slice().expect("contiguous"));
            out.push(c.bn.beta.as_slice().expect("contiguous"));
        }
        out.push(self.head.lin1.w.as_slice().expect("contiguous"));
        out.push(self.head.lin1.b.as_slice().expect("contiguous"));
        out.push(self.head.lin2.w.as_slice().expect("contiguous"));
        out.push(self.head.lin2.b.as_slice().expect("contiguous"));
        out
    }

    fn trainable_arrays_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::new();
        for c in &mut self.convs {
            out.push(c.lin1.w.as_slice_mut().expect("contiguous"));
            out.push(c.lin1.b.as_slice_mut().expect("contiguous"));
            out.push(c.lin2.w.as_slice_mut().expect("contiguous"));
            out.push(c.lin2.b.as_slice_mut().expect("contiguous"));
            out.push(c.bn.gamma.as_slice_mut().expect("contiguous"));
            out.push(c.bn.beta.as_slice_mut().expect("contiguous"));
        }
        out.push(self.head.lin1.w.as_slice_mut().expect("contiguous"));
        out.push(self.head.lin1.b.as_slice_mut().expect("contiguous"));
        out.push(self.head.lin2.w.as_slice_mut().expect("contiguous"));
        out.push(self.head.lin2.b.as_slice_mut().expect("contiguous"));
        out
    }

    pub fn trainable_len(&self) -> usize {
        self.trainable_arrays().iter().map(|a| a.len()).sum()
    }

    /// All trainable coordinates in a fixed order (running statistics and
    /// epsilon excluded).
    pub fn flatten(&self) -> Vec<f64> {
        self.trainable_arrays().concat()
    }

    pub fn assign_from_flat(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for arr in self.trainable_arrays_mut() {
            arr.copy_from_slice(&flat[offset..offset + arr.len()]);
            offset += arr.len();
        }
        assert_eq!(offset, flat.len(), "flat vector length mismatch");
    }

    /// `self += other * scale` over trainable coordinates.
    pub fn add_scaled(&mut self, other: &ModelParams, scale: f64) {
        let src = other.flatten();
        let mut offset = 0;
        for arr in self.trainable_arrays_mut() {
            for v in arr.iter_mut() {
                *v += src[offset] * scale;
                offset += 1;
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.flatten().iter().all(|v| v.is_finite())
            && self.convs.iter().all(|c| {
                c.bn.running_mean.iter().all(|v| v.is_finite())
                    && c.bn.running_var.iter().all(|v| v.is_finite())
            })
    }
}

/// A sample's view for the forward passes: features plus the adjacency
/// structures each variant reads.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInput {
    pub x: Array2<f64>,
    /// All edges, undirected.
    pub adj_all: Vec<Vec<usize>>,
    /// Incidence edges only.
    pub adj_incidence: Vec<Vec<usize>>,
    /// Tree edges only.
    pub adj_tree: Vec<Vec<usize>>,
    /// Automaton-side nodes (states and transitions).
    pub system_nodes: Vec<usize>,
    /// Formula-side nodes.
    pub tree_nodes: Vec<usize>,
    pub label: u8,
}

pub fn graph_input(rec: &SampleRecord) -> GraphInput {
    let n = rec.graph.node_count();
    let mut adj_all = vec![Vec::new(); n];
    let mut adj_incidence = vec![Vec::new(); n];
    let mut adj_tree = vec![Vec::new(); n];
    for &(u, v, kind) in &rec.graph.edges {
        adj_all[u].push(v);
        adj_all[v].push(u);
        match kind {
            EdgeKind::Incidence => {
                adj_incidence[u].push(v);
                adj_incidence[v].push(u);
            }
            EdgeKind::Tree => {
                adj_tree[u].push(v);
                adj_tree[v].push(u);
            }
            EdgeKind::Union => {}
        }
    }
    let mut system_nodes = Vec::new();
    let mut tree_nodes = Vec::new();
    for (id, payload) in rec.graph.nodes.iter().enumerate() {
        match payload.kind() {
            NodeKind::State | NodeKind::Transition => system_nodes.push(id),
            _ => tree_nodes.push(id),
        }
    }
    GraphInput {
        x: rec.features.clone(),
        adj_all,
        adj_incidence,
        adj_tree,
        system_nodes,
        tree_nodes,
        label: rec.label,
    }
}

/// Several graphs concatenated: block-diagonal adjacency, per-graph node
/// groups for pooling.
#[derive(Debug, Clone)]
pub struct PackedBatch {
    pub x: Array2<f64>,
    pub adj_all: Vec<Vec<usize>>,
    pub adj_incidence: Vec<Vec<usize>>,
    pub adj_tree: Vec<Vec<usize>>,
    /// All nodes of each graph, shifted into packed ids.
    pub groups_all: Vec<Vec<usize>>,
    pub groups_system: Vec<Vec<usize>>,
    pub groups_tree: Vec<Vec<usize>>,
    pub labels: Vec<f64>,
}

impl PackedBatch {
    pub fn pack(inputs: &[&GraphInput]) -> Self {
        let total: usize = inputs.iter().map(|g| g.x.nrows()).sum();
        let width = inputs.first().map_or(0, |g| g.x.ncols());
        let mut x = Array2::zeros((total, width));
        let mut adj_all = Vec::with_capacity(total);
        let mut adj_incidence = Vec::with_capacity(total);
        let mut adj_tree = Vec::with_capacity(total);
        let mut groups_all = Vec::with_capacity(inputs.len());
        let mut groups_system = Vec::with_capacity(inputs.len());
        let mut groups_tree = Vec::with_capacity(inputs.len());
        let mut labels = Vec::with_capacity(inputs.len());
        let mut offset = 0;
        for g in inputs {
            let n = g.x.nrows();
            x.slice_mut(ndarray::s![offset..offset + n, ..]).assign(&g.x);
            let shift = |list: &Vec<usize>| list.iter().map(|&v| v + offset).collect::<Vec<_>>();
            for v in 0..n {
                adj_all.push(shift(&g.adj_all[v]));
                adj_incidence.push(shift(&g.adj_incidence[v]));
                adj_tree.push(shift(&g.adj_tree[v]));
            }
            groups_all.push((offset..offset + n).collect());
            groups_system.push(shift(&g.system_nodes));
            groups_tree.push(shift(&g.tree_nodes));
            labels.push(g.label as f64);
            offset += n;
        }
        PackedBatch {
            x,
            adj_all,
            adj_incidence,
            adj_tree,
            groups_all,
            groups_system,
            groups_tree,
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ConvCache {
    m: Array2<f64>,
    z1: Array2<f64>,
    a1: Array2<f64>,
    pub bn_cache: BnCache,
    bn_out: Array2<f64>,
}

#[derive(Debug, Clone)]
struct HeadCache {
    mask1: Array2<f64>,
    masked_in: Array2<f64>,
    z1: Array2<f64>,
    mask2: Array2<f64>,
    masked_a1: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct Cache {
    pub conv: Vec<ConvCache>,
    head: HeadCache,
}

fn aggregate(params: &ModelParams, h: &Array2<f64>, adj: &[Vec<usize>]) -> Array2<f64> {
    match params.desc.variant {
        Variant::Gin => aggregate_sum(h, adj, params.epsilon),
        _ => aggregate_norm(h, adj),
    }
}

fn conv_forward_batch(
    params: &ModelParams,
    layer: &ConvLayer,
    h: &Array2<f64>,
    adj: &[Vec<usize>],
) -> (Array2<f64>, ConvCache) {
    let m = aggregate(params, h, adj);
    let z1 = layer.lin1.forward(&m);
    let a1 = relu(&z1);
    let z2 = layer.lin2.forward(&a1);
    let (bn_out, bn_cache) = layer.bn.forward_batch(&z2);
    let out = relu(&bn_out);
    (
        out,
        ConvCache {
            m,
            z1,
            a1,
            bn_cache,
            bn_out,
        },
    )
}

fn conv_forward_running(
    params: &ModelParams,
    layer: &ConvLayer,
    h: &Array2<f64>,
    adj: &[Vec<usize>],
) -> Array2<f64> {
    let m = aggregate(params, h, adj);
    let a1 = relu(&layer.lin1.forward(&m));
    let z2 = layer.lin2.forward(&a1);
    relu(&layer.bn.forward_running(&z2))
}

/// Row g = mean over `groups[g]` of rows of `h`.
fn pool_groups(h: &Array2<f64>, groups: &[Vec<usize>]) -> Array2<f64> {
    let mut pooled = Array2::zeros((groups.len(), h.ncols()));
    for (g, nodes) in groups.iter().enumerate() {
        let scale = 1.0 / nodes.len().max(1) as f64;
        for &v in nodes {
            let row = h.row(v).to_owned();
            let mut target = pooled.row_mut(g);
            target.scaled_add(scale, &row);
        }
    }
    pooled
}

fn scatter_groups(d_pooled: &Array2<f64>, groups: &[Vec<usize>], n_rows: usize) -> Array2<f64> {
    let mut d_h = Array2::zeros((n_rows, d_pooled.ncols()));
    for (g, nodes) in groups.iter().enumerate() {
        let scale = 1.0 / nodes.len().max(1) as f64;
        let row = d_pooled.row(g).to_owned();
        for &v in nodes {
            let mut target = d_h.row_mut(v);
            target.scaled_add(scale, &row);
        }
    }
    d_h
}

fn concat_cols(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    ndarray::concatenate(Axis(1), &[a.view(), b.view()]).expect("row counts match")
}

/// Graph embeddings (one row per graph) under batch statistics.
fn embed_batch(params: &ModelParams, batch: &PackedBatch) -> (Array2<f64>, Vec<ConvCache>) {
    match params.desc.variant {
        Variant::MlpBaseline => (pool_groups(&batch.x, &batch.groups_all), Vec::new()),
        Variant::Gin | Variant::Gcn => {
            let mut h = batch.x.clone();
            let mut caches = Vec::new();
            for layer in &params.convs {
                let (next, cache) = conv_forward_batch(params, layer, &h, &batch.adj_all);
                caches.push(cache);
                h = next;
            }
            (pool_groups(&h, &batch.groups_all), caches)
        }
        Variant::LinkPredictor => {
            let mut caches = Vec::new();
            let mut h = batch.x.clone();
            for layer in &params.convs[..3] {
                let (next, cache) = conv_forward_batch(params, layer, &h, &batch.adj_incidence);
                caches.push(cache);
                h = next;
            }
            let sys = pool_groups(&h, &batch.groups_system);
            let mut h = batch.x.clone();
            for layer in &params.convs[3..] {
                let (next, cache) = conv_forward_batch(params, layer, &h, &batch.adj_tree);
                caches.push(cache);
                h = next;
            }
            let tree = pool_groups(&h, &batch.groups_tree);
            (concat_cols(&sys, &tree), caches)
        }
    }
}

fn embed_running(params: &ModelParams, batch: &PackedBatch) -> Array2<f64> {
    match params.desc.variant {
        Variant::MlpBaseline => pool_groups(&batch.x, &batch.groups_all),
        Variant::Gin | Variant::Gcn => {
            let mut h = batch.x.clone();
            for layer in &params.convs {
                h = conv_forward_running(params, layer, &h, &batch.adj_all);
            }
            pool_groups(&h, &batch.groups_all)
        }
        Variant::LinkPredictor => {
            let mut h = batch.x.clone();
            for layer in &params.convs[..3] {
                h = conv_forward_running(params, layer, &h, &batch.adj_incidence);
            }
            let sys = pool_groups(&h, &batch.groups_system);
            let mut h = batch.x.clone();
            for layer in &params.convs[3..] {
                h = conv_forward_running(params, layer, &h, &batch.adj_tree);
            }
            let tree = pool_groups(&h, &batch.groups_tree);
            concat_cols(&sys, &tree)
        }
    }
}

fn head_forward(
    params: &ModelParams,
    pooled: Array2<f64>,
    dropout: Option<(&mut ChaCha8Rng, f64)>,
) -> (Array1<f64>, HeadCache) {
    let rows = pooled.nrows();
    let d_in = pooled.ncols();
    let hidden = params.head.lin1.w.ncols();
    let (mask1, mask2) = match dropout {
        Some((rng, p)) => (
            dropout_mask(rows, d_in, p, rng),
            dropout_mask(rows, hidden, p, rng),
        ),
        None => (Array2::ones((rows, d_in)), Array2::ones((rows, hidden))),
    };
    let masked_in = &pooled * &mask1;
    let z1 = params.head.lin1.forward(&masked_in);
    let a1 = relu(&z1);
    let masked_a1 = &a1 * &mask2;
    let z2 = params.head.lin2.forward(&masked_a1);
    let logits = z2.column(0).to_owned();
    (
        logits,
        HeadCache {
            mask1,
            masked_in,
            z1,
            mask2,
            masked_a1,
        },
    )
}

/// Training-path forward: batch-statistic normalization, optional dropout.
/// Does not touch the running statistics; the train loop folds them in via
/// `apply_running_updates`.
pub fn forward_train_batch(
    params: &ModelParams,
    batch: &PackedBatch,
    dropout: Option<(&mut ChaCha8Rng, f64)>,
) -> (Array1<f64>, Cache) {
    let (pooled, conv) = embed_batch(params, batch);
    let (logits, head) = head_forward(params, pooled, dropout);
    (logits, Cache { conv, head })
}

/// Single-sample training-path forward.
pub fn forward_train(
    params: &ModelParams,
    input: &GraphInput,
    dropout: Option<(&mut ChaCha8Rng, f64)>,
) -> (f64, Cache) {
    let batch = PackedBatch::pack(&[input]);
    let (logits, cache) = forward_train_batch(params, &batch, dropout);
    (logits[0], cache)
}

/// Inference probabilities: running statistics, no dropout.
pub fn predict_batch(params: &ModelParams, batch: &PackedBatch) -> Vec<f64> {
    let pooled = embed_running(params, batch);
    let (logits, _) = head_forward(params, pooled, None);
    logits.iter().map(|&z| sigmoid(z)).collect()
}

/// Inference probability for one graph; independent of batch composition.
pub fn predict(params: &ModelParams, input: &GraphInput) -> f64 {
    predict_batch(params, &PackedBatch::pack(&[input]))[0]
}

/// Mean BCE over the batch plus its gradient.
pub fn batch_loss_and_grad(
    params: &ModelParams,
    batch: &PackedBatch,
    dropout: Option<(&mut ChaCha8Rng, f64)>,
) -> (f64, ModelParams, Cache) {
    let (logits, cache) = forward_train_batch(params, batch, dropout);
    let n = batch.len() as f64;
    let mut loss = 0.0;
    let mut d_logits = Array1::zeros(batch.len());
    for (i, (&z, &y)) in logits.iter().zip(&batch.labels).enumerate() {
        loss += bce_with_logit(z, y);
        d_logits[i] = bce_grad(z, y) / n;
    }
    let grads = backward_batch(params, batch, &cache, &d_logits);
    (loss / n, grads, cache)
}

fn conv_stack_backward(
    params: &ModelParams,
    layers: &[ConvLayer],
    caches: &[ConvCache],
    adj: &[Vec<usize>],
    grads: &mut [ConvLayer],
    mut d_h: Array2<f64>,
) {
    for ((layer, cache), grad) in layers.iter().zip(caches).zip(grads.iter_mut()).rev() {
        let d_bn_out = relu_backward(&cache.bn_out, &d_h);
        let d_z2 = layer.bn.backward(&cache.bn_cache, &d_bn_out, &mut grad.bn);
        let d_a1 = layer.lin2.backward(&cache.a1, &d_z2, &mut grad.lin2);
        let d_z1 = relu_backward(&cache.z1, &d_a1);
        let d_m = layer.lin1.backward(&cache.m, &d_z1, &mut grad.lin1);
        // Both aggregations are self-adjoint, so the forward operator is the
        // backward operator.
        d_h = match params.desc.variant {
            Variant::Gin => aggregate_sum(&d_m, adj, params.epsilon),
            _ => aggregate_norm(&d_m, adj),
        };
    }
}

/// Gradients of all trainable parameters; running statistics in the result
/// are zero and carry no meaning.
pub fn backward_batch(
    params: &ModelParams,
    batch: &PackedBatch,
    cache: &Cache,
    d_logits: &Array1<f64>,
) -> ModelParams {
    let mut grads = params.zeros_like();
    let rows = d_logits.len();
    let mut d_z2 = Array2::zeros((rows, 1));
    for i in 0..rows {
        d_z2[(i, 0)] = d_logits[i];
    }
    let d_masked_a1 = params
        .head
        .lin2
        .backward(&cache.head.masked_a1, &d_z2, &mut grads.head.lin2);
    let d_a1 = &d_masked_a1 * &cache.head.mask2;
    let d_z1 = relu_backward(&cache.head.z1, &d_a1);
    let d_masked_in = params
        .head
        .lin1
        .backward(&cache.head.masked_in, &d_z1, &mut grads.head.lin1);
    let d_pooled = &d_masked_in * &cache.head.mask1;
    let n = batch.x.nrows();
    match params.desc.variant {
        Variant::MlpBaseline => {}
        Variant::Gin | Variant::Gcn => {
            let d_h = scatter_groups(&d_pooled, &batch.groups_all, n);
            conv_stack_backward(
                params,
                &params.convs,
                &cache.conv,
                &batch.adj_all,
                &mut grads.convs,
                d_h,
            );
        }
        Variant::LinkPredictor => {
            let hidden = params.desc.hidden;
            let d_sys = d_pooled.slice(ndarray::s![.., ..hidden]).to_owned();
            let d_tree = d_pooled.slice(ndarray::s![.., hidden..]).to_owned();
            let (g_sys, g_tree) = grads.convs.split_at_mut(3);
            conv_stack_backward(
                params,
                &params.convs[..3],
                &cache.conv[..3],
                &batch.adj_incidence,
                g_sys,
                scatter_groups(&d_sys, &batch.groups_system, n),
            );
            conv_stack_backward(
                params,
                &params.convs[3..],
                &cache.conv[3..],
                &batch.adj_tree,
                g_tree,
                scatter_groups(&d_tree, &batch.groups_tree, n),
            );
        }
    }
    grads
}

/// Single-sample backward; re-packs the graph as a batch of one.
pub fn backward(
    params: &ModelParams,
    input: &GraphInput,
    cache: &Cache,
    d_logit: f64,
) -> ModelParams {
    let batch = PackedBatch::pack(&[input]);
    backward_batch(params, &batch, cache, &Array1::from_elem(1, d_logit))
}

/// Fold one training forward's batch statistics into the running estimates.
pub fn apply_running_updates(params: &mut ModelParams, cache: &Cache, momentum: f64) {
    for (layer, conv_cache) in params.convs.iter_mut().zip(&cache.conv) {
        layer.bn.update_running(&conv_cache.bn_cache, momentum);
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dataset::{encode_sample, generate_corpus, Profile, Sample};
    use crate::graph::{make_dictionary, EncodingDictionary, EncodingScheme, DEFAULT_SIGMA};
    use rand::SeedableRng;

    pub(crate) fn dict() -> EncodingDictionary {
        make_dictionary(0, DEFAULT_SIGMA)
    }

    pub(crate) fn toy_inputs(count: usize, seed: u64) -> Vec<GraphInput> {
        let ds = generate_corpus(Profile::ShortLike, count, seed).unwrap();
        ds.samples
            .iter()
            .map(|s| {
                graph_input(&encode_sample(s, EncodingScheme::Gaussian, false, &dict()).unwrap())
            })
            .collect()
    }

    fn shuffled_input(s: &Sample, perm_seed: u64) -> (GraphInput, GraphInput) {
        use rand::seq::SliceRandom;
        let rec = encode_sample(s, EncodingScheme::Gaussian, false, &dict()).unwrap();
        let original = graph_input(&rec);
        let n = rec.graph.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        // perm[old] = new id
        let mut nodes = rec.graph.nodes.clone();
        let mut new_nodes = nodes.clone();
        for (old, payload) in nodes.drain(..).enumerate() {
            new_nodes[perm[old]] = payload;
        }
        let edges = rec
            .graph
            .edges
            .iter()
            .map(|&(u, v, k)| (perm[u], perm[v], k))
            .collect();
        let mut features = rec.features.clone();
        for old in 0..n {
            for j in 0..rec.features.ncols() {
                features[(perm[old], j)] = rec.features[(old, j)];
            }
        }
        let shuffled = SampleRecord {
            graph: crate::graph::UnionGraph {
                nodes: new_nodes,
                edges,
            },
            features,
            label: rec.label,
            meta: rec.meta.clone(),
        };
        (original, graph_input(&shuffled))
    }

    #[test]
    fn outputs_are_probabilities() {
        let inputs = toy_inputs(4, 21);
        for variant in [
            Variant::Gin,
            Variant::Gcn,
            Variant::MlpBaseline,
            Variant::LinkPredictor,
        ] {
            let params = ModelParams::init(Descriptor::new(variant, inputs[0].x.ncols()), 1);
            for input in &inputs {
                let p = predict(&params, input);
                assert!(p > 0.0 && p < 1.0, "{variant:?} gave {p}");
            }
        }
    }

    #[test]
    fn zero_weights_predict_half() {
        let inputs = toy_inputs(2, 3);
        for variant in [Variant::Gin, Variant::MlpBaseline] {
            let desc = Descriptor::new(variant, inputs[0].x.ncols());
            let mut params = ModelParams::init(desc, 1);
            let zeros = vec![0.0; params.trainable_len()];
            params.assign_from_flat(&zeros);
            assert_eq!(predict(&params, &inputs[0]), 0.5);
        }
    }

    #[test]
    fn permutation_invariance_all_variants() {
        let ds = generate_corpus(Profile::ShortLike, 4, 17).unwrap();
        for variant in [
            Variant::Gin,
            Variant::Gcn,
            Variant::MlpBaseline,
            Variant::LinkPredictor,
        ] {
            for (i, s) in ds.samples.iter().enumerate() {
                let (a, b) = shuffled_input(s, 100 + i as u64);
                let params = ModelParams::init(Descriptor::new(variant, a.x.ncols()), 7);
                let pa = predict(&params, &a);
                let pb = predict(&params, &b);
                assert!((pa - pb).abs() < 1e-9, "{variant:?}: {pa} vs {pb}");
            }
        }
    }

    #[test]
    fn batched_prediction_matches_single() {
        let inputs = toy_inputs(6, 29);
        let params = ModelParams::init(Descriptor::new(Variant::Gin, inputs[0].x.ncols()), 3);
        let refs: Vec<&GraphInput> = inputs.iter().collect();
        let batch = PackedBatch::pack(&refs);
        let batched = predict_batch(&params, &batch);
        for (input, &p) in inputs.iter().zip(&batched) {
            assert!((predict(&params, input) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn mlp_ignores_edges_entirely() {
        let ds = generate_corpus(Profile::ShortLike, 2, 5).unwrap();
        let s = &ds.samples[0];
        let mut rec = encode_sample(s, EncodingScheme::Gaussian, false, &dict()).unwrap();
        let params = ModelParams::init(Descriptor::new(Variant::MlpBaseline, 64), 2);
        let before = predict(&params, &graph_input(&rec));
        rec.graph.edges.clear();
        let after = predict(&params, &graph_input(&rec));
        assert_eq!(before, after);
    }

    #[test]
    fn link_predictor_ignores_union_edges() {
        let ds = generate_corpus(Profile::ShortLike, 2, 5).unwrap();
        let s = &ds.samples[0];
        let mut rec = encode_sample(s, EncodingScheme::Gaussian, false, &dict()).unwrap();
        let params = ModelParams::init(Descriptor::new(Variant::LinkPredictor, 64), 2);
        let before = predict(&params, &graph_input(&rec));
        rec.graph.edges.retain(|&(_, _, k)| k != EdgeKind::Union);
        let after = predict(&params, &graph_input(&rec));
        assert_eq!(before, after);
    }

    #[test]
    fn flatten_round_trips() {
        let params = ModelParams::init(Descriptor::new(Variant::Gin, 64), 5);
        let flat = params.flatten();
        assert_eq!(flat.len(), params.trainable_len());
        let mut copy = params.zeros_like();
        copy.assign_from_flat(&flat);
        assert_eq!(copy.flatten(), flat);
        assert_eq!(copy.head.lin2.w, params.head.lin2.w);
    }
}
