//! Building blocks with hand-written backward passes. Every forward keeps
//! exactly the intermediates its backward needs.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const BN_EPS: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    /// (in, out)
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Linear {
    pub fn zeros(input: usize, output: usize) -> Self {
        Linear {
            w: Array2::zeros((input, output)),
            b: Array1::zeros(output),
        }
    }

    /// Glorot-uniform initialization.
    pub fn init(input: usize, output: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = (6.0 / (input + output) as f64).sqrt();
        let w = Array2::from_shape_fn((input, output), |_| rng.gen_range(-bound..bound));
        Linear {
            w,
            b: Array1::zeros(output),
        }
    }

    pub fn forward(&self, h: &Array2<f64>) -> Array2<f64> {
        h.dot(&self.w) + &self.b
    }

    /// Returns input gradient; accumulates weight gradients into `grad`.
    pub fn backward(&self, h: &Array2<f64>, d_out: &Array2<f64>, grad: &mut Linear) -> Array2<f64> {
        grad.w += &h.t().dot(d_out);
        grad.b += &d_out.sum_axis(Axis(0));
        d_out.dot(&self.w.t())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
    pub running_mean: Array1<f64>,
    pub running_var: Array1<f64>,
}

#[derive(Debug, Clone)]
pub struct BnCache {
    pub xhat: Array2<f64>,
    pub inv_std: Array1<f64>,
    pub batch_mean: Array1<f64>,
    /// Unbiased batch variance, the value folded into the running estimate.
    pub batch_var_unbiased: Array1<f64>,
}

impl BatchNorm {
    pub fn new(width: usize) -> Self {
        BatchNorm {
            gamma: Array1::ones(width),
            beta: Array1::zeros(width),
            running_mean: Array1::zeros(width),
            running_var: Array1::ones(width),
        }
    }

    pub fn zeros(width: usize) -> Self {
        BatchNorm {
            gamma: Array1::zeros(width),
            beta: Array1::zeros(width),
            running_mean: Array1::zeros(width),
            running_var: Array1::zeros(width),
        }
    }

    /// Normalize with this batch's own statistics (training path).
    pub fn forward_batch(&self, x: &Array2<f64>) -> (Array2<f64>, BnCache) {
        let n = x.nrows() as f64;
        let mean = x.mean_axis(Axis(0)).expect("non-empty batch");
        let centered = x - &mean;
        let var = centered.mapv(|v| v * v).mean_axis(Axis(0)).expect("non-empty");
        let inv_std = var.mapv(|v| 1.0 / (v + BN_EPS).sqrt());
        let xhat = &centered * &inv_std;
        let out = &xhat * &self.gamma + &self.beta;
        let unbiased = if n > 1.0 {
            var.mapv(|v| v * n / (n - 1.0))
        } else {
            var.clone()
        };
        (
            out,
            BnCache {
                xhat,
                inv_std,
                batch_mean: mean,
                batch_var_unbiased: unbiased,
            },
        )
    }

    /// Normalize with the running statistics (inference path).
    pub fn forward_running(&self, x: &Array2<f64>) -> Array2<f64> {
        let inv_std = self.running_var.mapv(|v| 1.0 / (v + BN_EPS).sqrt());
        (x - &self.running_mean) * inv_std * &self.gamma + &self.beta
    }

    pub fn backward(
        &self,
        cache: &BnCache,
        d_out: &Array2<f64>,
        grad: &mut BatchNorm,
    ) -> Array2<f64> {
        grad.beta += &d_out.sum_axis(Axis(0));
        grad.gamma += &(d_out * &cache.xhat).sum_axis(Axis(0));
        let d_xhat = d_out * &self.gamma;
        let mean_d = d_xhat.mean_axis(Axis(0)).expect("non-empty");
        let mean_dx = (&d_xhat * &cache.xhat).mean_axis(Axis(0)).expect("non-empty");
        (&d_xhat - &mean_d - &cache.xhat * &mean_dx) * &cache.inv_std
    }

    pub fn update_running(&mut self, cache: &BnCache, momentum: f64) {
        self.running_mean = &self.running_mean * (1.0 - momentum) + &cache.batch_mean * momentum;
        self.running_var =
            &self.running_var * (1.0 - momentum) + &cache.batch_var_unbiased * momentum;
    }
}

pub fn relu(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(|v| v.max(0.0))
}

/// Gradient through a rectifier given its pre-activation.
pub fn relu_backward(pre: &Array2<f64>, d_out: &Array2<f64>) -> Array2<f64> {
    let mut d = d_out.clone();
    d.zip_mut_with(pre, |g, &p| {
        if p <= 0.0 {
            *g = 0.0;
        }
    });
    d
}

/// Inverted-dropout mask: keep with probability 1-p, scale kept entries by
/// 1/(1-p) so inference needs no rescaling.
pub fn dropout_mask(rows: usize, cols: usize, p: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    assert!((0.0..1.0).contains(&p));
    if p == 0.0 {
        return Array2::ones((rows, cols));
    }
    let scale = 1.0 / (1.0 - p);
    Array2::from_shape_fn((rows, cols), |_| {
        if rng.gen::<f64>() < p {
            0.0
        } else {
            scale
        }
    })
}

/// Undirected neighbor sum, the GIN aggregation with epsilon folded in:
/// out_v = (1+eps)·h_v + sum of neighbors. Self-adjoint when `adj` is
/// symmetric, so it is its own backward operator.
pub fn aggregate_sum(h: &Array2<f64>, adj: &[Vec<usize>], eps: f64) -> Array2<f64> {
    let mut out = h * (1.0 + eps);
    for (v, neighbors) in adj.iter().enumerate() {
        for &u in neighbors {
            let row = h.row(u).to_owned();
            let mut target = out.row_mut(v);
            target += &row;
        }
    }
    out
}

/// Symmetric-normalized averaging with self-loops:
/// out_v = sum_u h_u / sqrt(deg_v · deg_u) over u ∈ N(v) ∪ {v}, with
/// deg counting the self-loop. Also self-adjoint.
pub fn aggregate_norm(h: &Array2<f64>, adj: &[Vec<usize>]) -> Array2<f64> {
    let deg: Vec<f64> = adj.iter().map(|n| (n.len() + 1) as f64).collect();
    let mut out = Array2::zeros(h.raw_dim());
    for (v, neighbors) in adj.iter().enumerate() {
        {
            let row = h.row(v).to_owned();
            let mut target = out.row_mut(v);
            target.scaled_add(1.0 / deg[v], &row);
        }
        for &u in neighbors {
            let coef = 1.0 / (deg[v] * deg[u]).sqrt();
            let row = h.row(u).to_owned();
            let mut target = out.row_mut(v);
            target.scaled_add(coef, &row);
        }
    }
    out
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable binary cross-entropy on the logit.
pub fn bce_with_logit(z: f64, label: f64) -> f64 {
    z.max(0.0) - z * label + (-z.abs()).exp().ln_1p()
}

/// d loss / d logit.
pub fn bce_grad(z: f64, label: f64) -> f64 {
    sigmoid(z) - label
}
