//! Finite-difference gate for the hand-written backward passes.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::layers::{bce_grad, bce_with_logit};
use super::model::{backward, forward_train, GraphInput, ModelParams};

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub checked_coordinates: usize,
}

/// Primary step 1e-4, with two finer fallbacks: near zero-variance
/// batch-norm channels the loss curves at the √eps scale and the coarse
/// step leaves the linear regime, while very fine steps lose digits to
/// cancellation elsewhere. A coordinate passes if any step agrees.
const FD_STEPS: [f64; 3] = [1e-4, 1e-5, 1e-6];
pub const GRAD_TOLERANCE: f64 = 1e-3;

fn loss_at(params: &ModelParams, input: &GraphInput) -> f64 {
    // Training path (batch statistics), dropout off, so the loss is a
    // deterministic differentiable function of the parameters.
    let (logit, _) = forward_train(params, input, None);
    bce_with_logit(logit, input.label as f64)
}

/// Compare the analytic gradient against central finite differences on a
/// random subset of up to 100 coordinates.
pub fn grad_check(params: &ModelParams, input: &GraphInput, seed: u64) -> GradCheckReport {
    let (logit, cache) = forward_train(params, input, None);
    let analytic = backward(params, input, &cache, bce_grad(logit, input.label as f64)).flatten();
    let flat = params.flatten();
    let mut coords: Vec<usize> = (0..flat.len()).collect();
    coords.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    coords.truncate(100);
    let mut max_relative_error: f64 = 0.0;
    let mut probe = params.clone();
    for &i in &coords {
        let mut best = f64::INFINITY;
        for step in FD_STEPS {
            let mut plus = flat.clone();
            plus[i] += step;
            probe.assign_from_flat(&plus);
            let up = loss_at(&probe, input);
            let mut minus = flat.clone();
            minus[i] -= step;
            probe.assign_from_flat(&minus);
            let down = loss_at(&probe, input);
            let numeric = (up - down) / (2.0 * step);
            let denom = analytic[i].abs().max(numeric.abs()).max(1e-8);
            best = best.min((analytic[i] - numeric).abs() / denom);
        }
        max_relative_error = max_relative_error.max(best);
    }
    GradCheckReport {
        max_relative_error,
        checked_coordinates: coords.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::model::{Descriptor, ModelParams, Variant};
    use super::*;

    // Small graphs keep pre-activations clear of rectifier kinks, which the
    // centred difference cannot cross cleanly at a fixed step.
    fn small_inputs() -> Vec<GraphInput> {
        use crate::buchi::{translate, BuchiAutomaton, DEFAULT_STATE_CAP};
        use crate::dataset::{encode_sample, Sample};
        use crate::graph::{make_dictionary, EncodingScheme, DEFAULT_SIGMA};
        use crate::ltl::{parse_ltl, to_core, to_nnf};
        let dict = make_dictionary(0, DEFAULT_SIGMA);
        let f = parse_ltl("a U b").unwrap();
        let until = translate(&to_core(&to_nnf(&f)), DEFAULT_STATE_CAP).unwrap();
        let samples = [
            // 5-node union graph: universal 2-node system + 3-node tree.
            Sample {
                automaton: BuchiAutomaton::universal(),
                formula: f.clone(),
                label: 0,
                seed: 0,
                perturbation: None,
            },
            Sample {
                automaton: until,
                formula: f,
                label: 1,
                seed: 1,
                perturbation: None,
            },
        ];
        samples
            .iter()
            .map(|s| {
                super::super::model::graph_input(
                    &encode_sample(s, EncodingScheme::Gaussian, false, &dict).unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let inputs = small_inputs();
        for variant in [
            Variant::Gin,
            Variant::Gcn,
            Variant::MlpBaseline,
            Variant::LinkPredictor,
        ] {
            let desc = Descriptor::new(variant, inputs[0].x.ncols());
            let params = ModelParams::init(desc, 11);
            for (i, input) in inputs.iter().enumerate() {
                let report = grad_check(&params, input, 1000 + i as u64);
                assert!(
                    report.max_relative_error < GRAD_TOLERANCE,
                    "{variant:?}: relative error {}",
                    report.max_relative_error
                );
            }
        }
    }

    #[test]
    fn zero_model_has_zero_weight_gradients_matching() {
        let inputs = small_inputs();
        let desc = Descriptor::new(Variant::Gin, inputs[0].x.ncols());
        let mut params = ModelParams::init(desc, 1);
        let zeros = vec![0.0; params.trainable_len()];
        params.assign_from_flat(&zeros);
        let report = grad_check(&params, &inputs[0], 3);
        assert!(report.max_relative_error < GRAD_TOLERANCE);
    }
}
