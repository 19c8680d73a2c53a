//! Wall-clock comparison of the classical pipeline against the learned
//! checker, split into oracle time, preprocessing overhead (graph build +
//! feature encoding), and inference proper.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::buchi::{check_with, BuchiError, CheckOptions};
use crate::dataset::{encode_sample, Sample};
use crate::graph::{EncodingDictionary, EncodingScheme, GraphError};
use crate::nn::{graph_input, predict, ModelParams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleTiming {
    pub oracle_seconds: f64,
    pub preprocessing_seconds: f64,
    pub inference_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub samples: usize,
    /// Classical pipeline total: negate, translate, product, emptiness.
    pub oracle_seconds: f64,
    /// Union-graph construction plus feature encoding.
    pub preprocessing_seconds: f64,
    /// Forward passes only.
    pub inference_seconds: f64,
    pub speedup_inference_only: f64,
    pub speedup_with_overhead: f64,
    pub per_sample: Vec<SampleTiming>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("oracle failed: {0}")]
    Oracle(#[from] BuchiError),
    #[error("encoding failed: {0}")]
    Encode(#[from] GraphError),
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Time both checkers over the same samples. An empty slice yields an
/// all-zero report.
pub fn run_bench(
    samples: &[Sample],
    params: &ModelParams,
    dict: &EncodingDictionary,
    scheme: EncodingScheme,
    directed: bool,
    opts: &CheckOptions,
) -> Result<BenchReport, BenchError> {
    let mut report = BenchReport {
        samples: samples.len(),
        ..BenchReport::default()
    };
    for s in samples {
        let mut t = SampleTiming::default();

        let start = Instant::now();
        let _ = check_with(&s.automaton, &s.formula, opts)?;
        t.oracle_seconds = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let rec = encode_sample(s, scheme, directed, dict)?;
        let input = graph_input(&rec);
        t.preprocessing_seconds = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let _ = predict(params, &input);
        t.inference_seconds = start.elapsed().as_secs_f64();

        report.oracle_seconds += t.oracle_seconds;
        report.preprocessing_seconds += t.preprocessing_seconds;
        report.inference_seconds += t.inference_seconds;
        report.per_sample.push(t);
    }
    report.speedup_inference_only = ratio(report.oracle_seconds, report.inference_seconds);
    report.speedup_with_overhead = ratio(
        report.oracle_seconds,
        report.inference_seconds + report.preprocessing_seconds,
    );
    Ok(report)
}

pub fn report_to_string(r: &BenchReport) -> String {
    format!(
        "samples                {}\n\
         oracle total           {:.6} s\n\
         preprocessing total    {:.6} s\n\
         inference total        {:.6} s\n\
         speedup (inference)    {:.2}x\n\
         speedup (w/ overhead)  {:.2}x\n",
        r.samples,
        r.oracle_seconds,
        r.preprocessing_seconds,
        r.inference_seconds,
        r.speedup_inference_only,
        r.speedup_with_overhead,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_corpus, Profile};
    use crate::graph::{make_dictionary, DEFAULT_SIGMA};
    use crate::nn::{Descriptor, Variant};

    #[test]
    fn empty_dataset_zeroed() {
        let dict = make_dictionary(0, DEFAULT_SIGMA);
        let params = ModelParams::init(Descriptor::new(Variant::Gin, 64), 1);
        let r = run_bench(
            &[],
            &params,
            &dict,
            EncodingScheme::Gaussian,
            false,
            &CheckOptions::default(),
        )
        .unwrap();
        assert_eq!(r, BenchReport::default());
    }

    #[test]
    fn totals_equal_per_sample_sums() {
        let ds = generate_corpus(Profile::ShortLike, 4, 77).unwrap();
        let dict = make_dictionary(0, DEFAULT_SIGMA);
        let params = ModelParams::init(Descriptor::new(Variant::Gin, 64), 1);
        let r = run_bench(
            &ds.samples,
            &params,
            &dict,
            EncodingScheme::Gaussian,
            false,
            &CheckOptions::default(),
        )
        .unwrap();
        assert_eq!(r.samples, 4);
        assert_eq!(r.per_sample.len(), 4);
        let oracle: f64 = r.per_sample.iter().map(|t| t.oracle_seconds).sum();
        let pre: f64 = r.per_sample.iter().map(|t| t.preprocessing_seconds).sum();
        let inf: f64 = r.per_sample.iter().map(|t| t.inference_seconds).sum();
        assert!((r.oracle_seconds - oracle).abs() < 1e-12);
        assert!((r.preprocessing_seconds - pre).abs() < 1e-12);
        assert!((r.inference_seconds - inf).abs() < 1e-12);
        assert!(r.speedup_inference_only > 0.0);
        let text = report_to_string(&r);
        assert!(text.contains("samples                4"));
    }
}
