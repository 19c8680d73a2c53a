//! Time the classical oracle against the learned checker on one corpus.
//!
//! Run with: cargo run --release --example benchmark_speed

use octal::bench::{report_to_string, run_bench};
use octal::buchi::CheckOptions;
use octal::dataset::{generate_corpus, Profile};
use octal::graph::{make_dictionary, EncodingScheme, DEFAULT_SIGMA};
use octal::nn::{Descriptor, ModelParams, Variant};

fn main() {
    let ds = generate_corpus(Profile::DiverseLike, 10, 5).unwrap();
    let largest = ds
        .samples
        .iter()
        .map(|s| s.automaton.state_count)
        .max()
        .unwrap();
    println!("10 diverse samples, largest automaton {largest} states");

    let dict = make_dictionary(0, DEFAULT_SIGMA);
    // Timing does not depend on trained weights.
    let params = ModelParams::init(Descriptor::new(Variant::Gin, 64), 1);
    let report = run_bench(
        &ds.samples,
        &params,
        &dict,
        EncodingScheme::Gaussian,
        false,
        &CheckOptions::default(),
    )
    .unwrap();
    print!("{}", report_to_string(&report));
}
