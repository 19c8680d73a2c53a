//! One-vs-many ranking: score one satisfied formula against fifty violated
//! candidates per automaton and report MRR / Hits@K.
//!
//! Run with: cargo run --release --example rank_candidates

use octal::dataset::{build_ranking_groups, encode_ranking_group};
use octal::graph::{make_dictionary, EncodingScheme, DEFAULT_SIGMA};
use octal::nn::{evaluate_ranking, Descriptor, ModelParams, Variant};

fn main() {
    let groups = build_ranking_groups(5, 11).unwrap();
    println!(
        "built {} groups of 1 positive + {} negatives each",
        groups.len(),
        groups[0].negatives.len()
    );

    let dict = make_dictionary(0, DEFAULT_SIGMA);
    let encoded: Vec<_> = groups
        .iter()
        .map(|g| encode_ranking_group(g, EncodingScheme::Gaussian, false, &dict).unwrap())
        .collect();

    // An untrained model ranks near-randomly; train_classifier shows how to
    // get a real one.
    let params = ModelParams::init(Descriptor::new(Variant::Gin, 64), 1);
    let metrics = evaluate_ranking(&params, &encoded).unwrap();
    println!("untrained GIN: MRR {:.3}", metrics.mrr);
    for (k, h) in &metrics.hits_at_k {
        println!("  Hits@{k} {h:.3}");
    }
}
