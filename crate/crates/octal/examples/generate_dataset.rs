//! Generate a small labeled corpus, print its statistics, and round-trip it
//! through the JSONL format.
//!
//! Run with: cargo run --release --example generate_dataset

use octal::dataset::{
    corpus_stats, encode_dataset, generate_corpus, load_records, save_records, split, Profile,
};
use octal::graph::{make_dictionary, EncodingScheme, DEFAULT_SIGMA};

fn main() {
    let ds = generate_corpus(Profile::ShortLike, 40, 7).unwrap();
    let stats = corpus_stats(&ds);
    println!(
        "{} samples ({} positive / {} negative)",
        stats.samples, stats.positives, stats.negatives
    );
    println!(
        "formula length {}..{}, states {}..{}, transitions {}..{}",
        stats.formula_len.min,
        stats.formula_len.max,
        stats.states.min,
        stats.states.max,
        stats.transitions.min,
        stats.transitions.max,
    );

    let (train, val) = split(&ds, 0.8, 1);
    println!(
        "split: {} train ({} pos), {} val ({} pos)",
        train.len(),
        train.positives(),
        val.len(),
        val.positives()
    );

    let dict = make_dictionary(0, DEFAULT_SIGMA);
    let records = encode_dataset(&ds, EncodingScheme::Gaussian, false, &dict).unwrap();
    // The wire format rounds floats to 9 significant digits, so stability is
    // checked at the file level: saving what was loaded reproduces the bytes.
    let path = std::env::temp_dir().join("octal_example_dataset.jsonl");
    save_records(&path, &records).unwrap();
    let back = load_records(&path).unwrap();
    let path2 = std::env::temp_dir().join("octal_example_dataset2.jsonl");
    save_records(&path2, &back).unwrap();
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&path2).unwrap()
    );
    println!("round-tripped {} records via {}", back.len(), path.display());
}
