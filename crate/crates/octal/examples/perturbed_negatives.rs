//! Derive hard negatives by dropping a fraction of incidence edges from
//! positive samples, with each new label confirmed by a lost witness word.
//!
//! Run with: cargo run --release --example perturbed_negatives

use octal::dataset::{
    build_perturbation_set, dropped_transitions, generate_corpus, reconstruct_automaton,
    union_graph_of, verify_perturbed_negative, Dataset, Profile,
};
use octal::ltl::eval_on_lasso;

fn main() {
    let ds = generate_corpus(Profile::ShortLike, 20, 9).unwrap();
    let positives = Dataset {
        samples: ds.samples.into_iter().filter(|s| s.label == 1).collect(),
    };
    let pairs = build_perturbation_set(&positives, 0.3, 1).unwrap();
    println!(
        "{} positives -> {} paired samples at p = 0.3",
        positives.len(),
        pairs.len()
    );

    // Walk one pair and re-verify the negative label by hand.
    let (original, perturbed) = (&pairs.samples[0], &pairs.samples[1]);
    let graph = union_graph_of(perturbed).unwrap();
    let dropped = dropped_transitions(&original.automaton, &graph);
    let reduced = reconstruct_automaton(&original.automaton, &graph);
    println!(
        "first pair: automaton {} -> {} transitions ({} dropped)",
        original.automaton.transitions.len(),
        reduced.transitions.len(),
        dropped.len()
    );
    let witness = verify_perturbed_negative(&original.automaton, &reduced, &dropped)
        .expect("emitted pairs are verified");
    assert_eq!(eval_on_lasso(&original.formula, &witness), Ok(true));
    println!(
        "witness word (prefix {}, loop {}) satisfies the formula but was lost",
        witness.prefix.len(),
        witness.looping.len()
    );
}
