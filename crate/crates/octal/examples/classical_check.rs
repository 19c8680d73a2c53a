//! The classical pipeline: translate a formula to a Büchi automaton, check a
//! system against specifications, and print any counterexample lasso.
//!
//! Run with: cargo run --example classical_check

use octal::buchi::{accepts_lasso, check, translate, DEFAULT_STATE_CAP};
use octal::ltl::{eval_on_lasso, parse_ltl, to_core, to_nnf};

fn main() {
    // The system under test is itself an automaton: here, all behaviors of
    // "a until b".
    let f = parse_ltl("a U b").unwrap();
    let system = translate(&to_core(&to_nnf(&f)), DEFAULT_STATE_CAP).unwrap();
    println!(
        "system: {} states, {} transitions",
        system.state_count,
        system.transitions.len()
    );

    for spec in ["F b", "1", "G a", "b R (a | b)"] {
        let g = parse_ltl(spec).unwrap();
        let verdict = check(&system, &g).unwrap();
        print!("{spec:12} -> {}", if verdict.holds { "holds" } else { "fails" });
        if let Some(w) = &verdict.counterexample {
            // Cross-check the counterexample with both semantics.
            assert_eq!(accepts_lasso(&system, w), Ok(true));
            assert_eq!(eval_on_lasso(&g, w), Ok(false));
            print!("  (counterexample verified, loop length {})", w.looping.len());
        }
        println!();
    }
}
