//! Parse formulas, rewrite them, and evaluate them on lasso words.
//!
//! Run with: cargo run --example parse_and_evaluate

use std::collections::BTreeMap;

use octal::ltl::{eval_on_lasso, parse_ltl, to_core, to_nnf, Lasso};

fn step(pairs: &[(char, bool)]) -> BTreeMap<char, bool> {
    pairs.iter().copied().collect()
}

fn main() {
    for text in ["a U b", "G(a | F b)", "!(a U b)", "X a W b", "a M b"] {
        let f = parse_ltl(text).unwrap();
        println!("{text:12} parsed {f}");
        println!("{:12} nnf    {}", "", to_nnf(&f));
        println!("{:12} core   {}", "", to_core(&to_nnf(&f)));
    }

    // a holds until b fires, then anything goes.
    let f = parse_ltl("a U b").unwrap();
    let word = Lasso {
        prefix: vec![step(&[('a', true), ('b', false)])],
        looping: vec![step(&[('a', false), ('b', true)])],
    };
    println!(
        "\n{} on a,!b ; (!a,b)^w -> {}",
        f,
        eval_on_lasso(&f, &word).unwrap()
    );

    let never = Lasso {
        prefix: vec![],
        looping: vec![step(&[('a', true), ('b', false)])],
    };
    println!(
        "{} on (a,!b)^w      -> {}",
        f,
        eval_on_lasso(&f, &never).unwrap()
    );
}
