//! Build the union graph of an automaton and a formula, then encode node
//! features.
//!
//! Run with: cargo run --example union_graph_features

use octal::buchi::{translate, DEFAULT_STATE_CAP};
use octal::graph::{
    build_spec_tree, build_system_graph, build_union, encode_features, make_dictionary,
    EdgeKind, EncodingScheme, DEFAULT_SIGMA,
};
use octal::ltl::{parse_ltl, to_core, to_nnf};

fn main() {
    let f = parse_ltl("G(a | F b)").unwrap();
    let automaton = translate(&to_core(&to_nnf(&f)), DEFAULT_STATE_CAP).unwrap();

    let system = build_system_graph(&automaton);
    let tree = build_spec_tree(&to_nnf(&f)).unwrap();
    let union = build_union(&system, &tree);

    println!("system graph: {} nodes", system.node_count());
    println!("spec tree:    {} nodes", tree.node_count());
    println!(
        "union graph:  {} nodes, {} incidence + {} tree + {} union edges",
        union.node_count(),
        union.count_edges(EdgeKind::Incidence),
        union.count_edges(EdgeKind::Tree),
        union.count_edges(EdgeKind::Union),
    );

    let dict = make_dictionary(0, DEFAULT_SIGMA);
    let rows = encode_features(&union, EncodingScheme::Gaussian, false, &dict).unwrap();
    println!("feature matrix: {} x {}", rows.nrows(), rows.ncols());

    // Rows are sparse: only a handful of the 64 columns are populated.
    let nonzero = rows.row(0).iter().filter(|v| **v != 0.0).count();
    println!("first row has {nonzero} nonzero entries");
}
