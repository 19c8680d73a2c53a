//! LTL model checking two ways: a classical Büchi-automaton oracle
//! (negate, translate, product, emptiness) and a learned checker that
//! encodes the system and specification as one union graph and classifies
//! it with a graph neural network. Includes the dataset factory and the
//! evaluation harness that validates the learned checker against the oracle.

pub mod bench;
pub mod buchi;
pub mod dataset;
pub mod graph;
pub mod ltl;
pub mod nn;
