//! Büchi automata: representation, LTL translation, product, emptiness with
//! counterexample extraction, lasso membership, and text serialization.

mod automaton;
mod check;
mod emptiness;
mod format;
mod product;
mod translate;

pub use automaton::{BuchiAutomaton, BuchiError, Cube, CubeError, StateId, Transition, Verdict};
pub use check::{check, check_with, CheckOptions};
pub use emptiness::{accepts_lasso, is_empty};
pub use format::{read_automaton, write_automaton, FormatError};
pub use product::product;
pub use translate::{translate, DEFAULT_STATE_CAP};
