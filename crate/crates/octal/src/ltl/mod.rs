//! LTL abstract syntax, parsing and printing, normal-form rewriting, random
//! formula generation, and exact semantics on ultimately periodic words.

mod ast;
mod gen;
mod lasso;
mod parse;
mod print;
mod rewrite;

pub use ast::LtlFormula;
pub use gen::{random_ltl, GenConfig};
pub use lasso::{eval_on_lasso, Assignment, Lasso, LassoError};
pub use parse::{parse_ltl, ParseError};
pub use print::print_ltl;
pub use rewrite::{negate, to_core, to_nnf};
