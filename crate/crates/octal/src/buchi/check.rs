use std::time::{Duration, Instant};

use crate::ltl::{negate, to_core, to_nnf, LtlFormula};

use super::automaton::{BuchiAutomaton, BuchiError, Verdict};
use super::emptiness::is_empty;
use super::product::product;
use super::translate::{translate, DEFAULT_STATE_CAP};

/// Resource limits for one check.
#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub state_cap: usize,
    pub timeout: Option<Duration>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            state_cap: DEFAULT_STATE_CAP,
            timeout: None,
        }
    }
}

/// Classical pipeline: translate the negated specification, intersect with
/// the system, and test emptiness. A present counterexample is a word of the
/// system that falsifies the specification.
pub fn check(b: &BuchiAutomaton, f: &LtlFormula) -> Result<Verdict, BuchiError> {
    check_with(b, f, &CheckOptions::default())
}

pub fn check_with(
    b: &BuchiAutomaton,
    f: &LtlFormula,
    opts: &CheckOptions,
) -> Result<Verdict, BuchiError> {
    let start = Instant::now();
    let neg = translate(&to_core(&negate(&to_nnf(f))), opts.state_cap)?;
    guard(start, opts)?;
    let prod = product(b, &neg, opts.state_cap)?;
    guard(start, opts)?;
    let counterexample = is_empty(&prod);
    Ok(Verdict {
        holds: counterexample.is_none(),
        counterexample,
        explored_states: prod.state_count,
        elapsed: start.elapsed(),
    })
}

fn guard(start: Instant, opts: &CheckOptions) -> Result<(), BuchiError> {
    match opts.timeout {
        Some(limit) if start.elapsed() > limit => Err(BuchiError::Timeout(limit)),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buchi::emptiness::accepts_lasso;
    use crate::ltl::{eval_on_lasso, parse_ltl};

    fn translated(text: &str) -> BuchiAutomaton {
        translate(&to_core(&to_nnf(&parse_ltl(text).unwrap())), 10_000).unwrap()
    }

    #[test]
    fn until_automaton_satisfies_until() {
        let b = translated("a U b");
        let v = check(&b, &parse_ltl("a U b").unwrap()).unwrap();
        assert!(v.holds);
        assert!(v.counterexample.is_none());
    }

    #[test]
    fn anything_satisfies_true() {
        for system in ["a U b", "G a", "F(a & X b)"] {
            let b = translated(system);
            assert!(check(&b, &parse_ltl("1").unwrap()).unwrap().holds);
        }
    }

    #[test]
    fn counterexample_is_verified_by_both_oracles() {
        // b-forever is accepted by the a U b automaton but violates G a.
        let b = translated("a U b");
        let spec = parse_ltl("G a").unwrap();
        let v = check(&b, &spec).unwrap();
        assert!(!v.holds);
        let w = v.counterexample.expect("failing check carries a witness");
        assert!(accepts_lasso(&b, &w).unwrap());
        assert!(!eval_on_lasso(&spec, &w).unwrap());
    }

    #[test]
    fn cap_surfaces_as_resource_error() {
        let b = translated("a U b");
        let opts = CheckOptions {
            state_cap: 1,
            timeout: None,
        };
        assert!(matches!(
            check_with(&b, &parse_ltl("(a U b) & (b U a)").unwrap(), &opts),
            Err(BuchiError::StateCapExceeded { .. })
        ));
    }
}
