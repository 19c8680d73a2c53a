use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::LtlFormula;

/// Truth assignment to a finite atom set at one word position.
pub type Assignment = BTreeMap<char, bool>;

/// Ultimately periodic infinite word `prefix . loop^omega`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<Assignment>,
    pub looping: Vec<Assignment>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LassoError {
    #[error("loop must be nonempty")]
    EmptyLoop,
    #[error("atom '{0}' not declared in the word")]
    UndeclaredAtom(char),
}

impl Lasso {
    pub fn new(prefix: Vec<Assignment>, looping: Vec<Assignment>) -> Result<Self, LassoError> {
        if looping.is_empty() {
            return Err(LassoError::EmptyLoop);
        }
        Ok(Lasso { prefix, looping })
    }

    /// Total number of distinct suffix classes.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.looping.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a lasso always denotes an infinite word
    }

    pub fn assignment(&self, pos: usize) -> &Assignment {
        if pos < self.prefix.len() {
            &self.prefix[pos]
        } else {
            &self.looping[pos - self.prefix.len()]
        }
    }

    /// Successor position; the last loop position wraps to the loop start.
    pub fn next(&self, pos: usize) -> usize {
        if pos + 1 < self.len() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }

    /// Rotate the loop by one, moving its first letter onto the prefix.
    /// The resulting lasso denotes the same infinite word.
    pub fn rotated(&self) -> Lasso {
        let mut prefix = self.prefix.clone();
        let mut looping = self.looping.clone();
        let head = looping.remove(0);
        prefix.push(head.clone());
        looping.push(head);
        Lasso { prefix, looping }
    }
}

/// Exact LTL truth value of `f` at position 0 of `w`.
///
/// Each subformula is tabulated over the `|prefix| + |loop|` suffix classes;
/// U/R/W/M use a fixpoint over the loop positions followed by a backward pass
/// through the prefix.
pub fn eval_on_lasso(f: &LtlFormula, w: &Lasso) -> Result<bool, LassoError> {
    Ok(eval_table(f, w)?[0])
}

fn eval_table(f: &LtlFormula, w: &Lasso) -> Result<Vec<bool>, LassoError> {
    use LtlFormula::*;
    let n = w.len();
    match f {
        True => Ok(vec![true; n]),
        False => Ok(vec![false; n]),
        Atom(a) => (0..n)
            .map(|i| {
                w.assignment(i)
                    .get(a)
                    .copied()
                    .ok_or(LassoError::UndeclaredAtom(*a))
            })
            .collect(),
        Not(c) => {
            let mut t = eval_table(c, w)?;
            t.iter_mut().for_each(|v| *v = !*v);
            Ok(t)
        }
        And(l, r) => {
            let (a, b) = (eval_table(l, w)?, eval_table(r, w)?);
            Ok((0..n).map(|i| a[i] && b[i]).collect())
        }
        Or(l, r) => {
            let (a, b) = (eval_table(l, w)?, eval_table(r, w)?);
            Ok((0..n).map(|i| a[i] || b[i]).collect())
        }
        Next(c) => {
            let t = eval_table(c, w)?;
            Ok((0..n).map(|i| t[w.next(i)]).collect())
        }
        Finally(c) => {
            let t = eval_table(c, w)?;
            Ok(fixpoint(w, false, |i, nx| t[i] || nx))
        }
        Globally(c) => {
            let t = eval_table(c, w)?;
            Ok(fixpoint(w, true, |i, nx| t[i] && nx))
        }
        Until(l, r) => {
            let (a, b) = (eval_table(l, w)?, eval_table(r, w)?);
            Ok(fixpoint(w, false, |i, nx| b[i] || (a[i] && nx)))
        }
        WeakUntil(l, r) => {
            let (a, b) = (eval_table(l, w)?, eval_table(r, w)?);
            Ok(fixpoint(w, true, |i, nx| b[i] || (a[i] && nx)))
        }
        Release(l, r) => {
            let (a, b) = (eval_table(l, w)?, eval_table(r, w)?);
            Ok(fixpoint(w, true, |i, nx| b[i] && (a[i] || nx)))
        }
        StrongRelease(l, r) => {
            let (a, b) = (eval_table(l, w)?, eval_table(r, w)?);
            Ok(fixpoint(w, false, |i, nx| b[i] && (a[i] || nx)))
        }
    }
}

// Solve val[i] = step(i, val[next(i)]) with a least (init=false) or greatest
// (init=true) fixpoint on the loop, then a backward pass through the prefix.
fn fixpoint(w: &Lasso, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = w.len();
    let p = w.prefix.len();
    let mut val = vec![init; n];
    // Loop positions: iterate to a fixpoint; |loop| sweeps always suffice.
    loop {
        let mut changed = false;
        for i in (p..n).rev() {
            let v = step(i, val[w.next(i)]);
            if v != val[i] {
                val[i] = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for i in (0..p).rev() {
        val[i] = step(i, val[i + 1]);
    }
    val
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_ltl;
    use super::*;

    pub(crate) fn asg(pairs: &[(char, bool)]) -> Assignment {
        pairs.iter().copied().collect()
    }

    fn ev(text: &str, prefix: Vec<Assignment>, looping: Vec<Assignment>) -> bool {
        let f = parse_ltl(text).unwrap();
        let w = Lasso::new(prefix, looping).unwrap();
        eval_on_lasso(&f, &w).unwrap()
    }

    #[test]
    fn until_over_two_suffix_classes() {
        // a holds in the prefix letter, b holds forever after.
        assert!(ev(
            "a U b",
            vec![asg(&[('a', true), ('b', false)])],
            vec![asg(&[('a', false), ('b', true)])]
        ));
    }

    #[test]
    fn globally_on_constant_word() {
        assert!(ev("G a", vec![], vec![asg(&[('a', true)])]));
        assert!(!ev("G a", vec![], vec![asg(&[('a', true)]), asg(&[('a', false)])]));
    }

    #[test]
    fn next_reads_position_one() {
        assert!(!ev(
            "X a",
            vec![asg(&[('a', true)])],
            vec![asg(&[('a', false)])]
        ));
        assert!(ev(
            "X a",
            vec![asg(&[('a', false)])],
            vec![asg(&[('a', true)])]
        ));
    }

    #[test]
    fn weak_until_differs_from_until_on_global_words() {
        let a_forever = (vec![], vec![asg(&[('a', true), ('b', false)])]);
        assert!(!ev("a U b", a_forever.0.clone(), a_forever.1.clone()));
        assert!(ev("a W b", a_forever.0, a_forever.1));
    }

    #[test]
    fn strong_release_needs_the_release_event() {
        let b_forever = (vec![], vec![asg(&[('a', false), ('b', true)])]);
        assert!(ev("a R b", b_forever.0.clone(), b_forever.1.clone()));
        assert!(!ev("a M b", b_forever.0, b_forever.1));
    }

    #[test]
    fn undeclared_atom_is_an_error() {
        let f = parse_ltl("a U c").unwrap();
        let w = Lasso::new(vec![], vec![asg(&[('a', true)])]).unwrap();
        assert_eq!(eval_on_lasso(&f, &w), Err(LassoError::UndeclaredAtom('c')));
    }

    #[test]
    fn empty_loop_rejected() {
        assert_eq!(Lasso::new(vec![], vec![]), Err(LassoError::EmptyLoop));
    }
}
