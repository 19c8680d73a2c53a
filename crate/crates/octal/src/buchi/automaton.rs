use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::ltl::{Assignment, Lasso};

/// Conjunction of literals guarding a transition; the empty cube is true (`1`).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    literals: BTreeMap<char, bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CubeError {
    #[error("contradictory cube: both {0} and !{0}")]
    Contradiction(char),
}

impl Cube {
    pub fn top() -> Self {
        Cube::default()
    }

    pub fn from_literals(
        literals: impl IntoIterator<Item = (char, bool)>,
    ) -> Result<Self, CubeError> {
        let mut cube = Cube::top();
        for (atom, polarity) in literals {
            cube.insert(atom, polarity)?;
        }
        Ok(cube)
    }

    pub fn insert(&mut self, atom: char, polarity: bool) -> Result<(), CubeError> {
        match self.literals.insert(atom, polarity) {
            Some(prev) if prev != polarity => Err(CubeError::Contradiction(atom)),
            _ => Ok(()),
        }
    }

    pub fn is_top(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn literals(&self) -> impl Iterator<Item = (char, bool)> + '_ {
        self.literals.iter().map(|(&a, &p)| (a, p))
    }

    pub fn atoms(&self) -> impl Iterator<Item = char> + '_ {
        self.literals.keys().copied()
    }

    pub fn mentions(&self, atom: char) -> bool {
        self.literals.contains_key(&atom)
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// True iff every literal agrees with the assignment. Atoms missing from
    /// the assignment are an error at the call sites that care; here the cube
    /// only reads atoms it mentions.
    pub fn satisfied_by(&self, assignment: &Assignment) -> Option<bool> {
        for (atom, polarity) in self.literals.iter() {
            match assignment.get(atom) {
                Some(v) if v == polarity => {}
                Some(_) => return Some(false),
                None => return None,
            }
        }
        Some(true)
    }

    /// Conjunction of two cubes, absent when they clash on some atom.
    pub fn join(&self, other: &Cube) -> Option<Cube> {
        let mut out = self.clone();
        for (atom, polarity) in other.literals() {
            if out.insert(atom, polarity).is_err() {
                return None;
            }
        }
        Some(out)
    }

    /// Concrete assignment over `universe`; atoms the cube leaves unset
    /// default to false.
    pub fn concretize(&self, universe: &BTreeSet<char>) -> Assignment {
        universe
            .iter()
            .map(|&a| (a, self.literals.get(&a).copied().unwrap_or(false)))
            .collect()
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return write!(out, "1");
        }
        let mut first = true;
        for (atom, polarity) in self.literals.iter() {
            if !first {
                write!(out, "&")?;
            }
            first = false;
            if !polarity {
                write!(out, "!")?;
            }
            write!(out, "{atom}")?;
        }
        Ok(())
    }
}

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub src: StateId,
    pub label: Cube,
    pub dst: StateId,
}

/// Nondeterministic Büchi automaton with cube-labeled transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    pub state_count: usize,
    pub initial: StateId,
    pub accepting: BTreeSet<StateId>,
    pub transitions: Vec<Transition>,
    pub atom_universe: BTreeSet<char>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuchiError {
    #[error("state cap of {cap} states exceeded")]
    StateCapExceeded { cap: usize },
    #[error("check timed out after {0:?}")]
    Timeout(Duration),
    #[error("formula is not in core negation normal form")]
    NotCoreNnf,
    #[error("atom '{0}' not declared in the word")]
    UndeclaredAtom(char),
}

impl BuchiAutomaton {
    /// One accepting state with a true self-loop: accepts every word.
    pub fn universal() -> Self {
        BuchiAutomaton {
            state_count: 1,
            initial: 0,
            accepting: BTreeSet::from([0]),
            transitions: vec![Transition {
                src: 0,
                label: Cube::top(),
                dst: 0,
            }],
            atom_universe: BTreeSet::new(),
        }
    }

    /// One non-accepting sink with no transitions: accepts nothing.
    pub fn empty_language() -> Self {
        BuchiAutomaton {
            state_count: 1,
            initial: 0,
            accepting: BTreeSet::new(),
            transitions: Vec::new(),
            atom_universe: BTreeSet::new(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.initial >= self.state_count {
            return Err(format!(
                "initial state {} out of range 0..{}",
                self.initial, self.state_count
            ));
        }
        if let Some(&s) = self.accepting.iter().find(|&&s| s >= self.state_count) {
            return Err(format!("accepting state {s} out of range"));
        }
        for t in &self.transitions {
            if t.src >= self.state_count || t.dst >= self.state_count {
                return Err(format!("transition {} -> {} out of range", t.src, t.dst));
            }
        }
        Ok(())
    }

    pub fn outgoing(&self, state: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.transitions.iter().filter(move |t| t.src == state)
    }

    /// Adjacency list of transition indices per source state.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.state_count];
        for (i, t) in self.transitions.iter().enumerate() {
            adj[t.src].push(i);
        }
        adj
    }
}

/// Outcome of one model-checking query.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub holds: bool,
    pub counterexample: Option<Lasso>,
    pub explored_states: usize,
    pub elapsed: Duration,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_display_and_contradiction() {
        assert_eq!(Cube::top().to_string(), "1");
        let cube = Cube::from_literals([('b', false), ('a', true)]).unwrap();
        assert_eq!(cube.to_string(), "a&!b");
        assert_eq!(
            Cube::from_literals([('a', true), ('a', false)]),
            Err(CubeError::Contradiction('a'))
        );
    }

    #[test]
    fn join_detects_clash() {
        let a = Cube::from_literals([('a', true)]).unwrap();
        let not_a = Cube::from_literals([('a', false)]).unwrap();
        let b = Cube::from_literals([('b', true)]).unwrap();
        assert!(a.join(&not_a).is_none());
        assert_eq!(a.join(&b).unwrap().to_string(), "a&b");
        assert_eq!(a.join(&a).unwrap(), a);
    }

    #[test]
    fn concretize_defaults_to_false() {
        let cube = Cube::from_literals([('a', true)]).unwrap();
        let universe = BTreeSet::from(['a', 'b']);
        let asg = cube.concretize(&universe);
        assert_eq!(asg[&'a'], true);
        assert_eq!(asg[&'b'], false);
    }
}
