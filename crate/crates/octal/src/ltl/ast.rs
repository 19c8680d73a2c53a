use std::collections::BTreeSet;

/// Recursive LTL formula over the lowercase atom alphabet `a..z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LtlFormula {
    Atom(char),
    True,
    False,
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Globally(Box<LtlFormula>),
    Finally(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    Release(Box<LtlFormula>, Box<LtlFormula>),
    WeakUntil(Box<LtlFormula>, Box<LtlFormula>),
    StrongRelease(Box<LtlFormula>, Box<LtlFormula>),
}

impl LtlFormula {
    pub fn atom(c: char) -> Self {
        debug_assert!(c.is_ascii_lowercase());
        LtlFormula::Atom(c)
    }

    pub fn not(f: LtlFormula) -> Self {
        LtlFormula::Not(Box::new(f))
    }

    pub fn and(l: LtlFormula, r: LtlFormula) -> Self {
        LtlFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: LtlFormula, r: LtlFormula) -> Self {
        LtlFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn next(f: LtlFormula) -> Self {
        LtlFormula::Next(Box::new(f))
    }

    pub fn globally(f: LtlFormula) -> Self {
        LtlFormula::Globally(Box::new(f))
    }

    pub fn finally(f: LtlFormula) -> Self {
        LtlFormula::Finally(Box::new(f))
    }

    pub fn until(l: LtlFormula, r: LtlFormula) -> Self {
        LtlFormula::Until(Box::new(l), Box::new(r))
    }

    pub fn release(l: LtlFormula, r: LtlFormula) -> Self {
        LtlFormula::Release(Box::new(l), Box::new(r))
    }

    pub fn weak_until(l: LtlFormula, r: LtlFormula) -> Self {
        LtlFormula::WeakUntil(Box::new(l), Box::new(r))
    }

    pub fn strong_release(l: LtlFormula, r: LtlFormula) -> Self {
        LtlFormula::StrongRelease(Box::new(l), Box::new(r))
    }

    /// Number of nodes in the expression tree.
    pub fn size(&self) -> usize {
        use LtlFormula::*;
        match self {
            Atom(_) | True | False => 1,
            Not(c) | Next(c) | Globally(c) | Finally(c) => 1 + c.size(),
            And(l, r) | Or(l, r) | Until(l, r) | Release(l, r) | WeakUntil(l, r)
            | StrongRelease(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Set of atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<char> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<char>) {
        use LtlFormula::*;
        match self {
            Atom(a) => {
                out.insert(*a);
            }
            True | False => {}
            Not(c) | Next(c) | Globally(c) | Finally(c) => c.collect_atoms(out),
            And(l, r) | Or(l, r) | Until(l, r) | Release(l, r) | WeakUntil(l, r)
            | StrongRelease(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Negation appears only directly above atoms.
    pub fn is_nnf(&self) -> bool {
        use LtlFormula::*;
        match self {
            Atom(_) | True | False => true,
            Not(c) => matches!(**c, Atom(_)),
            Next(c) | Globally(c) | Finally(c) => c.is_nnf(),
            And(l, r) | Or(l, r) | Until(l, r) | Release(l, r) | WeakUntil(l, r)
            | StrongRelease(l, r) => l.is_nnf() && r.is_nnf(),
        }
    }

    /// NNF restricted to the core operator set {literals, constants, And, Or, X, U, R}.
    pub fn is_core(&self) -> bool {
        use LtlFormula::*;
        match self {
            Atom(_) | True | False => true,
            Not(c) => matches!(**c, Atom(_)),
            Next(c) => c.is_core(),
            And(l, r) | Or(l, r) | Until(l, r) | Release(l, r) => l.is_core() && r.is_core(),
            Globally(_) | Finally(_) | WeakUntil(_, _) | StrongRelease(_, _) => false,
        }
    }
}
