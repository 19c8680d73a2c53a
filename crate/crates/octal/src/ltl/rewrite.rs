use super::ast::LtlFormula;

/// Push negations down to the atoms via operator duality.
pub fn to_nnf(f: &LtlFormula) -> LtlFormula {
    use LtlFormula::*;
    match f {
        Atom(_) | True | False => f.clone(),
        Not(c) => negate_nnf(c),
        And(l, r) => LtlFormula::and(to_nnf(l), to_nnf(r)),
        Or(l, r) => LtlFormula::or(to_nnf(l), to_nnf(r)),
        Next(c) => LtlFormula::next(to_nnf(c)),
        Globally(c) => LtlFormula::globally(to_nnf(c)),
        Finally(c) => LtlFormula::finally(to_nnf(c)),
        Until(l, r) => LtlFormula::until(to_nnf(l), to_nnf(r)),
        Release(l, r) => LtlFormula::release(to_nnf(l), to_nnf(r)),
        WeakUntil(l, r) => LtlFormula::weak_until(to_nnf(l), to_nnf(r)),
        StrongRelease(l, r) => LtlFormula::strong_release(to_nnf(l), to_nnf(r)),
    }
}

// NNF of the negation of `f`.
fn negate_nnf(f: &LtlFormula) -> LtlFormula {
    use LtlFormula::*;
    match f {
        Atom(_) => LtlFormula::not(f.clone()),
        True => False,
        False => True,
        Not(c) => to_nnf(c),
        And(l, r) => LtlFormula::or(negate_nnf(l), negate_nnf(r)),
        Or(l, r) => LtlFormula::and(negate_nnf(l), negate_nnf(r)),
        Next(c) => LtlFormula::next(negate_nnf(c)),
        Globally(c) => LtlFormula::finally(negate_nnf(c)),
        Finally(c) => LtlFormula::globally(negate_nnf(c)),
        Until(l, r) => LtlFormula::release(negate_nnf(l), negate_nnf(r)),
        Release(l, r) => LtlFormula::until(negate_nnf(l), negate_nnf(r)),
        WeakUntil(l, r) => LtlFormula::strong_release(negate_nnf(l), negate_nnf(r)),
        StrongRelease(l, r) => LtlFormula::weak_until(negate_nnf(l), negate_nnf(r)),
    }
}

/// NNF of `!f`.
pub fn negate(f: &LtlFormula) -> LtlFormula {
    negate_nnf(f)
}

/// Rewrite an NNF formula into the core operator set
/// {literals, constants, And, Or, X, U, R}:
/// `F a = 1 U a`, `G a = 0 R a`, `a W b = b R (a | b)`, `a M b = b U (a & b)`.
pub fn to_core(f: &LtlFormula) -> LtlFormula {
    use LtlFormula::*;
    debug_assert!(f.is_nnf());
    match f {
        Atom(_) | True | False | Not(_) => f.clone(),
        And(l, r) => LtlFormula::and(to_core(l), to_core(r)),
        Or(l, r) => LtlFormula::or(to_core(l), to_core(r)),
        Next(c) => LtlFormula::next(to_core(c)),
        Finally(c) => LtlFormula::until(True, to_core(c)),
        Globally(c) => LtlFormula::release(False, to_core(c)),
        Until(l, r) => LtlFormula::until(to_core(l), to_core(r)),
        Release(l, r) => LtlFormula::release(to_core(l), to_core(r)),
        WeakUntil(l, r) => {
            let (l, r) = (to_core(l), to_core(r));
            LtlFormula::release(r.clone(), LtlFormula::or(l, r))
        }
        StrongRelease(l, r) => {
            let (l, r) = (to_core(l), to_core(r));
            LtlFormula::until(r.clone(), LtlFormula::and(l, r))
        }
    }
}
