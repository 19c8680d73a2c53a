use std::fmt;

use super::ast::LtlFormula;

/// Canonical text form with minimal parentheses; `parse_ltl(print_ltl(f))`
/// structurally equals `f`.
pub fn print_ltl(f: &LtlFormula) -> String {
    f.to_string()
}

// Precedence levels used by the printer; higher binds tighter.
const LVL_OR: u8 = 1;
const LVL_AND: u8 = 2;
const LVL_TEMP: u8 = 3;
const LVL_UNARY: u8 = 4;
const LVL_LEAF: u8 = 5;

fn level(f: &LtlFormula) -> u8 {
    use LtlFormula::*;
    match f {
        Atom(_) | True | False => LVL_LEAF,
        Not(_) | Next(_) | Globally(_) | Finally(_) => LVL_UNARY,
        Until(_, _) | Release(_, _) | WeakUntil(_, _) | StrongRelease(_, _) => LVL_TEMP,
        And(_, _) => LVL_AND,
        Or(_, _) => LVL_OR,
    }
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, out)
    }
}

fn write_formula(f: &LtlFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    use LtlFormula::*;
    match f {
        Atom(a) => write!(out, "{a}"),
        True => write!(out, "1"),
        False => write!(out, "0"),
        Not(c) => write_unary(out, '!', c, false),
        Next(c) => write_unary(out, 'X', c, true),
        Globally(c) => write_unary(out, 'G', c, true),
        Finally(c) => write_unary(out, 'F', c, true),
        Until(l, r) => write_binary(out, 'U', LVL_TEMP, l, r),
        Release(l, r) => write_binary(out, 'R', LVL_TEMP, l, r),
        WeakUntil(l, r) => write_binary(out, 'W', LVL_TEMP, l, r),
        StrongRelease(l, r) => write_binary(out, 'M', LVL_TEMP, l, r),
        And(l, r) => write_binary(out, '&', LVL_AND, l, r),
        Or(l, r) => write_binary(out, '|', LVL_OR, l, r),
    }
}

fn write_unary(
    out: &mut fmt::Formatter<'_>,
    op: char,
    child: &LtlFormula,
    space: bool,
) -> fmt::Result {
    if level(child) >= LVL_UNARY {
        if space {
            write!(out, "{op} {child}")
        } else {
            write!(out, "{op}{child}")
        }
    } else {
        write!(out, "{op}({child})")
    }
}

// Right-associative: the left child needs parentheses already at equal level,
// the right child only at strictly lower level.
fn write_binary(
    out: &mut fmt::Formatter<'_>,
    op: char,
    lvl: u8,
    left: &LtlFormula,
    right: &LtlFormula,
) -> fmt::Result {
    if level(left) <= lvl {
        write!(out, "({left})")?;
    } else {
        write!(out, "{left}")?;
    }
    write!(out, " {op} ")?;
    if level(right) < lvl {
        write!(out, "({right})")
    } else {
        write!(out, "{right}")
    }
}

#[cfg(test)]
mod tests {
    use super::super::ast::LtlFormula as F;
    use super::super::parse::parse_ltl;
    use super::*;

    #[test]
    fn paper_examples() {
        assert_eq!(
            print_ltl(&F::until(F::atom('a'), F::not(F::atom('b')))),
            "a U !b"
        );
        assert_eq!(print_ltl(&F::atom('a')), "a");
        assert_eq!(
            print_ltl(&F::or(F::not(F::atom('a')), F::atom('b'))),
            "!a | b"
        );
    }

    #[test]
    fn minimal_parentheses_keep_structure() {
        // Left-nested temporal needs parentheses, right-nested does not.
        let left = F::until(F::until(F::atom('a'), F::atom('b')), F::atom('c'));
        assert_eq!(print_ltl(&left), "(a U b) U c");
        let right = F::until(F::atom('a'), F::until(F::atom('b'), F::atom('c')));
        assert_eq!(print_ltl(&right), "a U b U c");
        // Mixed-kind same-level operators still need parentheses on the left.
        let mixed = F::until(F::release(F::atom('a'), F::atom('b')), F::atom('c'));
        assert_eq!(print_ltl(&mixed), "(a R b) U c");
    }

    #[test]
    fn round_trip_hand_cases() {
        for text in [
            "a U !b",
            "(a | b) & c",
            "G(a U b)",
            "!(a & b) W X c",
            "F G a | 0 M b",
            "X X a & 1",
        ] {
            let f = parse_ltl(text).unwrap();
            assert_eq!(parse_ltl(&print_ltl(&f)).unwrap(), f, "{text}");
        }
    }
}
