use std::collections::BTreeSet;

use thiserror::Error;

use super::automaton::{BuchiAutomaton, Cube, Transition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: malformed header, expected {expected}")]
    MalformedHeader { line: usize, expected: &'static str },
    #[error("line {line}: dangling state id {id}")]
    DanglingState { line: usize, id: usize },
    #[error("line {line}: malformed transition")]
    MalformedTransition { line: usize },
    #[error("line {line}: bad cube {text:?}")]
    BadCube { line: usize, text: String },
    #[error("line {line}: contradictory cube {text:?}")]
    ContradictoryCube { line: usize, text: String },
}

/// Canonical line-oriented text form.
///
/// ```text
/// states <n>
/// initial <id>
/// accepting <id> <id> ...
/// <src> -> <dst> : <cube>
/// ```
///
/// Cubes are `1` or `&`-joined literals; `#` starts a comment. Transitions
/// are emitted sorted by (src, dst, cube text).
pub fn write_automaton(b: &BuchiAutomaton) -> String {
    let mut out = String::new();
    out.push_str(&format!("states {}\n", b.state_count));
    out.push_str(&format!("initial {}\n", b.initial));
    out.push_str("accepting");
    for q in &b.accepting {
        out.push_str(&format!(" {q}"));
    }
    out.push('\n');
    let mut rows: Vec<(usize, usize, String)> = b
        .transitions
        .iter()
        .map(|t| (t.src, t.dst, t.label.to_string()))
        .collect();
    rows.sort();
    rows.dedup();
    for (src, dst, cube) in rows {
        out.push_str(&format!("{src} -> {dst} : {cube}\n"));
    }
    out
}

pub fn read_automaton(text: &str) -> Result<BuchiAutomaton, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, header) = lines.next().ok_or(FormatError::MalformedHeader {
        line: 1,
        expected: "states <n>",
    })?;
    let state_count = parse_header(header, "states", line, "states <n>")?;

    let (line, header) = lines.next().ok_or(FormatError::MalformedHeader {
        line,
        expected: "initial <id>",
    })?;
    let initial = parse_header(header, "initial", line, "initial <id>")?;
    if initial >= state_count {
        return Err(FormatError::DanglingState { line, id: initial });
    }

    let (line, header) = lines.next().ok_or(FormatError::MalformedHeader {
        line,
        expected: "accepting ...",
    })?;
    let rest = header
        .strip_prefix("accepting")
        .ok_or(FormatError::MalformedHeader {
            line,
            expected: "accepting ...",
        })?;
    let mut accepting = BTreeSet::new();
    for tok in rest.split_whitespace() {
        let id: usize = tok.parse().map_err(|_| FormatError::MalformedHeader {
            line,
            expected: "accepting <id> <id> ...",
        })?;
        if id >= state_count {
            return Err(FormatError::DanglingState { line, id });
        }
        accepting.insert(id);
    }

    let mut transitions = Vec::new();
    let mut atom_universe = BTreeSet::new();
    for (line, row) in lines {
        let (endpoints, cube_text) = row
            .split_once(':')
            .ok_or(FormatError::MalformedTransition { line })?;
        let (src_text, dst_text) = endpoints
            .split_once("->")
            .ok_or(FormatError::MalformedTransition { line })?;
        let src: usize = src_text
            .trim()
            .parse()
            .map_err(|_| FormatError::MalformedTransition { line })?;
        let dst: usize = dst_text
            .trim()
            .parse()
            .map_err(|_| FormatError::MalformedTransition { line })?;
        for (id, v) in [(src, src), (dst, dst)] {
            if v >= state_count {
                return Err(FormatError::DanglingState { line, id });
            }
        }
        let label = parse_cube(cube_text.trim(), line)?;
        atom_universe.extend(label.atoms());
        transitions.push(Transition { src, label, dst });
    }

    let b = BuchiAutomaton {
        state_count,
        initial,
        accepting,
        transitions,
        atom_universe,
    };
    debug_assert!(b.validate().is_ok());
    Ok(b)
}

fn parse_header(
    text: &str,
    keyword: &str,
    line: usize,
    expected: &'static str,
) -> Result<usize, FormatError> {
    text.strip_prefix(keyword)
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or(FormatError::MalformedHeader { line, expected })
}

fn parse_cube(text: &str, line: usize) -> Result<Cube, FormatError> {
    if text == "1" {
        return Ok(Cube::top());
    }
    let mut cube = Cube::top();
    for lit in text.split('&') {
        let lit = lit.trim();
        let (polarity, atom_text) = match lit.strip_prefix('!') {
            Some(rest) => (false, rest.trim()),
            None => (true, lit),
        };
        let mut chars = atom_text.chars();
        let atom = match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='z'), None) => c,
            _ => {
                return Err(FormatError::BadCube {
                    line,
                    text: text.to_string(),
                })
            }
        };
        cube.insert(atom, polarity)
            .map_err(|_| FormatError::ContradictoryCube {
                line,
                text: text.to_string(),
            })?;
    }
    Ok(cube)
}
