use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::ltl::LtlFormula;

use super::automaton::{BuchiAutomaton, BuchiError, Cube, Transition};

pub const DEFAULT_STATE_CAP: usize = 200_000;

const INIT: usize = usize::MAX;

/// Tableau-style LTL-to-Büchi translation over core NNF.
///
/// Obligations are expanded into current/next sets; the result is a
/// generalized Büchi automaton with one acceptance set per Until subformula,
/// degeneralized with a counter.
pub fn translate(f: &LtlFormula, state_cap: usize) -> Result<BuchiAutomaton, BuchiError> {
    if !f.is_core() {
        return Err(BuchiError::NotCoreNnf);
    }
    let closed = expand(f, state_cap)?;
    let untils = until_subformulas(f);
    let gba = assemble_gba(&closed, &untils);
    degeneralize(&gba, untils.len(), f.atoms(), state_cap)
}

type FormulaSet = BTreeSet<LtlFormula>;

#[derive(Debug, Clone)]
struct OpenNode {
    incoming: BTreeSet<usize>,
    new: FormulaSet,
    old: FormulaSet,
    next: FormulaSet,
}

#[derive(Debug)]
struct ClosedNode {
    incoming: BTreeSet<usize>,
    old: FormulaSet,
}

fn expand(f: &LtlFormula, state_cap: usize) -> Result<Vec<ClosedNode>, BuchiError> {
    use LtlFormula::*;
    let mut closed: Vec<ClosedNode> = Vec::new();
    let mut index: HashMap<(FormulaSet, FormulaSet), usize> = HashMap::new();
    let mut stack = vec![OpenNode {
        incoming: BTreeSet::from([INIT]),
        new: FormulaSet::from([f.clone()]),
        old: FormulaSet::new(),
        next: FormulaSet::new(),
    }];

    while let Some(mut node) = stack.pop() {
        let Some(g) = node.new.pop_first() else {
            // Node fully expanded: merge with an existing state or close it
            // and seed its temporal successor.
            let key = (node.old.clone(), node.next.clone());
            if let Some(&id) = index.get(&key) {
                closed[id].incoming.extend(node.incoming.iter());
                continue;
            }
            let id = closed.len();
            if id >= state_cap {
                return Err(BuchiError::StateCapExceeded { cap: state_cap });
            }
            index.insert(key, id);
            stack.push(OpenNode {
                incoming: BTreeSet::from([id]),
                new: node.next.clone(),
                old: FormulaSet::new(),
                next: FormulaSet::new(),
            });
            closed.push(ClosedNode {
                incoming: node.incoming,
                old: node.old,
            });
            continue;
        };
        if node.old.contains(&g) {
            stack.push(node);
            continue;
        }
        match &g {
            True => stack.push(node),
            False => {} // unsatisfiable: drop the node
            Atom(_) => {
                if node.old.contains(&LtlFormula::not(g.clone())) {
                    continue;
                }
                node.old.insert(g);
                stack.push(node);
            }
            Not(inner) => {
                debug_assert!(matches!(**inner, Atom(_)));
                if node.old.contains(inner) {
                    continue;
                }
                node.old.insert(g);
                stack.push(node);
            }
            And(l, r) => {
                for h in [l, r] {
                    if !node.old.contains(h) {
                        node.new.insert((**h).clone());
                    }
                }
                node.old.insert(g);
                stack.push(node);
            }
            Or(l, r) => {
                let mut other = node.clone();
                if !node.old.contains(l) {
                    node.new.insert((**l).clone());
                }
                node.old.insert(g.clone());
                if !other.old.contains(r) {
                    other.new.insert((**r).clone());
                }
                other.old.insert(g);
                stack.push(node);
                stack.push(other);
            }
            Next(c) => {
                node.next.insert((**c).clone());
                node.old.insert(g);
                stack.push(node);
            }
            Until(l, r) => {
                // l U r = r | (l & X(l U r))
                let mut wait = node.clone();
                if !wait.old.contains(l) {
                    wait.new.insert((**l).clone());
                }
                wait.next.insert(g.clone());
                wait.old.insert(g.clone());
                if !node.old.contains(r) {
                    node.new.insert((**r).clone());
                }
                node.old.insert(g);
                stack.push(wait);
                stack.push(node);
            }
            Release(l, r) => {
                // l R r = (l & r) | (r & X(l R r))
                let mut wait = node.clone();
                if !wait.old.contains(r) {
                    wait.new.insert((**r).clone());
                }
                wait.next.insert(g.clone());
                wait.old.insert(g.clone());
                for h in [l, r] {
                    if !node.old.contains(h) {
                        node.new.insert((**h).clone());
                    }
                }
                node.old.insert(g);
                stack.push(wait);
                stack.push(node);
            }
            Globally(_) | Finally(_) | WeakUntil(_, _) | StrongRelease(_, _) => {
                unreachable!("input checked to be core NNF")
            }
        }
    }
    Ok(closed)
}

fn until_subformulas(f: &LtlFormula) -> Vec<LtlFormula> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    collect_untils(f, &mut seen, &mut out);
    out
}

fn collect_untils(f: &LtlFormula, seen: &mut BTreeSet<LtlFormula>, out: &mut Vec<LtlFormula>) {
    use LtlFormula::*;
    match f {
        Atom(_) | True | False => {}
        Not(c) | Next(c) | Globally(c) | Finally(c) => collect_untils(c, seen, out),
        And(l, r) | Or(l, r) | Release(l, r) | WeakUntil(l, r) | StrongRelease(l, r) => {
            collect_untils(l, seen, out);
            collect_untils(r, seen, out);
        }
        Until(l, r) => {
            collect_untils(l, seen, out);
            collect_untils(r, seen, out);
            if seen.insert(f.clone()) {
                out.push(f.clone());
            }
        }
    }
}

struct Gba {
    /// Number of states; the initial state is `state_count - 1`.
    state_count: usize,
    initial: usize,
    transitions: Vec<Transition>,
    /// One acceptance set per Until subformula.
    acceptance: Vec<BTreeSet<usize>>,
}

fn assemble_gba(closed: &[ClosedNode], untils: &[LtlFormula]) -> Gba {
    use LtlFormula::*;
    let init_id = closed.len();
    let mut transitions = Vec::new();
    for (id, node) in closed.iter().enumerate() {
        let mut cube = Cube::top();
        for g in &node.old {
            match g {
                Atom(a) => {
                    cube.insert(*a, true).expect("tableau filters clashes");
                }
                Not(inner) => {
                    if let Atom(a) = &**inner {
                        cube.insert(*a, false).expect("tableau filters clashes");
                    }
                }
                _ => {}
            }
        }
        for &src in &node.incoming {
            let src = if src == INIT { init_id } else { src };
            transitions.push(Transition {
                src,
                label: cube.clone(),
                dst: id,
            });
        }
    }
    let acceptance = untils
        .iter()
        .map(|g| {
            let r = match g {
                Until(_, r) => r,
                _ => unreachable!(),
            };
            closed
                .iter()
                .enumerate()
                .filter(|(_, n)| !n.old.contains(g) || n.old.contains(r))
                .map(|(id, _)| id)
                .collect()
        })
        .collect();
    Gba {
        state_count: init_id + 1,
        initial: init_id,
        transitions,
        acceptance,
    }
}

/// Counter-based degeneralization; with zero acceptance sets every state is
/// accepting. Only states reachable from the initial one are kept, and a
/// redundant initial state is merged away when some tableau node has exactly
/// the same outgoing behavior.
fn degeneralize(
    gba: &Gba,
    sets: usize,
    atoms: BTreeSet<char>,
    state_cap: usize,
) -> Result<BuchiAutomaton, BuchiError> {
    let initial = merge_initial(gba);
    let counters = sets.max(1);
    let mut adj: Vec<Vec<&Transition>> = vec![Vec::new(); gba.state_count];
    for t in &gba.transitions {
        adj[t.src].push(t);
    }

    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut transitions = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert((initial, 0), 0);
    order.push((initial, 0));
    queue.push_back((initial, 0));
    while let Some((q, i)) = queue.pop_front() {
        let src_id = ids[&(q, i)];
        let advance = sets > 0 && gba.acceptance[i].contains(&q);
        let i_next = if advance { (i + 1) % counters } else { i };
        for t in &adj[q] {
            let key = (t.dst, i_next);
            let dst_id = *ids.entry(key).or_insert_with(|| {
                order.push(key);
                queue.push_back(key);
                order.len() - 1
            });
            if order.len() > state_cap {
                return Err(BuchiError::StateCapExceeded { cap: state_cap });
            }
            transitions.push(Transition {
                src: src_id,
                label: t.label.clone(),
                dst: dst_id,
            });
        }
    }
    let accepting = order
        .iter()
        .enumerate()
        .filter(|(_, &(q, i))| {
            if sets == 0 {
                true
            } else {
                i == 0 && gba.acceptance[0].contains(&q)
            }
        })
        .map(|(id, _)| id)
        .collect();
    Ok(BuchiAutomaton {
        state_count: order.len(),
        initial: 0,
        accepting,
        transitions,
        atom_universe: atoms,
    })
}

// The tableau's dedicated initial state duplicates a node whenever that node
// feeds exactly the same successor set; reuse the node in that case.
fn merge_initial(gba: &Gba) -> usize {
    let init = gba.initial;
    let init_out: BTreeSet<(usize, String)> = outgoing_shape(gba, init);
    for q in 0..gba.state_count - 1 {
        if outgoing_shape(gba, q) == init_out {
            return q;
        }
    }
    init
}

fn outgoing_shape(gba: &Gba, q: usize) -> BTreeSet<(usize, String)> {
    gba.transitions
        .iter()
        .filter(|t| t.src == q)
        .map(|t| (t.dst, t.label.to_string()))
        .collect()
}
