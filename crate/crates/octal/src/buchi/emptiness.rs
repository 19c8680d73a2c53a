use std::collections::{BTreeSet, VecDeque};

use crate::ltl::Lasso;

use super::automaton::{BuchiAutomaton, BuchiError};

/// Emptiness check with witness extraction.
///
/// Returns `None` iff the automaton's language is empty; otherwise an
/// accepting lasso whose cubes are concretized over the atom universe
/// (unconstrained atoms default to false).
pub fn is_empty(b: &BuchiAutomaton) -> Option<Lasso> {
    let adj = b.adjacency();
    let sccs = tarjan(b.state_count, &adj, b, b.initial);
    // Pick the first reachable SCC that contains an accepting state on a cycle.
    for scc in &sccs {
        let members: BTreeSet<usize> = scc.iter().copied().collect();
        for &q in scc {
            if !b.accepting.contains(&q) {
                continue;
            }
            let on_cycle = scc.len() > 1
                || adj[q]
                    .iter()
                    .any(|&ti| b.transitions[ti].dst == q);
            if on_cycle {
                return Some(extract_witness(b, &adj, q, &members));
            }
        }
    }
    None
}

// Iterative Tarjan restricted to states reachable from `root`.
fn tarjan(n: usize, adj: &[Vec<usize>], b: &BuchiAutomaton, root: usize) -> Vec<Vec<usize>> {
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut sccs = Vec::new();

    // (state, next edge position)
    let mut call: Vec<(usize, usize)> = vec![(root, 0)];
    while let Some(&mut (v, ref mut ei)) = call.last_mut() {
        if *ei == 0 {
            index[v] = next_index;
            low[v] = next_index;
            next_index += 1;
            stack.push(v);
            on_stack[v] = true;
        }
        if let Some(&ti) = adj[v].get(*ei) {
            *ei += 1;
            let w = b.transitions[ti].dst;
            if index[w] == UNSET {
                call.push((w, 0));
            } else if on_stack[w] {
                low[v] = low[v].min(index[w]);
            }
            continue;
        }
        call.pop();
        if let Some(&mut (parent, _)) = call.last_mut() {
            low[parent] = low[parent].min(low[v]);
        }
        if low[v] == index[v] {
            let mut scc = Vec::new();
            loop {
                let w = stack.pop().expect("tarjan stack underflow");
                on_stack[w] = false;
                scc.push(w);
                if w == v {
                    break;
                }
            }
            scc.sort_unstable();
            sccs.push(scc);
        }
    }
    sccs
}

fn extract_witness(
    b: &BuchiAutomaton,
    adj: &[Vec<usize>],
    target: usize,
    scc: &BTreeSet<usize>,
) -> Lasso {
    let prefix_t = bfs_path(b, adj, b.initial, target, None);
    let cycle_t = bfs_cycle(b, adj, target, scc);
    let universe = &b.atom_universe;
    let prefix = prefix_t
        .iter()
        .map(|&ti| b.transitions[ti].label.concretize(universe))
        .collect();
    let looping = cycle_t
        .iter()
        .map(|&ti| b.transitions[ti].label.concretize(universe))
        .collect();
    Lasso::new(prefix, looping).expect("cycle is nonempty")
}

// Shortest transition path from `from` to `to`; `within` restricts traversal
// to an SCC. Empty when from == to.
fn bfs_path(
    b: &BuchiAutomaton,
    adj: &[Vec<usize>],
    from: usize,
    to: usize,
    within: Option<&BTreeSet<usize>>,
) -> Vec<usize> {
    if from == to {
        return Vec::new();
    }
    let mut pred: Vec<Option<usize>> = vec![None; b.state_count];
    let mut seen = vec![false; b.state_count];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &ti in &adj[v] {
            let w = b.transitions[ti].dst;
            if let Some(members) = within {
                if !members.contains(&w) {
                    continue;
                }
            }
            if seen[w] {
                continue;
            }
            seen[w] = true;
            pred[w] = Some(ti);
            if w == to {
                let mut path = Vec::new();
                let mut cur = to;
                while cur != from {
                    let ti = pred[cur].expect("predecessor chain");
                    path.push(ti);
                    cur = b.transitions[ti].src;
                }
                path.reverse();
                return path;
            }
            queue.push_back(w);
        }
    }
    unreachable!("target must be reachable")
}

// Nonempty cycle through `q` using SCC-internal transitions only.
fn bfs_cycle(b: &BuchiAutomaton, adj: &[Vec<usize>], q: usize, scc: &BTreeSet<usize>) -> Vec<usize> {
    // Prefer a self-loop.
    for &ti in &adj[q] {
        if b.transitions[ti].dst == q {
            return vec![ti];
        }
    }
    // Otherwise step to a successor inside the SCC and route back.
    for &ti in &adj[q] {
        let w = b.transitions[ti].dst;
        if scc.contains(&w) {
            let mut cycle = vec![ti];
            cycle.extend(bfs_path(b, adj, w, q, Some(scc)));
            return cycle;
        }
    }
    unreachable!("accepting state was checked to lie on a cycle")
}

/// Membership of an ultimately periodic word.
///
/// The automaton is synchronized with the word's suffix classes and the
/// synchronized graph is searched for a reachable accepting cycle.
pub fn accepts_lasso(b: &BuchiAutomaton, w: &Lasso) -> Result<bool, BuchiError> {
    for &a in &b.atom_universe {
        let declared = w.prefix.iter().chain(w.looping.iter()).all(|s| s.contains_key(&a));
        if !declared {
            return Err(BuchiError::UndeclaredAtom(a));
        }
    }
    let positions = w.len();
    let id = |q: usize, pos: usize| q * positions + pos;
    let mut sync = BuchiAutomaton {
        state_count: b.state_count * positions,
        initial: id(b.initial, 0),
        accepting: BTreeSet::new(),
        transitions: Vec::new(),
        atom_universe: b.atom_universe.clone(),
    };
    for t in &b.transitions {
        for pos in 0..positions {
            if t.label.satisfied_by(w.assignment(pos)) == Some(true) {
                sync.transitions.push(super::automaton::Transition {
                    src: id(t.src, pos),
                    label: t.label.clone(),
                    dst: id(t.dst, w.next(pos)),
                });
            }
        }
    }
    for &q in &b.accepting {
        for pos in 0..positions {
            sync.accepting.insert(id(q, pos));
        }
    }
    Ok(is_empty(&sync).is_some())
}
