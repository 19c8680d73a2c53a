use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::buchi::{BuchiAutomaton, Cube, StateId};
use crate::ltl::LtlFormula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    State,
    Transition,
    Operator,
    Literal,
    Constant,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodePayload {
    State {
        initial: bool,
        accepting: bool,
    },
    Transition {
        cube: Cube,
        src: StateId,
        dst: StateId,
    },
    Operator(char),
    Literal {
        atom: char,
        negated: bool,
    },
    Constant(bool),
}

impl NodePayload {
    pub fn kind(&self) -> NodeKind {
        match self {
            NodePayload::State { .. } => NodeKind::State,
            NodePayload::Transition { .. } => NodeKind::Transition,
            NodePayload::Operator(_) => NodeKind::Operator,
            NodePayload::Literal { .. } => NodeKind::Literal,
            NodePayload::Constant(_) => NodeKind::Constant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// State <-> Transition, inside the system graph.
    Incidence,
    /// Parent <-> child in the expression tree.
    Tree,
    /// Literal leaf <-> Transition with a shared atom name.
    Union,
}

pub type Edge = (usize, usize, EdgeKind);

/// Joint graph of a system graph, an expression tree, or their union.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UnionGraph {
    pub nodes: Vec<NodePayload>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("formula is not in negation normal form")]
    NotNnf,
    #[error("graph invariant violated: {0}")]
    Invariant(String),
}

impl UnionGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn kind(&self, id: usize) -> NodeKind {
        self.nodes[id].kind()
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |(_, _, k)| *k == kind)
    }

    pub fn count_edges(&self, kind: EdgeKind) -> usize {
        self.edges_of_kind(kind).count()
    }

    /// Check the structural invariants: incidence edges are bipartite with
    /// transition degree 1..=2, tree edges form a tree over the tree nodes,
    /// union edges connect literals to transitions, and no `!` operator node
    /// exists.
    pub fn validate(&self) -> Result<(), GraphError> {
        let fail = |msg: String| Err(GraphError::Invariant(msg));
        let mut transition_degree = vec![0usize; self.nodes.len()];
        for &(u, v, kind) in &self.edges {
            if u >= self.nodes.len() || v >= self.nodes.len() {
                return fail(format!("edge ({u},{v}) out of range"));
            }
            let (ku, kv) = (self.kind(u), self.kind(v));
            match kind {
                EdgeKind::Incidence => {
                    let ok = matches!(
                        (ku, kv),
                        (NodeKind::State, NodeKind::Transition)
                            | (NodeKind::Transition, NodeKind::State)
                    );
                    if !ok {
                        return fail(format!("incidence edge on {ku:?}-{kv:?}"));
                    }
                    let t = if ku == NodeKind::Transition { u } else { v };
                    transition_degree[t] += 1;
                }
                EdgeKind::Tree => {
                    let tree_kinds = |k: NodeKind| {
                        matches!(k, NodeKind::Operator | NodeKind::Literal | NodeKind::Constant)
                    };
                    if !tree_kinds(ku) || !tree_kinds(kv) {
                        return fail(format!("tree edge on {ku:?}-{kv:?}"));
                    }
                }
                EdgeKind::Union => {
                    let ok = matches!(
                        (ku, kv),
                        (NodeKind::Literal, NodeKind::Transition)
                            | (NodeKind::Transition, NodeKind::Literal)
                    );
                    if !ok {
                        return fail(format!("union edge on {ku:?}-{kv:?}"));
                    }
                }
            }
        }
        for (id, payload) in self.nodes.iter().enumerate() {
            match payload {
                NodePayload::Transition { .. } => {
                    let d = transition_degree[id];
                    // Degree 0 is allowed only after perturbation; the builder
                    // itself always yields 1 (self-loop) or 2.
                    if d > 2 {
                        return fail(format!("transition node {id} has incidence degree {d}"));
                    }
                }
                NodePayload::Operator('!') => {
                    return fail(format!("operator node {id} is '!'"));
                }
                _ => {}
            }
        }
        // Tree edges must form a tree: |edges| = |tree nodes| - 1 when any
        // tree node exists, and the tree part must be connected and acyclic.
        let tree_nodes: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| {
                matches!(
                    self.kind(i),
                    NodeKind::Operator | NodeKind::Literal | NodeKind::Constant
                )
            })
            .collect();
        let tree_edges = self.count_edges(EdgeKind::Tree);
        if !tree_nodes.is_empty() && tree_edges != tree_nodes.len() - 1 {
            return fail(format!(
                "{} tree edges over {} tree nodes",
                tree_edges,
                tree_nodes.len()
            ));
        }
        Ok(())
    }
}

/// Bipartite system graph: one node per state, one per transition, and an
/// incidence edge whenever the state is the transition's source or
/// destination. A self-loop contributes a single edge.
pub fn build_system_graph(b: &BuchiAutomaton) -> UnionGraph {
    let mut g = UnionGraph::default();
    for q in 0..b.state_count {
        g.nodes.push(NodePayload::State {
            initial: q == b.initial,
            accepting: b.accepting.contains(&q),
        });
    }
    for t in &b.transitions {
        let id = g.nodes.len();
        g.nodes.push(NodePayload::Transition {
            cube: t.label.clone(),
            src: t.src,
            dst: t.dst,
        });
        g.edges.push((t.src, id, EdgeKind::Incidence));
        if t.dst != t.src {
            g.edges.push((t.dst, id, EdgeKind::Incidence));
        }
    }
    g
}

/// Expression tree of an NNF formula. Negation is folded into the literal
/// leaves, so no `!` operator node is produced.
pub fn build_spec_tree(f: &LtlFormula) -> Result<UnionGraph, GraphError> {
    if !f.is_nnf() {
        return Err(GraphError::NotNnf);
    }
    let mut g = UnionGraph::default();
    add_subtree(f, &mut g);
    Ok(g)
}

fn add_subtree(f: &LtlFormula, g: &mut UnionGraph) -> usize {
    use LtlFormula::*;
    let payload = match f {
        Atom(a) => NodePayload::Literal {
            atom: *a,
            negated: false,
        },
        Not(inner) => match &**inner {
            Atom(a) => NodePayload::Literal {
                atom: *a,
                negated: true,
            },
            _ => unreachable!("checked NNF"),
        },
        True => NodePayload::Constant(true),
        False => NodePayload::Constant(false),
        And(_, _) => NodePayload::Operator('&'),
        Or(_, _) => NodePayload::Operator('|'),
        Next(_) => NodePayload::Operator('X'),
        Globally(_) => NodePayload::Operator('G'),
        Finally(_) => NodePayload::Operator('F'),
        Until(_, _) => NodePayload::Operator('U'),
        Release(_, _) => NodePayload::Operator('R'),
        WeakUntil(_, _) => NodePayload::Operator('W'),
        StrongRelease(_, _) => NodePayload::Operator('M'),
    };
    let id = g.nodes.len();
    g.nodes.push(payload);
    match f {
        Atom(_) | Not(_) | True | False => {}
        Next(c) | Globally(c) | Finally(c) => {
            let child = add_subtree(c, g);
            g.edges.push((id, child, EdgeKind::Tree));
        }
        And(l, r) | Or(l, r) | Until(l, r) | Release(l, r) | WeakUntil(l, r)
        | StrongRelease(l, r) => {
            let left = add_subtree(l, g);
            g.edges.push((id, left, EdgeKind::Tree));
            let right = add_subtree(r, g);
            g.edges.push((id, right, EdgeKind::Tree));
        }
    }
    id
}

/// Union graph: disjoint node union of the system graph and the tree, all
/// their edges, plus a union edge between every literal leaf and every
/// transition whose cube mentions the same atom name. The link is
/// polarity-agnostic. Constant leaves get no union edges.
pub fn build_union(system: &UnionGraph, tree: &UnionGraph) -> UnionGraph {
    let offset = system.nodes.len();
    let mut g = system.clone();
    g.nodes.extend(tree.nodes.iter().cloned());
    g.edges
        .extend(tree.edges.iter().map(|&(u, v, k)| (u + offset, v + offset, k)));
    for (tree_id, payload) in tree.nodes.iter().enumerate() {
        let NodePayload::Literal { atom, .. } = payload else {
            continue;
        };
        for (sys_id, sys_payload) in system.nodes.iter().enumerate() {
            if let NodePayload::Transition { cube, .. } = sys_payload {
                if cube.mentions(*atom) {
                    g.edges.push((tree_id + offset, sys_id, EdgeKind::Union));
                }
            }
        }
    }
    g
}

/// Drop `ceil(p * |incidence edges|)` incidence edges uniformly at random.
/// Tree and union edges and all nodes are untouched; deterministic in seed.
pub fn perturb_edges(c: &UnionGraph, p: f64, seed: u64) -> UnionGraph {
    assert!((0.0..=1.0).contains(&p), "p must be a fraction");
    let incidence: Vec<usize> = c
        .edges
        .iter()
        .enumerate()
        .filter(|(_, (_, _, k))| *k == EdgeKind::Incidence)
        .map(|(i, _)| i)
        .collect();
    let drop_count = (p * incidence.len() as f64).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = incidence;
    shuffled.shuffle(&mut rng);
    let dropped: std::collections::BTreeSet<usize> =
        shuffled.into_iter().take(drop_count).collect();
    let mut out = c.clone();
    out.edges = c
        .edges
        .iter()
        .enumerate()
        .filter(|(i, _)| !dropped.contains(i))
        .map(|(_, &e)| e)
        .collect();
    out
}
