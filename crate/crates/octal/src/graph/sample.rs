use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::buchi::Cube;

use super::union::{EdgeKind, NodePayload, UnionGraph};

/// One encoded sample: union graph, node features, label, provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub graph: UnionGraph,
    pub features: Array2<f64>,
    pub label: u8,
    pub meta: SampleMeta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub seed: u64,
    pub formula: String,
    pub automaton_hash: String,
    /// Canonical automaton text, kept so oracle re-checks and benchmarks can
    /// run straight off a dataset file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automaton: Option<String>,
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
struct RecordRepr {
    nodes: Vec<NodeRepr>,
    edges: Vec<(usize, usize, String)>,
    features: Vec<Vec<f64>>,
    label: u8,
    meta: SampleMeta,
}

#[derive(Serialize, Deserialize)]
struct NodeRepr {
    id: usize,
    kind: String,
    payload: serde_json::Value,
}

/// Round to 9 significant digits; this is the wire precision of feature
/// values and model weights.
pub fn round9(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.8e}").parse().expect("formatted float")
}

/// Serialize one sample as a single JSON line.
pub fn write_sample(sample: &SampleRecord) -> String {
    let nodes = sample
        .graph
        .nodes
        .iter()
        .enumerate()
        .map(|(id, payload)| NodeRepr {
            id,
            kind: kind_name(payload).to_string(),
            payload: payload_value(payload),
        })
        .collect();
    let edges = sample
        .graph
        .edges
        .iter()
        .map(|&(u, v, k)| (u, v, edge_name(k).to_string()))
        .collect();
    let features = sample
        .features
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|&v| round9(v)).collect())
        .collect();
    let repr = RecordRepr {
        nodes,
        edges,
        features,
        label: sample.label,
        meta: sample.meta.clone(),
    };
    serde_json::to_string(&repr).expect("record serializes")
}

pub fn read_sample(line: &str) -> Result<SampleRecord, SampleError> {
    let repr: RecordRepr = serde_json::from_str(line)?;
    let mut nodes = Vec::with_capacity(repr.nodes.len());
    for (expect_id, node) in repr.nodes.iter().enumerate() {
        if node.id != expect_id {
            return Err(SampleError::Schema(format!(
                "node ids must be dense, got {} at {}",
                node.id, expect_id
            )));
        }
        nodes.push(parse_payload(&node.kind, &node.payload)?);
    }
    let mut edges = Vec::with_capacity(repr.edges.len());
    for (u, v, kind) in &repr.edges {
        if *u >= nodes.len() || *v >= nodes.len() {
            return Err(SampleError::Schema(format!("edge ({u},{v}) out of range")));
        }
        edges.push((*u, *v, parse_edge_kind(kind)?));
    }
    if repr.label > 1 {
        return Err(SampleError::Schema(format!("label {} not 0/1", repr.label)));
    }
    let width = repr.features.first().map_or(0, Vec::len);
    if repr.features.len() != nodes.len() {
        return Err(SampleError::Schema(format!(
            "{} feature rows for {} nodes",
            repr.features.len(),
            nodes.len()
        )));
    }
    let mut features = Array2::zeros((repr.features.len(), width));
    for (i, row) in repr.features.iter().enumerate() {
        if row.len() != width {
            return Err(SampleError::Schema("ragged feature rows".to_string()));
        }
        for (j, &v) in row.iter().enumerate() {
            features[(i, j)] = v;
        }
    }
    Ok(SampleRecord {
        graph: UnionGraph { nodes, edges },
        features,
        label: repr.label,
        meta: repr.meta,
    })
}

fn kind_name(p: &NodePayload) -> &'static str {
    match p {
        NodePayload::State { .. } => "state",
        NodePayload::Transition { .. } => "transition",
        NodePayload::Operator(_) => "operator",
        NodePayload::Literal { .. } => "literal",
        NodePayload::Constant(_) => "constant",
    }
}

fn edge_name(k: EdgeKind) -> &'static str {
    match k {
        EdgeKind::Incidence => "incidence",
        EdgeKind::Tree => "tree",
        EdgeKind::Union => "union",
    }
}

fn parse_edge_kind(name: &str) -> Result<EdgeKind, SampleError> {
    match name {
        "incidence" => Ok(EdgeKind::Incidence),
        "tree" => Ok(EdgeKind::Tree),
        "union" => Ok(EdgeKind::Union),
        other => Err(SampleError::Schema(format!("unknown edge kind {other:?}"))),
    }
}

fn payload_value(p: &NodePayload) -> serde_json::Value {
    use serde_json::json;
    match p {
        NodePayload::State { initial, accepting } => {
            json!({"initial": initial, "accepting": accepting})
        }
        NodePayload::Transition { cube, src, dst } => {
            json!({"cube": cube.to_string(), "src": src, "dst": dst})
        }
        NodePayload::Operator(op) => json!(op.to_string()),
        NodePayload::Literal { atom, negated } => {
            json!({"atom": atom.to_string(), "negated": negated})
        }
        NodePayload::Constant(v) => json!(v),
    }
}

fn parse_payload(kind: &str, value: &serde_json::Value) -> Result<NodePayload, SampleError> {
    let schema = |msg: &str| SampleError::Schema(format!("{kind} payload: {msg}"));
    match kind {
        "state" => Ok(NodePayload::State {
            initial: bool_field(value, "initial").ok_or_else(|| schema("missing initial"))?,
            accepting: bool_field(value, "accepting").ok_or_else(|| schema("missing accepting"))?,
        }),
        "transition" => {
            let cube_text = value
                .get("cube")
                .and_then(|v| v.as_str())
                .ok_or_else(|| schema("missing cube"))?;
            let cube = parse_cube_text(cube_text)
                .map_err(|e| schema(&format!("bad cube {cube_text:?}: {e}")))?;
            let src = usize_field(value, "src").ok_or_else(|| schema("missing src"))?;
            let dst = usize_field(value, "dst").ok_or_else(|| schema("missing dst"))?;
            Ok(NodePayload::Transition { cube, src, dst })
        }
        "operator" => {
            let s = value.as_str().ok_or_else(|| schema("expected string"))?;
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(op), None) => Ok(NodePayload::Operator(op)),
                _ => Err(schema("expected a single operator symbol")),
            }
        }
        "literal" => {
            let atom_text = value
                .get("atom")
                .and_then(|v| v.as_str())
                .ok_or_else(|| schema("missing atom"))?;
            let mut chars = atom_text.chars();
            let atom = match (chars.next(), chars.next()) {
                (Some(c @ 'a'..='z'), None) => c,
                _ => return Err(schema("atom must be a..z")),
            };
            Ok(NodePayload::Literal {
                atom,
                negated: bool_field(value, "negated").ok_or_else(|| schema("missing negated"))?,
            })
        }
        "constant" => Ok(NodePayload::Constant(
            value.as_bool().ok_or_else(|| schema("expected bool"))?,
        )),
        other => Err(SampleError::Schema(format!("unknown node kind {other:?}"))),
    }
}

fn bool_field(value: &serde_json::Value, field: &str) -> Option<bool> {
    value.get(field).and_then(|v| v.as_bool())
}

fn usize_field(value: &serde_json::Value, field: &str) -> Option<usize> {
    value.get(field).and_then(|v| v.as_u64()).map(|v| v as usize)
}

fn parse_cube_text(text: &str) -> Result<Cube, String> {
    if text == "1" {
        return Ok(Cube::top());
    }
    let mut cube = Cube::top();
    for lit in text.split('&') {
        let (polarity, atom_text) = match lit.strip_prefix('!') {
            Some(rest) => (false, rest),
            None => (true, lit),
        };
        let mut chars = atom_text.chars();
        let atom = match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='z'), None) => c,
            _ => return Err(format!("bad literal {lit:?}")),
        };
        cube.insert(atom, polarity).map_err(|e| e.to_string())?;
    }
    Ok(cube)
}
