use std::collections::BTreeMap;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use super::union::{NodePayload, UnionGraph};

/// Operators of the shared alphabet minus `!`, in Part IV position order.
pub const OPERATORS: [char; 9] = ['G', 'F', 'R', 'W', 'M', 'X', 'U', '&', '|'];

/// Feature layout: Part I (constant flag) + Part II (26 positive atoms) +
/// Part III (26 negated atoms) + Part IV (9 operators) + Part V (2 state
/// bits) [+ Part VI (2 scaled endpoint ids), directed only].
pub const WIDTH_UNDIRECTED: usize = 1 + 26 + 26 + 9 + 2;
pub const WIDTH_DIRECTED: usize = WIDTH_UNDIRECTED + 2;

const PART_I: usize = 0;
const PART_II: usize = 1;
const PART_III: usize = 27;
const PART_IV: usize = 53;
const PART_V: usize = 62;
const PART_VI: usize = 64;

pub type FeatureMatrix = Array2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingScheme {
    Gaussian,
    OneHot,
}

impl EncodingScheme {
    pub fn name(self) -> &'static str {
        match self {
            EncodingScheme::Gaussian => "gaussian",
            EncodingScheme::OneHot => "one_hot",
        }
    }
}

impl std::str::FromStr for EncodingScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(EncodingScheme::Gaussian),
            "one_hot" | "onehot" => Ok(EncodingScheme::OneHot),
            other => Err(format!("unknown encoding scheme {other:?}")),
        }
    }
}

/// Per-symbol values drawn from normal distributions with evenly spaced
/// means; an atom and its negation share one value.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingDictionary {
    values: BTreeMap<char, f64>,
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("unknown symbol '{0}' in graph")]
    UnknownSymbol(char),
}

pub const DEFAULT_SIGMA: f64 = 0.05;
const COLLISION_TOLERANCE: f64 = 1e-6;

/// One draw from `Normal(mu_i, sigma)` per symbol, `mu_i = i` for symbol
/// index i in 1..=35 (26 atoms then the 9 operators); deterministic in seed,
/// redrawing on collisions closer than 1e-6.
pub fn make_dictionary(seed: u64, sigma: f64) -> EncodingDictionary {
    assert!(sigma > 0.0, "sigma must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols: Vec<char> = ('a'..='z').chain(OPERATORS).collect();
    let mut values: BTreeMap<char, f64> = BTreeMap::new();
    for (i, &sym) in symbols.iter().enumerate() {
        let normal = Normal::new((i + 1) as f64, sigma).expect("sigma checked positive");
        loop {
            let v = normal.sample(&mut rng);
            let collides = values
                .values()
                .any(|&other| (other - v).abs() < COLLISION_TOLERANCE);
            if !collides {
                values.insert(sym, v);
                break;
            }
        }
    }
    EncodingDictionary {
        values,
        sigma,
        seed,
    }
}

impl EncodingDictionary {
    pub fn value(&self, symbol: char) -> Option<f64> {
        self.values.get(&symbol).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn atom_index(atom: char) -> Result<usize, EncodeError> {
    if atom.is_ascii_lowercase() {
        Ok(atom as usize - 'a' as usize)
    } else {
        Err(EncodeError::UnknownSymbol(atom))
    }
}

fn operator_index(op: char) -> Result<usize, EncodeError> {
    OPERATORS
        .iter()
        .position(|&o| o == op)
        .ok_or(EncodeError::UnknownSymbol(op))
}

/// One feature row per node, width 64 (66 directed).
pub fn encode_features(
    c: &UnionGraph,
    scheme: EncodingScheme,
    directed: bool,
    dict: &EncodingDictionary,
) -> Result<FeatureMatrix, EncodeError> {
    let width = if directed {
        WIDTH_DIRECTED
    } else {
        WIDTH_UNDIRECTED
    };
    let state_count = c
        .nodes
        .iter()
        .filter(|n| matches!(n, NodePayload::State { .. }))
        .count();
    let mut rows = Array2::<f64>::zeros((c.node_count(), width));
    let sym_value = |sym: char| -> Result<f64, EncodeError> {
        match scheme {
            EncodingScheme::OneHot => Ok(1.0),
            EncodingScheme::Gaussian => dict
                .value(sym)
                .ok_or(EncodeError::UnknownSymbol(sym)),
        }
    };
    for (id, payload) in c.nodes.iter().enumerate() {
        let mut row = rows.row_mut(id);
        match payload {
            NodePayload::State { initial, accepting } => {
                if *initial {
                    row[PART_V] = 1.0;
                }
                if *accepting {
                    row[PART_V + 1] = 1.0;
                }
            }
            NodePayload::Transition { cube, src, dst } => {
                if cube.is_top() {
                    row[PART_I] = 1.0;
                }
                for (atom, polarity) in cube.literals() {
                    let base = if polarity { PART_II } else { PART_III };
                    row[base + atom_index(atom)?] = sym_value(atom)?;
                }
                if directed {
                    let scale = 1.0 / state_count.max(1) as f64;
                    row[PART_VI] = *src as f64 * scale;
                    row[PART_VI + 1] = *dst as f64 * scale;
                }
            }
            NodePayload::Operator(op) => {
                row[PART_IV + operator_index(*op)?] = sym_value(*op)?;
            }
            NodePayload::Literal { atom, negated } => {
                let base = if *negated { PART_III } else { PART_II };
                row[base + atom_index(*atom)?] = sym_value(*atom)?;
            }
            NodePayload::Constant(_) => {
                row[PART_I] = 1.0;
            }
        }
    }
    Ok(rows)
}
