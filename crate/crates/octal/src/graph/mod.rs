//! Union-graph encoding of a model-checking instance: the automaton becomes
//! a bipartite state/transition graph, the specification becomes its
//! expression tree, and union edges tie literal leaves to the transitions
//! whose labels mention the same atom. Per-node feature rows feed the
//! classifier.

mod encode;
mod sample;
mod union;

pub use encode::{
    encode_features, make_dictionary, EncodeError, EncodingDictionary, EncodingScheme,
    FeatureMatrix, DEFAULT_SIGMA, OPERATORS, WIDTH_DIRECTED, WIDTH_UNDIRECTED,
};
pub use sample::{read_sample, round9, write_sample, SampleError, SampleMeta, SampleRecord};
pub use union::{
    build_spec_tree, build_system_graph, build_union, perturb_edges, Edge, EdgeKind, GraphError,
    NodeKind, NodePayload, UnionGraph,
};
