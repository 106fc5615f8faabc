//! Sharp bounds for graph-indexed sums of matrix entries.
//!
//! A *graph of matrices* attaches a dimension to every vertex of a directed
//! multigraph and a compatible real matrix to every edge; its *graph sum*
//! runs over all vertex-index assignments and multiplies one matrix entry
//! per edge. This crate computes the sharp exponent 𝔯(G) with
//! |S| ≤ N^𝔯(G)·Π‖T_e‖ from the forest of two-edge connected components,
//! evaluates graph sums both by brute force and through an operator
//! factorization of an input-output rewrite of the graph, and constructs the
//! witness matrices attaining the bound.

pub mod decomposition;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod half;
pub mod matrix;
pub mod modification;
pub mod operator;
pub mod partition;
pub mod schema;
pub mod witness;

pub use decomposition::{
    classify_leaves, cutting_edges, exponent, forest_of, two_edge_components, Forest, LeafKind,
};
pub use error::{Error, Result};
pub use evaluation::{
    bound, bound_report, graph_sum_bruteforce, graph_sum_bruteforce_capped, partition_sum,
    BoundReport, DEFAULT_TERM_CAP,
};
pub use graph::{DirectedMultigraph, Edge, EdgeEnd, EdgeId, VertexId};
pub use half::HalfInt;
pub use matrix::{GraphOfMatrices, Matrix, Violation, MAX_DIM};
pub use modification::{
    check_io, io_of_two_edge_component, reverse_edge, split_vertex, to_input_output, EndRef,
    IOGraph, LinkDirection, SplitMove,
};
pub use operator::{
    build_operator, build_operator_capped, distance_levels, graph_sum_via_operator,
    graph_sum_via_operator_capped, normalize_levels, operator_norm_check, vertex_isometry,
    BuiltOperator, LevelDecomposition, DEFAULT_LEVEL_WIDTH_CAP,
};
pub use partition::{graph_of_partition, Partition};
pub use schema::{GraphDoc, MatrixSpec, SCHEMA_VERSION};
pub use witness::{
    verify_optimality, verify_optimality_capped, witness_matrices, witness_v_matrix,
    OptimalityReport,
};
