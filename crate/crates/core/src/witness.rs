//! Construction of norm-one matrices attaining S = N^𝔯(G), and the check
//! that they do.

use crate::decomposition::{forest_of, LeafKind};
use crate::error::{Error, Result};
use crate::evaluation::{graph_sum_bruteforce_capped, DEFAULT_TERM_CAP};
use crate::graph::DirectedMultigraph;
use crate::half::HalfInt;
use crate::matrix::{GraphOfMatrices, Matrix};

/// The N×N matrix with first column 1/√N and zeros elsewhere; operator norm 1.
/// An entry V\[i,j\] is nonzero exactly when j = 1, so placed on a cutting
/// edge it pins the index on its column side to 1.
pub fn witness_v_matrix(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::Input("N must be at least 1".into()));
    }
    let mut m = Matrix::zeros(n, n);
    let value = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        m.set(i, 0, value);
    }
    Ok(m)
}

/// All-ones matrix scaled to norm 1; pairs the two free indices of a
/// leaf-to-leaf cutting edge while still contributing a full factor N.
fn leaf_pair_matrix(n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    let value = 1.0 / n as f64;
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, value);
        }
    }
    m
}

/// Attach witness matrices to a graph: identity on every non-cutting edge
/// (collapsing each two-edge connected component to a single free index) and,
/// per cutting edge, the variant pinning the index on its internal side to 1
/// — the first-column matrix when the internal component is the source, its
/// transpose when it is the target. A cutting edge joining two leaf
/// components directly carries the norm-one all-ones matrix instead, and a
/// cutting edge between two internal components the identity.
pub fn witness_matrices(g: &DirectedMultigraph, n: usize) -> Result<GraphOfMatrices> {
    if n == 0 {
        return Err(Error::Input("N must be at least 1".into()));
    }
    let forest = forest_of(g);
    let kinds = forest.leaf_kinds();
    let mut gom = GraphOfMatrices::uniform(g.clone(), n, |_| Matrix::identity(n));
    for fe in &forest.edges {
        let source_is_leaf = kinds[fe.source_node] != LeafKind::Internal;
        let target_is_leaf = kinds[fe.target_node] != LeafKind::Internal;
        let matrix = match (source_is_leaf, target_is_leaf) {
            (true, true) => leaf_pair_matrix(n),
            // internal side = column side: pin it with the first-column matrix
            (false, true) => witness_v_matrix(n)?,
            // internal side = row side: transpose pins the row index
            (true, false) => witness_v_matrix(n)?.transpose(),
            (false, false) => Matrix::identity(n),
        };
        gom.set_matrix(fe.cut_edge.clone(), matrix);
    }
    Ok(gom)
}

/// Outcome of [`verify_optimality`].
#[derive(Clone, Debug)]
pub struct OptimalityReport {
    /// Brute-force value of the witness graph sum.
    pub sum: f64,
    /// N^𝔯(G), computed exactly.
    pub target: f64,
    pub exponent: HalfInt,
    /// Largest deviation of a witness matrix norm from 1.
    pub max_norm_deviation: f64,
    pub norms_ok: bool,
    pub sum_ok: bool,
    pub pass: bool,
}

/// Build the witness matrices for `g`, check every operator norm is 1 (to
/// 1e-10 relative) and that the brute-force sum hits N^𝔯(G) to 1e-12
/// relative.
pub fn verify_optimality(g: &DirectedMultigraph, n: usize) -> Result<OptimalityReport> {
    verify_optimality_capped(g, n, DEFAULT_TERM_CAP)
}

pub fn verify_optimality_capped(
    g: &DirectedMultigraph,
    n: usize,
    term_cap: u128,
) -> Result<OptimalityReport> {
    let gom = witness_matrices(g, n)?;
    let max_norm_deviation = gom
        .graph
        .edges()
        .iter()
        .map(|e| (gom.matrix(&e.id).expect("assigned").operator_norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let norms_ok = max_norm_deviation <= 1e-10;

    let sum = graph_sum_bruteforce_capped(&gom, term_cap)?;
    let exponent = forest_of(g).exponent();
    let target = exponent.pow_of(n as f64);
    let sum_ok = (sum - target).abs() <= 1e-12 * target.abs().max(f64::MIN_POSITIVE);

    Ok(OptimalityReport {
        sum,
        target,
        exponent,
        max_norm_deviation,
        norms_ok,
        sum_ok,
        pass: norms_ok && sum_ok,
    })
}
