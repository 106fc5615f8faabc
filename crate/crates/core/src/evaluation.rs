//! Graph-sum evaluation by direct summation, the constrained partition sum,
//! and the sharp bound in both its square and rectangular forms.

use crate::decomposition::{forest_of, LeafKind};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::matrix::{GraphOfMatrices, Matrix};
use crate::partition::Partition;

/// Default cap on the number of index assignments a brute-force sum may
/// enumerate. Brute force is the oracle here, not the product path.
pub const DEFAULT_TERM_CAP: u128 = 100_000_000;

/// S(𝔊): the sum over all index assignments i: V → [N_v] of the product over
/// edges of the matrix entry (row = index at the target, column = index at
/// the source). Summation order is lexicographic in canonical vertex order,
/// so results are bit-reproducible.
pub fn graph_sum_bruteforce(gom: &GraphOfMatrices) -> Result<f64> {
    graph_sum_bruteforce_capped(gom, DEFAULT_TERM_CAP)
}

pub fn graph_sum_bruteforce_capped(gom: &GraphOfMatrices, cap: u128) -> Result<f64> {
    gom.require_valid()?;
    let vertices: Vec<_> = gom.graph.vertices().cloned().collect();
    let dims: Vec<usize> = vertices
        .iter()
        .map(|v| gom.dim(v).expect("validated"))
        .collect();

    let mut terms: u128 = 1;
    for &d in &dims {
        terms = terms.saturating_mul(d as u128);
        if terms > cap {
            return Err(Error::TermCapExceeded { terms, cap });
        }
    }

    // per edge: (target rank, source rank, matrix)
    let edges: Vec<(usize, usize, &Matrix)> = gom
        .graph
        .edges()
        .iter()
        .map(|e| {
            (
                gom.graph.vertex_rank(&e.target).expect("declared"),
                gom.graph.vertex_rank(&e.source).expect("declared"),
                gom.matrix(&e.id).expect("validated"),
            )
        })
        .collect();

    let mut index = vec![0usize; vertices.len()];
    let mut sum = 0.0;
    loop {
        let mut term = 1.0;
        for &(t, s, m) in &edges {
            term *= m.get(index[t], index[s]);
            if term == 0.0 {
                break;
            }
        }
        sum += term;

        // odometer, last vertex fastest
        let mut pos = index.len();
        loop {
            if pos == 0 {
                return Ok(sum);
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < dims[pos] {
                break;
            }
            index[pos] = 0;
        }
    }
}

/// S_π(N): direct summation over all multi-indices 𝒋 ∈ [N]^{2m} whose kernel
/// dominates π, with the ℓ-th matrix contributing entry (j_{2ℓ−1}, j_{2ℓ}).
///
/// This is the definition, evaluated without any graph machinery; it is the
/// independent route against the graph sum of G_π.
pub fn partition_sum(matrices: &[Matrix], pi: &Partition, n: usize) -> Result<f64> {
    partition_sum_capped(matrices, pi, n, DEFAULT_TERM_CAP)
}

pub fn partition_sum_capped(
    matrices: &[Matrix],
    pi: &Partition,
    n: usize,
    cap: u128,
) -> Result<f64> {
    let m = matrices.len();
    if pi.k() != 2 * m {
        return Err(Error::Input(format!(
            "partition of {} positions does not match {m} matrices (need 2m = {})",
            pi.k(),
            2 * m
        )));
    }
    if n == 0 {
        return Err(Error::Input("N must be positive".into()));
    }
    for (l, t) in matrices.iter().enumerate() {
        if t.rows() != n || t.cols() != n {
            return Err(Error::Input(format!(
                "matrix {} is {}x{}, expected {n}x{n}",
                l + 1,
                t.rows(),
                t.cols()
            )));
        }
    }
    let terms = (n as u128).checked_pow(pi.k() as u32).unwrap_or(u128::MAX);
    if terms > cap {
        return Err(Error::TermCapExceeded { terms, cap });
    }

    let mut j = vec![0usize; pi.k()]; // 0-based indices
    let mut sum = 0.0;
    loop {
        let constrained = pi
            .blocks()
            .iter()
            .all(|block| block.iter().all(|&p| j[p - 1] == j[block[0] - 1]));
        if constrained {
            let mut term = 1.0;
            for (l, t) in matrices.iter().enumerate() {
                term *= t.get(j[2 * l], j[2 * l + 1]);
            }
            sum += term;
        }

        let mut pos = j.len();
        loop {
            if pos == 0 {
                return Ok(sum);
            }
            pos -= 1;
            j[pos] += 1;
            if j[pos] < n {
                break;
            }
            j[pos] = 0;
        }
    }
}

/// Report produced by [`bound`]: the bound value together with the exact
/// exponent and the norm product it was assembled from.
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    /// Π over leaves of (max dim in the leaf component)^𝔯(leaf) × Π‖T_e‖.
    pub bound: f64,
    /// The sharp exponent 𝔯(G) of the underlying graph.
    pub exponent: HalfInt,
    pub norm_product: f64,
}

/// The sharp upper bound on |S(𝔊)|. When all dimensions equal N this is
/// N^𝔯(G) · Π‖T_e‖; in general each leaf of the quotient forest contributes
/// the largest dimension inside its component, raised to the leaf weight.
pub fn bound(gom: &GraphOfMatrices) -> Result<f64> {
    Ok(bound_report(gom)?.bound)
}

pub fn bound_report(gom: &GraphOfMatrices) -> Result<BoundReport> {
    gom.require_valid()?;
    let forest = forest_of(&gom.graph);
    let kinds = forest.leaf_kinds();
    let mut dim_factor = 1.0;
    for (node, kind) in forest.nodes.iter().zip(&kinds) {
        let weight = match kind {
            LeafKind::TrivialLeaf => HalfInt::ONE,
            LeafKind::TreeLeaf => HalfInt::HALF,
            LeafKind::Internal => continue,
        };
        let max_dim = node
            .iter()
            .map(|v| gom.dim(v).expect("validated"))
            .max()
            .expect("components are non-empty");
        dim_factor *= weight.pow_of(max_dim as f64);
    }
    let norm_product = gom.norm_product();
    Ok(BoundReport {
        bound: dim_factor * norm_product,
        exponent: forest.exponent(),
        norm_product,
    })
}
