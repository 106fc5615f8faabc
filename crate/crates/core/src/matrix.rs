//! Dense real matrices attached to edges, dimension bookkeeping per vertex,
//! and the spectral norm used in every bound.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{DirectedMultigraph, EdgeId, VertexId};

/// Largest per-vertex dimension accepted by [`GraphOfMatrices::validate`].
/// Everything here is a desk-scale verification tool.
pub const MAX_DIM: usize = 64;

/// Row-major dense matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Input("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Input(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Input("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Input("ragged rows in matrix literal".into()));
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = value;
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::Input("trace of a non-square matrix".into()));
        }
        Ok((0..self.rows).map(|i| self.data[i * self.cols + i]).sum())
    }

    /// Kronecker product, `self` as the most significant factor.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.data[i1 * self.cols + j1];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..rhs.rows {
                    for j2 in 0..rhs.cols {
                        let b = rhs.data[i2 * rhs.cols + j2];
                        if b != 0.0 {
                            out.data[(i1 * rhs.rows + i2) * out.cols + (j1 * rhs.cols + j2)] =
                                a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|&x| x * x).sum::<f64>().sqrt()
    }

    /// Sum of all entries, the pairing with all-ones vectors on both sides.
    pub fn entry_sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Largest singular value.
    ///
    /// Power iteration on TᵀT run from two deterministic starts — the
    /// all-ones vector and a fixed pseudo-random vector — taking the larger
    /// result; the second start covers the case where all-ones is orthogonal
    /// to the dominant singular pair. Tolerance 1e-12 on the change of the
    /// Rayleigh quotient, capped at 100 000 iterations per start.
    pub fn operator_norm(&self) -> f64 {
        if self.data.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        let ones = vec![1.0; self.cols];
        let mut seeded = Vec::with_capacity(self.cols);
        let mut state = 0x9E37_79B9_7F4A_7C15u64;
        for _ in 0..self.cols {
            state = splitmix64(state);
            // spread over [-0.5, 0.5]
            seeded.push((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5);
        }
        self.power_iteration(ones).max(self.power_iteration(seeded))
    }

    fn power_iteration(&self, mut x: Vec<f64>) -> f64 {
        let norm = |v: &[f64]| v.iter().map(|&a| a * a).sum::<f64>().sqrt();
        let nx = norm(&x);
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|a| *a /= nx);

        let mut lambda_prev = f64::NEG_INFINITY;
        let mut lambda = 0.0;
        for _ in 0..100_000 {
            let tx = self.apply(&x);
            lambda = tx.iter().map(|&a| a * a).sum::<f64>(); // Rayleigh quotient of TᵀT at unit x
            if (lambda - lambda_prev).abs() <= 1e-12 * lambda.max(1e-300) {
                break;
            }
            lambda_prev = lambda;
            let mut y = self.apply_transpose(&tx);
            let ny = norm(&y);
            if ny == 0.0 {
                return 0.0; // x fell in the kernel of TᵀT
            }
            y.iter_mut().for_each(|a| *a /= ny);
            x = y;
        }
        lambda.max(0.0).sqrt()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (row, &yi) in self.data.chunks_exact(self.cols).zip(y) {
            if yi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        out
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A broken dimension contract, reported by [`GraphOfMatrices::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Vertex or edge id the violation is about.
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

/// A multigraph together with a dimension per vertex and a matrix per edge;
/// the matrix on `e` maps the source space into the target space, so it must
/// be dims\[target\] × dims\[source\].
#[derive(Clone, Debug, PartialEq)]
pub struct GraphOfMatrices {
    pub graph: DirectedMultigraph,
    dims: BTreeMap<VertexId, usize>,
    mats: BTreeMap<EdgeId, Matrix>,
}

impl GraphOfMatrices {
    pub fn new(
        graph: DirectedMultigraph,
        dims: BTreeMap<VertexId, usize>,
        mats: BTreeMap<EdgeId, Matrix>,
    ) -> Self {
        GraphOfMatrices { graph, dims, mats }
    }

    /// Attach `dim` to every vertex and the same builder-provided matrix to
    /// every edge via `make(edge) -> Matrix`.
    pub fn uniform<F>(graph: DirectedMultigraph, dim: usize, mut make: F) -> Self
    where
        F: FnMut(&EdgeId) -> Matrix,
    {
        let dims = graph.vertices().map(|v| (v.clone(), dim)).collect();
        let mats = graph.edges().iter().map(|e| (e.id.clone(), make(&e.id))).collect();
        GraphOfMatrices { graph, dims, mats }
    }

    pub fn dim(&self, v: &VertexId) -> Option<usize> {
        self.dims.get(v).copied()
    }

    pub fn matrix(&self, e: &EdgeId) -> Option<&Matrix> {
        self.mats.get(e)
    }

    pub fn set_dim(&mut self, v: VertexId, dim: usize) {
        self.dims.insert(v, dim);
    }

    pub fn set_matrix(&mut self, e: EdgeId, m: Matrix) {
        self.mats.insert(e, m);
    }

    pub(crate) fn take_matrix(&mut self, e: &EdgeId) -> Option<Matrix> {
        self.mats.remove(e)
    }

    /// Check every dimension invariant; an empty list means the instance is
    /// well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for v in self.graph.vertices() {
            match self.dims.get(v) {
                None => out.push(Violation {
                    subject: format!("vertex {v}"),
                    message: "no dimension assigned".into(),
                }),
                Some(0) => out.push(Violation {
                    subject: format!("vertex {v}"),
                    message: "dimension must be positive".into(),
                }),
                Some(&d) if d > MAX_DIM => out.push(Violation {
                    subject: format!("vertex {v}"),
                    message: format!("dimension {d} exceeds the supported maximum {MAX_DIM}"),
                }),
                _ => {}
            }
        }
        for e in self.graph.edges() {
            let (Some(&ns), Some(&nt)) = (self.dims.get(&e.source), self.dims.get(&e.target))
            else {
                continue; // missing dims already reported
            };
            match self.mats.get(&e.id) {
                None => out.push(Violation {
                    subject: format!("edge {}", e.id),
                    message: "no matrix assigned".into(),
                }),
                Some(m) if m.rows() != nt || m.cols() != ns => out.push(Violation {
                    subject: format!("edge {}", e.id),
                    message: format!(
                        "expected a {nt}x{ns} matrix (target dim x source dim), found {}x{}",
                        m.rows(),
                        m.cols()
                    ),
                }),
                _ => {}
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Map the violation list into an error; `Ok` when valid.
    pub fn require_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            let joined = violations
                .iter()
                .map(Violation::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::Invalid(joined))
        }
    }

    /// Product of the operator norms of all edge matrices.
    pub fn norm_product(&self) -> f64 {
        self.graph
            .edges()
            .iter()
            .map(|e| self.mats.get(&e.id).map_or(f64::NAN, Matrix::operator_norm))
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeId, VertexId};

    fn v(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn e(s: &str) -> EdgeId {
        EdgeId::from(s)
    }

    #[test]
    fn validate_accepts_matching_dims() {
        let g = DirectedMultigraph::build([v("a")], [(e("l"), v("a"), v("a"))]).unwrap();
        let gom = GraphOfMatrices::uniform(g, 3, |_| Matrix::identity(3));
        assert!(gom.validate().is_empty());
    }

    #[test]
    fn validate_checks_rectangular_orientation() {
        let g = DirectedMultigraph::build(
            [v("a"), v("b")],
            [(e("e1"), v("a"), v("b"))],
        )
        .unwrap();
        let mut gom = GraphOfMatrices::new(g, BTreeMap::new(), BTreeMap::new());
        gom.set_dim(v("a"), 2);
        gom.set_dim(v("b"), 3);
        gom.set_matrix(e("e1"), Matrix::zeros(3, 2));
        assert!(gom.validate().is_empty());

        gom.set_matrix(e("e1"), Matrix::zeros(2, 3));
        let violations = gom.validate();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].subject, "edge e1");
        assert!(violations[0].message.contains("3x2"));
    }

    #[test]
    fn validate_rejects_oversize_dims() {
        let g = DirectedMultigraph::build([v("a")], []).unwrap();
        let gom = GraphOfMatrices::uniform(g, MAX_DIM + 1, |_| Matrix::identity(1));
        assert!(!gom.validate().is_empty());
    }

    #[test]
    fn norm_of_identity_and_diagonal() {
        assert!((Matrix::identity(5).operator_norm() - 1.0).abs() < 1e-12);
        let d = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -5.0]]).unwrap();
        assert!((d.operator_norm() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn norm_survives_ones_orthogonal_to_top_vector() {
        // top singular pair of [[1,-2],[-2,1]] lives on (1,-1)/√2, exactly
        // orthogonal to the all-ones start; the seeded start must catch it
        let m = Matrix::from_rows(&[vec![1.0, -2.0], vec![-2.0, 1.0]]).unwrap();
        assert!((m.operator_norm() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn norm_of_zero_matrix() {
        assert_eq!(Matrix::zeros(4, 7).operator_norm(), 0.0);
    }

    #[test]
    fn transpose_involution_and_norm_invariance() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let t = m.transpose();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.cols(), 1);
        assert_eq!(t.transpose(), m);
        assert_eq!(Matrix::identity(4).transpose(), Matrix::identity(4));
        assert!((m.operator_norm() - t.operator_norm()).abs() < 1e-12);
    }

    #[test]
    fn norm_sandwich_on_seeded_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let r = rng.random_range(1..=5);
            let c = rng.random_range(1..=5);
            let data: Vec<f64> = (0..r * c).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let m = Matrix::new(r, c, data).unwrap();
            let norm = m.operator_norm();
            assert!(norm >= m.max_abs_entry() - 1e-9);
            assert!(norm <= m.frobenius() + 1e-9);
        }
    }

    // closed-form eigenvalue oracle for TᵀT, up to 3x3
    fn spectral_norm_oracle(m: &Matrix) -> f64 {
        let b = m.transpose().matmul(m).unwrap();
        let n = b.rows();
        let eig_max = match n {
            1 => b.get(0, 0),
            2 => {
                let (a, d) = (b.get(0, 0), b.get(1, 1));
                let off = b.get(0, 1);
                let mid = (a + d) / 2.0;
                let disc = ((a - d) / 2.0).powi(2) + off * off;
                mid + disc.sqrt()
            }
            3 => {
                // symmetric 3x3 via the trigonometric closed form
                let q = b.trace().unwrap() / 3.0;
                let mut c = b.clone();
                for i in 0..3 {
                    c.set(i, i, c.get(i, i) - q);
                }
                let p2: f64 = c.data().iter().map(|&x| x * x).sum::<f64>() / 6.0;
                if p2 == 0.0 {
                    q
                } else {
                    let p = p2.sqrt();
                    let det = det3(&c);
                    let r = (det / (2.0 * p * p * p)).clamp(-1.0, 1.0);
                    let phi = r.acos() / 3.0;
                    q + 2.0 * p * phi.cos()
                }
            }
            _ => unreachable!(),
        };
        eig_max.max(0.0).sqrt()
    }

    fn det3(m: &Matrix) -> f64 {
        m.get(0, 0) * (m.get(1, 1) * m.get(2, 2) - m.get(1, 2) * m.get(2, 1))
            - m.get(0, 1) * (m.get(1, 0) * m.get(2, 2) - m.get(1, 2) * m.get(2, 0))
            + m.get(0, 2) * (m.get(1, 0) * m.get(2, 1) - m.get(1, 1) * m.get(2, 0))
    }

    #[test]
    fn norm_matches_eigenvalue_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let r = rng.random_range(1..=3);
            let c = rng.random_range(1..=3);
            let data: Vec<f64> = (0..r * c).map(|_| rng.random_range(-2.0..=2.0)).collect();
            let m = Matrix::new(r, c, data).unwrap();
            let expected = spectral_norm_oracle(&m);
            let got = m.operator_norm();
            assert!(
                (got - expected).abs() <= 1e-8 * expected.max(1.0),
                "norm mismatch: power iteration {got}, oracle {expected}"
            );
        }
    }
}
