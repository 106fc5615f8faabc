//! The JSON document format shared by every external interface.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "vertices": [{"id": "i1", "dim": 4}, ...],
//!   "edges": [{"id": "e1", "source": "i1", "target": "i2", "matrix": <spec>}, ...]
//! }
//! ```
//!
//! A matrix `<spec>` is `"identity"`, `"witness_V"`, `"witness_Vt"`,
//! `{"rows": [[...], ...]}` (row-major reals), or
//! `{"random": "uniform", "seed": 7}` (entries uniform in \[−1, 1\]).
//! `dim` falls back to a caller-supplied global N. Rewritten graphs carry
//! `inputs`, `outputs`, and a flat `provenance` map of new ids to the ids
//! they came from.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedMultigraph, EdgeId, VertexId};
use crate::matrix::{GraphOfMatrices, Matrix};
use crate::modification::IOGraph;
use crate::witness::witness_v_matrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Named(NamedMatrix),
    Rows { rows: Vec<Vec<f64>> },
    Random {
        random: RandomKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum NamedMatrix {
    #[serde(rename = "identity")]
    Identity,
    #[serde(rename = "witness_V")]
    WitnessV,
    #[serde(rename = "witness_Vt")]
    WitnessVt,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum RandomKind {
    #[serde(rename = "uniform")]
    Uniform,
}

impl GraphDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: format!("line {}, column {}: {e}", e.line(), e.column()),
        })?;
        if let Some(version) = doc.schema_version {
            if version != SCHEMA_VERSION {
                return Err(Error::Input(format!(
                    "unsupported schema_version {version}, expected {SCHEMA_VERSION}"
                )));
            }
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// The bare multigraph, ignoring dimensions and matrices.
    pub fn to_graph(&self) -> Result<DirectedMultigraph> {
        DirectedMultigraph::build(
            self.vertices.iter().map(|v| VertexId::new(v.id.clone())),
            self.edges.iter().map(|e| {
                (
                    EdgeId::new(e.id.clone()),
                    VertexId::new(e.source.clone()),
                    VertexId::new(e.target.clone()),
                )
            }),
        )
    }

    /// Resolve dimensions (per-vertex `dim`, else the global default) and
    /// matrix specs into a graph of matrices. `default_seed` feeds `random`
    /// specs that carry no seed of their own, offset by edge position.
    pub fn resolve(&self, global_n: Option<usize>, default_seed: u64) -> Result<GraphOfMatrices> {
        let graph = self.to_graph()?;
        let mut gom = GraphOfMatrices::new(graph, BTreeMap::new(), BTreeMap::new());
        for v in &self.vertices {
            let dim = v.dim.or(global_n).ok_or_else(|| {
                Error::Input(format!(
                    "vertex {}: no dim given and no global N supplied",
                    v.id
                ))
            })?;
            gom.set_dim(VertexId::new(v.id.clone()), dim);
        }
        for (position, e) in self.edges.iter().enumerate() {
            let spec = e.matrix.as_ref().ok_or_else(|| {
                Error::Input(format!("edge {}: missing matrix spec", e.id))
            })?;
            let rows_dim = gom.dim(&VertexId::new(e.target.clone())).expect("set above");
            let cols_dim = gom.dim(&VertexId::new(e.source.clone())).expect("set above");
            let matrix = resolve_spec(spec, rows_dim, cols_dim, default_seed, position)?;
            gom.set_matrix(EdgeId::new(e.id.clone()), matrix);
        }
        Ok(gom)
    }

    pub fn from_graph(graph: &DirectedMultigraph) -> Self {
        GraphDoc {
            schema_version: Some(SCHEMA_VERSION),
            vertices: graph
                .vertices()
                .map(|v| VertexDoc { id: v.to_string(), dim: None })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.to_string(),
                    source: e.source.to_string(),
                    target: e.target.to_string(),
                    matrix: None,
                })
                .collect(),
            inputs: None,
            outputs: None,
            provenance: None,
        }
    }

    pub fn from_gom(gom: &GraphOfMatrices) -> Self {
        let mut doc = GraphDoc::from_graph(&gom.graph);
        for v in &mut doc.vertices {
            v.dim = gom.dim(&VertexId::new(v.id.clone()));
        }
        for e in &mut doc.edges {
            doc_matrix(gom, e);
        }
        doc
    }

    pub fn from_io(io: &IOGraph) -> Self {
        let mut doc = GraphDoc::from_gom(&io.gom);
        doc.inputs = Some(io.inputs.iter().map(|v| v.to_string()).collect());
        doc.outputs = Some(io.outputs.iter().map(|v| v.to_string()).collect());
        doc.provenance = Some(io.provenance.clone());
        doc
    }
}

fn doc_matrix(gom: &GraphOfMatrices, e: &mut EdgeDoc) {
    let Some(m) = gom.matrix(&EdgeId::new(e.id.clone())) else {
        return;
    };
    if m.rows() == m.cols() && *m == Matrix::identity(m.rows()) {
        e.matrix = Some(MatrixSpec::Named(NamedMatrix::Identity));
        return;
    }
    if let Ok(v) = witness_v_matrix(m.rows()) {
        if m.rows() == m.cols() {
            if *m == v {
                e.matrix = Some(MatrixSpec::Named(NamedMatrix::WitnessV));
                return;
            }
            if *m == v.transpose() {
                e.matrix = Some(MatrixSpec::Named(NamedMatrix::WitnessVt));
                return;
            }
        }
    }
    let rows = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect();
    e.matrix = Some(MatrixSpec::Rows { rows });
}

fn resolve_spec(
    spec: &MatrixSpec,
    rows: usize,
    cols: usize,
    default_seed: u64,
    position: usize,
) -> Result<Matrix> {
    match spec {
        // named square specs are sized by the target space; a dimension
        // mismatch then surfaces as a validate violation naming the edge
        MatrixSpec::Named(NamedMatrix::Identity) => Ok(Matrix::identity(rows)),
        MatrixSpec::Named(NamedMatrix::WitnessV) => witness_v_matrix(rows),
        MatrixSpec::Named(NamedMatrix::WitnessVt) => Ok(witness_v_matrix(rows)?.transpose()),
        MatrixSpec::Rows { rows: literal } => Matrix::from_rows(literal),
        MatrixSpec::Random { random: RandomKind::Uniform, seed } => {
            let seed = seed.unwrap_or_else(|| default_seed.wrapping_add(position as u64));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data = (0..rows * cols).map(|_| rng.random_range(-1.0..=1.0)).collect();
            Matrix::new(rows, cols, data)
        }
    }
}
