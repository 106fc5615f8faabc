//! Level decomposition of an input-output graph and the operator
//! factorization T_𝔊 = L_r·T_r···L_1·T_1·L_0, with graph-sum evaluation via
//! the all-ones vector state.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};
use crate::matrix::Matrix;
use crate::modification::{check_io, IOGraph};

/// Default cap on the per-level products of dimensions (vertex widths and
/// edge in/out widths) that the operator builder will materialize.
pub const DEFAULT_LEVEL_WIDTH_CAP: u128 = 1 << 20;

/// Guard on single allocations: rows × cols of any level matrix.
const ALLOC_CAP_ENTRIES: u128 = 1 << 27;

/// Stratification of an input-output graph by longest-path distance from the
/// inputs: after normalization every edge spans exactly one level and every
/// output sits at the top level.
#[derive(Clone, Debug)]
pub struct LevelDecomposition {
    pub depth: usize,
    pub vertex_levels: BTreeMap<VertexId, usize>,
    pub edge_levels: BTreeMap<EdgeId, usize>,
}

/// Longest-path distance from the input set to every vertex. Zero exactly on
/// the inputs; well-defined because the graph is acyclic.
pub fn distance_levels(io: &IOGraph) -> Result<BTreeMap<VertexId, usize>> {
    require_io(io)?;
    let g = &io.gom.graph;
    let n = g.vertex_count();
    let rank = |v: &VertexId| g.vertex_rank(v).expect("declared");

    let mut indeg = vec![0usize; n];
    for e in g.edges() {
        indeg[rank(&e.target)] += 1;
    }
    let mut level = vec![0usize; n];
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(u) = queue.pop() {
        seen += 1;
        for e in g.edges() {
            if rank(&e.source) != u {
                continue;
            }
            let t = rank(&e.target);
            level[t] = level[t].max(level[u] + 1);
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push(t);
            }
        }
    }
    if seen != n {
        return Err(Error::Input("directed cycle detected".into()));
    }
    Ok(g
        .vertices()
        .map(|v| (v.clone(), level[rank(v)]))
        .collect())
}

/// Make every edge span exactly one level and lift every output vertex to the
/// top level, by threading chains of fresh identity-carrying vertices through
/// long edges; the original matrix rides the last segment. Neither the graph
/// sum nor the norm product changes.
pub fn normalize_levels(io: &IOGraph) -> Result<(IOGraph, LevelDecomposition)> {
    let levels = distance_levels(io)?;
    let depth = levels.values().copied().max().unwrap_or(0);
    let outputs: HashSet<&VertexId> = io.outputs.iter().collect();

    let mut out = io.clone();
    let mut vertex_levels: BTreeMap<VertexId, usize> = levels
        .iter()
        .map(|(v, &d)| {
            let d = if outputs.contains(v) { depth } else { d };
            (v.clone(), d)
        })
        .collect();
    let mut edge_levels: BTreeMap<EdgeId, usize> = BTreeMap::new();

    let original_edges: Vec<EdgeId> =
        io.gom.graph.edges().iter().map(|e| e.id.clone()).collect();
    for id in original_edges {
        let edge = out.gom.graph.edge(&id).expect("still present").clone();
        let source_level = vertex_levels[&edge.source];
        let target_level = vertex_levels[&edge.target];
        debug_assert!(target_level > source_level);
        let span = target_level - source_level;
        if span == 1 {
            edge_levels.insert(id, target_level);
            continue;
        }
        // identity prefix chain; the original edge keeps its id and matrix
        // on the final segment
        let dim = out.gom.dim(&edge.source).expect("validated");
        let origin = out
            .provenance
            .get(id.as_str())
            .cloned()
            .unwrap_or_else(|| id.to_string());
        let mut prev = edge.source.clone();
        for k in 1..span {
            let vid = VertexId::new(format!("{id}_n{k}"));
            let eid = EdgeId::new(format!("{id}_seg{k}"));
            out.gom.graph.add_vertex(vid.clone())?;
            out.gom.set_dim(vid.clone(), dim);
            out.gom.graph.add_edge(eid.clone(), prev.clone(), vid.clone())?;
            out.gom.set_matrix(eid.clone(), Matrix::identity(dim));
            out.provenance.insert(vid.to_string(), origin.clone());
            out.provenance.insert(eid.to_string(), origin.clone());
            vertex_levels.insert(vid.clone(), source_level + k);
            edge_levels.insert(eid, source_level + k);
            prev = vid;
        }
        let pos = out.gom.graph.edge_position(&id).expect("present");
        out.gom
            .graph
            .set_endpoint(pos, crate::graph::EdgeEnd::Source, prev);
        edge_levels.insert(id, target_level);
    }

    for e in out.gom.graph.edges() {
        debug_assert_eq!(
            vertex_levels[&e.target],
            vertex_levels[&e.source] + 1,
            "edge {} must span exactly one level",
            e.id
        );
    }
    Ok((out, LevelDecomposition { depth, vertex_levels, edge_levels }))
}

/// The operator of an input-output graph as a dense matrix, together with
/// the tensor-factor orderings of its domain and codomain.
#[derive(Clone, Debug)]
pub struct BuiltOperator {
    /// Shape: (Π output dims) × (Π input dims).
    pub matrix: Matrix,
    /// Input vertices in tensor-factor order (ascending canonical rank).
    pub input_order: Vec<VertexId>,
    /// Output vertices in tensor-factor order.
    pub output_order: Vec<VertexId>,
}

/// The partial isometry attached to a vertex: Σ_i |ξ_i^{⊗outgoing}⟩⟨ξ_i^{⊗incoming}|
/// on an `n`-dimensional space. Inputs use `incoming = 1`, outputs
/// `outgoing = 1`, matching the half-edge convention.
pub fn vertex_isometry(n: usize, incoming: usize, outgoing: usize) -> Matrix {
    let rows = n.pow(outgoing as u32);
    let cols = n.pow(incoming as u32);
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..n {
        let mut r = 0usize;
        for _ in 0..outgoing {
            r = r * n + i;
        }
        let mut c = 0usize;
        for _ in 0..incoming {
            c = c * n + i;
        }
        m.set(r, c, 1.0);
    }
    m
}

pub fn build_operator(io: &IOGraph) -> Result<BuiltOperator> {
    build_operator_capped(io, DEFAULT_LEVEL_WIDTH_CAP)
}

/// Materialize T_𝔊 by multiplying per-level matrices: T_k is the Kronecker
/// product of the edge matrices on level k (ascending edge order) and L_k the
/// joint vertex isometry routing level-k tensor factors, both built against
/// the fixed ascending orderings.
pub fn build_operator_capped(io: &IOGraph, width_cap: u128) -> Result<BuiltOperator> {
    let (nio, lvl) = normalize_levels(io)?;
    nio.gom.require_valid()?;
    let g = &nio.gom.graph;
    let r = lvl.depth;
    let dim = |v: &VertexId| nio.gom.dim(v).expect("validated");

    // per-level vertex and edge lists, ascending canonical order
    let mut vertices_at: Vec<Vec<VertexId>> = vec![Vec::new(); r + 1];
    for v in g.vertices() {
        vertices_at[lvl.vertex_levels[v]].push(v.clone());
    }
    let mut edges_at: Vec<Vec<usize>> = vec![Vec::new(); r + 1];
    for (pos, e) in g.edges().iter().enumerate() {
        edges_at[lvl.edge_levels[&e.id]].push(pos);
    }

    // width checks, reported per level
    let mut report = Vec::new();
    let mut over = false;
    for k in 0..=r {
        let vw: u128 = vertices_at[k]
            .iter()
            .map(|v| dim(v) as u128)
            .product();
        if vw > width_cap {
            over = true;
        }
        report.push(format!("level {k}: vertex width {vw}"));
        if k > 0 {
            let in_w: u128 = edges_at[k]
                .iter()
                .map(|&pos| dim(&g.edges()[pos].source) as u128)
                .product();
            let out_w: u128 = edges_at[k]
                .iter()
                .map(|&pos| dim(&g.edges()[pos].target) as u128)
                .product();
            if in_w > width_cap || out_w > width_cap || in_w * out_w > ALLOC_CAP_ENTRIES {
                over = true;
            }
            report.push(format!("level {k}: edge widths {in_w} -> {out_w}"));
        }
    }
    if over {
        return Err(Error::LevelCapExceeded(format!(
            "cap {width_cap}; {}",
            report.join("; ")
        )));
    }

    // L_k as one matrix: rows run over the sources of level-(k+1) edges (or
    // the output vertices at k = r), columns over the targets of level-k
    // edges (or the input vertices at k = 0); entry 1 where every factor at
    // one vertex carries the same basis index.
    let isometry_level = |k: usize| -> Matrix {
        let col_spaces: Vec<(VertexId, usize)> = if k == 0 {
            vertices_at[0].iter().map(|v| (v.clone(), dim(v))).collect()
        } else {
            edges_at[k]
                .iter()
                .map(|&pos| {
                    let t = g.edges()[pos].target.clone();
                    let d = dim(&t);
                    (t, d)
                })
                .collect()
        };
        let row_spaces: Vec<(VertexId, usize)> = if k == r {
            vertices_at[r].iter().map(|v| (v.clone(), dim(v))).collect()
        } else {
            edges_at[k + 1]
                .iter()
                .map(|&pos| {
                    let s = g.edges()[pos].source.clone();
                    let d = dim(&s);
                    (s, d)
                })
                .collect()
        };
        let rows: usize = row_spaces.iter().map(|(_, d)| d).product();
        let cols: usize = col_spaces.iter().map(|(_, d)| d).product();
        let mut m = Matrix::zeros(rows, cols);

        // iterate over one index per level-k vertex
        let level_vertices = &vertices_at[k];
        let dims: Vec<usize> = level_vertices.iter().map(dim).collect();
        let mut assignment = vec![0usize; level_vertices.len()];
        loop {
            let index_of = |v: &VertexId| {
                let i = level_vertices.iter().position(|u| u == v).expect("on level");
                assignment[i]
            };
            let row = row_spaces
                .iter()
                .fold(0usize, |acc, (v, d)| acc * d + index_of(v));
            let col = col_spaces
                .iter()
                .fold(0usize, |acc, (v, d)| acc * d + index_of(v));
            m.set(row, col, 1.0);

            let mut pos = assignment.len();
            loop {
                if pos == 0 {
                    return m;
                }
                pos -= 1;
                assignment[pos] += 1;
                if assignment[pos] < dims[pos] {
                    break;
                }
                assignment[pos] = 0;
            }
        }
    };

    let mut acc = isometry_level(0);
    for (k, level_edges) in edges_at.iter().enumerate().skip(1) {
        let mut t_k: Option<Matrix> = None;
        for &pos in level_edges {
            let m = nio.gom.matrix(&g.edges()[pos].id).expect("validated");
            t_k = Some(match t_k {
                None => m.clone(),
                Some(prev) => prev.kron(m),
            });
        }
        let t_k = t_k.expect("every level between 0 and r has edges");
        acc = t_k.matmul(&acc)?;
        acc = isometry_level(k).matmul(&acc)?;
    }

    Ok(BuiltOperator {
        matrix: acc,
        input_order: vertices_at[0].clone(),
        output_order: vertices_at[r].clone(),
    })
}

/// S(𝔊) as the pairing ⟨⊗ξ^out, T_𝔊 ⊗ξ^in⟩ with all-ones vectors: the sum of
/// all entries of the built operator.
pub fn graph_sum_via_operator(io: &IOGraph) -> Result<f64> {
    Ok(build_operator(io)?.matrix.entry_sum())
}

pub fn graph_sum_via_operator_capped(io: &IOGraph, width_cap: u128) -> Result<f64> {
    Ok(build_operator_capped(io, width_cap)?.matrix.entry_sum())
}

/// Both sides of ‖T_𝔊‖ ≤ Π‖T_e‖.
pub fn operator_norm_check(io: &IOGraph) -> Result<(f64, f64)> {
    let built = build_operator(io)?;
    Ok((built.matrix.operator_norm(), io.gom.norm_product()))
}

fn require_io(io: &IOGraph) -> Result<()> {
    let violations = check_io(io);
    if violations.is_empty() {
        Ok(())
    } else {
        let joined = violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::Input(format!("not an input-output graph: {joined}")))
    }
}
