//! Directed multigraphs with loops and parallel edges.
//!
//! Edges are kept as an ordered sequence: position ties an edge to the matrix
//! attached to it downstream, and declaration order doubles as the canonical
//! order used for every deterministic tie-break in the crate.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(id: impl Into<String>) -> Self {
        VertexId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(String);

impl EdgeId {
    pub fn new(id: impl Into<String>) -> Self {
        EdgeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_owned())
    }
}

/// A directed edge; `source` and `target` are the tail and head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub source: VertexId,
    pub target: VertexId,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// Which end of an edge is meant when redistributing edge-ends at a vertex.
/// A loop has two independently addressable ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeEnd {
    Source,
    Target,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DirectedMultigraph {
    vertices: IndexSet<VertexId>,
    edges: Vec<Edge>,
    edge_index: HashMap<EdgeId, usize>,
}

impl DirectedMultigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build a validated graph from explicit vertex and edge lists.
    pub fn build<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (EdgeId, VertexId, VertexId)>,
    {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        for (id, source, target) in edges {
            g.add_edge(id, source, target)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<()> {
        if !self.vertices.insert(v.clone()) {
            return Err(Error::Input(format!("duplicate vertex id `{v}`")));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, id: EdgeId, source: VertexId, target: VertexId) -> Result<()> {
        if self.edge_index.contains_key(&id) {
            return Err(Error::Input(format!("duplicate edge id `{id}`")));
        }
        if !self.vertices.contains(&source) {
            return Err(Error::Input(format!(
                "edge `{id}`: source `{source}` is not a declared vertex"
            )));
        }
        if !self.vertices.contains(&target) {
            return Err(Error::Input(format!(
                "edge `{id}`: target `{target}` is not a declared vertex"
            )));
        }
        self.edge_index.insert(id.clone(), self.edges.len());
        self.edges.push(Edge { id, source, target });
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertices in canonical (declaration) order.
    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    /// Edges in canonical (declaration) order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edge_index.get(id).map(|&i| &self.edges[i])
    }

    pub fn edge_position(&self, id: &EdgeId) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// Canonical rank of a vertex; the total order behind every
    /// "least vertex" tie-break.
    pub fn vertex_rank(&self, v: &VertexId) -> Option<usize> {
        self.vertices.get_index_of(v)
    }

    /// The least vertex of `set` in canonical order.
    pub fn min_vertex<'a, I>(&self, set: I) -> Option<&'a VertexId>
    where
        I: IntoIterator<Item = &'a VertexId>,
    {
        set.into_iter()
            .filter_map(|v| self.vertex_rank(v).map(|r| (r, v)))
            .min_by_key(|&(r, _)| r)
            .map(|(_, v)| v)
    }

    /// Edge-ends incident to `v` as (edge position, end) pairs, in canonical
    /// order; a loop contributes both of its ends.
    pub fn incident_ends(&self, v: &VertexId) -> Vec<(usize, EdgeEnd)> {
        let mut ends = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.source == *v {
                ends.push((i, EdgeEnd::Source));
            }
            if e.target == *v {
                ends.push((i, EdgeEnd::Target));
            }
        }
        ends
    }

    /// Undirected connected components, each sorted canonically, components
    /// ordered by their least vertex.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertices.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            let s = self.vertex_rank(&e.source).expect("endpoint declared");
            let t = self.vertex_rank(&e.target).expect("endpoint declared");
            if s != t {
                adj[s].push(t);
                adj[t].push(s);
            }
        }
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            seen[start] = true;
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            components.push(
                comp.into_iter()
                    .map(|r| self.vertices[r].clone())
                    .collect(),
            );
        }
        components
    }

    pub(crate) fn reverse_edge_direction(&mut self, id: &EdgeId) -> Result<()> {
        let i = *self
            .edge_index
            .get(id)
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))?;
        let e = &mut self.edges[i];
        std::mem::swap(&mut e.source, &mut e.target);
        Ok(())
    }

    pub(crate) fn set_endpoint(&mut self, position: usize, end: EdgeEnd, v: VertexId) {
        debug_assert!(self.vertices.contains(&v));
        let e = &mut self.edges[position];
        match end {
            EdgeEnd::Source => e.source = v,
            EdgeEnd::Target => e.target = v,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn e(s: &str) -> EdgeId {
        EdgeId::from(s)
    }

    #[test]
    fn builds_loop_and_parallels() {
        let g = DirectedMultigraph::build(
            [v("a"), v("b")],
            [
                (e("l"), v("a"), v("a")),
                (e("p1"), v("a"), v("b")),
                (e("p2"), v("a"), v("b")),
            ],
        )
        .unwrap();
        assert!(g.edge(&e("l")).unwrap().is_loop());
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn rejects_dangling_endpoint() {
        let err = DirectedMultigraph::build([v("a")], [(e("e1"), v("a"), v("b"))]).unwrap_err();
        assert!(err.to_string().contains("not a declared vertex"));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let err = DirectedMultigraph::build([v("a"), v("a")], []).unwrap_err();
        assert!(err.to_string().contains("duplicate vertex"));

        let err = DirectedMultigraph::build(
            [v("a"), v("b")],
            [(e("e1"), v("a"), v("b")), (e("e1"), v("b"), v("a"))],
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate edge"));
    }

    #[test]
    fn components_examples() {
        let cycle = DirectedMultigraph::build(
            [v("a"), v("b"), v("c")],
            [
                (e("e1"), v("a"), v("b")),
                (e("e2"), v("b"), v("c")),
                (e("e3"), v("c"), v("a")),
            ],
        )
        .unwrap();
        assert_eq!(cycle.connected_components().len(), 1);

        let two_edges = DirectedMultigraph::build(
            [v("a"), v("b"), v("c"), v("d")],
            [(e("e1"), v("a"), v("b")), (e("e2"), v("c"), v("d"))],
        )
        .unwrap();
        assert_eq!(
            two_edges.connected_components(),
            vec![vec![v("a"), v("b")], vec![v("c"), v("d")]]
        );

        let isolated = DirectedMultigraph::build(
            [v("a"), v("b"), v("w")],
            [(e("e1"), v("a"), v("b"))],
        )
        .unwrap();
        assert_eq!(
            isolated.connected_components(),
            vec![vec![v("a"), v("b")], vec![v("w")]]
        );
    }

    #[test]
    fn component_count_ignores_direction() {
        let g = DirectedMultigraph::build(
            [v("a"), v("b"), v("c")],
            [(e("e1"), v("a"), v("b")), (e("e2"), v("c"), v("b"))],
        )
        .unwrap();
        let mut rev = g.clone();
        rev.reverse_edge_direction(&e("e2")).unwrap();
        assert_eq!(
            g.connected_components().len(),
            rev.connected_components().len()
        );
    }
}
