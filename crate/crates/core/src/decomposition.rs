//! Cutting edges, two-edge connected components, the quotient forest, and the
//! sharp exponent read off from its leaves.

use crate::graph::{DirectedMultigraph, EdgeId, VertexId};
use crate::half::HalfInt;

/// The quotient of a graph by two-edge connectedness. Nodes are the two-edge
/// connected components; each forest edge is induced by exactly one cutting
/// edge of the underlying graph. Always acyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    /// Component vertex sets, canonically ordered (by least vertex, vertices
    /// sorted within each node).
    pub nodes: Vec<Vec<VertexId>>,
    /// Forest edges as (cutting edge id, node index of its source, node index
    /// of its target).
    pub edges: Vec<ForestEdge>,
    /// Node indices grouped into trees, ordered by least node index.
    pub trees: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestEdge {
    pub cut_edge: EdgeId,
    pub source_node: usize,
    pub target_node: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafKind {
    /// Sole node of a single-node tree; weighs 1 in the exponent.
    TrivialLeaf,
    /// Degree-1 node of a non-trivial tree; weighs 1/2.
    TreeLeaf,
    Internal,
}

impl Forest {
    pub fn node_of(&self, v: &VertexId) -> Option<usize> {
        self.nodes.iter().position(|n| n.contains(v))
    }

    /// Degree of a node within the forest.
    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.source_node == node || e.target_node == node)
            .count()
    }

    pub fn tree_of(&self, node: usize) -> usize {
        self.trees
            .iter()
            .position(|t| t.contains(&node))
            .expect("node belongs to a tree")
    }

    /// Classify every node as trivial leaf, tree leaf, or internal.
    pub fn leaf_kinds(&self) -> Vec<LeafKind> {
        let mut kinds = vec![LeafKind::Internal; self.nodes.len()];
        for tree in &self.trees {
            if tree.len() == 1 {
                kinds[tree[0]] = LeafKind::TrivialLeaf;
            } else {
                for &node in tree {
                    if self.degree(node) == 1 {
                        kinds[node] = LeafKind::TreeLeaf;
                    }
                }
            }
        }
        kinds
    }

    /// Leaf nodes of `tree` (for a trivial tree, its sole node).
    pub fn leaves_of_tree(&self, tree: usize) -> Vec<usize> {
        let nodes = &self.trees[tree];
        if nodes.len() == 1 {
            return nodes.clone();
        }
        nodes.iter().copied().filter(|&n| self.degree(n) == 1).collect()
    }

    /// Sum of the leaf weights.
    pub fn exponent(&self) -> HalfInt {
        self.leaf_kinds()
            .iter()
            .map(|kind| match kind {
                LeafKind::TrivialLeaf => HalfInt::ONE,
                LeafKind::TreeLeaf => HalfInt::HALF,
                LeafKind::Internal => HalfInt::ZERO,
            })
            .sum()
    }
}

/// Bridges of the underlying undirected multigraph, in canonical edge order.
/// Loops are never bridges; neither is an edge with a parallel partner.
pub fn cutting_edges(g: &DirectedMultigraph) -> Vec<EdgeId> {
    let bridges = bridge_flags(g);
    g.edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| bridges[i])
        .map(|(_, e)| e.id.clone())
        .collect()
}

/// Low-link bridge detection on the undirected shadow. Traversal tracks edge
/// positions, not endpoint pairs, so parallel edges cancel each other out.
fn bridge_flags(g: &DirectedMultigraph) -> Vec<bool> {
    let n = g.vertex_count();
    // adjacency over non-loop edges, both directions: (edge pos, other vertex)
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        if e.is_loop() {
            continue;
        }
        let s = g.vertex_rank(&e.source).expect("declared");
        let t = g.vertex_rank(&e.target).expect("declared");
        adj[s].push((i, t));
        adj[t].push((i, s));
    }

    let mut order = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut bridges = vec![false; g.edge_count()];
    let mut clock = 0;

    for root in 0..n {
        if order[root] != usize::MAX {
            continue;
        }
        // frames: (vertex, entering edge pos, next adjacency index)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        order[root] = clock;
        low[root] = clock;
        clock += 1;
        while let Some(frame) = stack.last_mut() {
            let (u, via) = (frame.0, frame.1);
            if frame.2 < adj[u].len() {
                let (edge, w) = adj[u][frame.2];
                frame.2 += 1;
                if edge == via {
                    continue; // the tree edge we entered through: skip as an edge, not as an endpoint pair
                }
                if order[w] == usize::MAX {
                    order[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    stack.push((w, edge, 0));
                } else {
                    low[u] = low[u].min(order[w]);
                }
            } else {
                stack.pop();
                if let Some(parent) = stack.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[u]);
                    if low[u] > order[p] {
                        // u's subtree reaches nothing above p: the entry edge is a bridge
                        bridges[via] = true;
                    }
                }
            }
        }
    }
    bridges
}

/// Vertex classes of "connected after deleting all cutting edges". An
/// isolated vertex (loops allowed) is its own class.
pub fn two_edge_components(g: &DirectedMultigraph) -> Vec<Vec<VertexId>> {
    let bridges = bridge_flags(g);
    let n = g.vertex_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        if bridges[i] || e.is_loop() {
            continue;
        }
        let s = g.vertex_rank(&e.source).expect("declared");
        let t = g.vertex_rank(&e.target).expect("declared");
        adj[s].push(t);
        adj[t].push(s);
    }
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut class = Vec::new();
        while let Some(u) = stack.pop() {
            class.push(u);
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        class.sort_unstable();
        classes.push(class);
    }
    let vertices: Vec<VertexId> = g.vertices().cloned().collect();
    classes
        .into_iter()
        .map(|c| c.into_iter().map(|r| vertices[r].clone()).collect())
        .collect()
}

/// The forest of two-edge connected components.
pub fn forest_of(g: &DirectedMultigraph) -> Forest {
    let nodes = two_edge_components(g);
    let node_of = |v: &VertexId| nodes.iter().position(|n| n.contains(v)).expect("covered");
    let edges: Vec<ForestEdge> = cutting_edges(g)
        .into_iter()
        .map(|id| {
            let e = g.edge(&id).expect("cutting edge exists");
            let fe = ForestEdge {
                source_node: node_of(&e.source),
                target_node: node_of(&e.target),
                cut_edge: id,
            };
            debug_assert_ne!(fe.source_node, fe.target_node, "a bridge is never a loop");
            fe
        })
        .collect();

    // group nodes into trees
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for fe in &edges {
        adj[fe.source_node].push(fe.target_node);
        adj[fe.target_node].push(fe.source_node);
    }
    let mut seen = vec![false; nodes.len()];
    let mut trees = Vec::new();
    for start in 0..nodes.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut tree = Vec::new();
        while let Some(u) = stack.pop() {
            tree.push(u);
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        tree.sort_unstable();
        trees.push(tree);
    }
    Forest { nodes, edges, trees }
}

/// Per-node leaf classification in node order.
pub fn classify_leaves(forest: &Forest) -> Vec<(usize, LeafKind)> {
    forest.leaf_kinds().into_iter().enumerate().collect()
}

/// The sharp exponent 𝔯(G): 1 per trivial leaf, 1/2 per leaf of a
/// non-trivial tree of the quotient forest.
pub fn exponent(g: &DirectedMultigraph) -> HalfInt {
    forest_of(g).exponent()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;
    use crate::partition::{graph_of_partition, Partition};

    fn v(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn e(s: &str) -> EdgeId {
        EdgeId::from(s)
    }

    fn tau_graph() -> DirectedMultigraph {
        let tau = Partition::parse(
            "{2,4,11}{3,5,10}{6,7,8}{9,12,14,16,20}{13,15,17,18}{19,22,24}{21,23}{1}",
        )
        .unwrap();
        graph_of_partition(&tau).unwrap()
    }

    fn cycle(n: usize) -> DirectedMultigraph {
        let vs: Vec<VertexId> = (0..n).map(|i| VertexId::new(format!("v{i}"))).collect();
        let es = (0..n).map(|i| {
            (
                EdgeId::new(format!("e{i}")),
                vs[i].clone(),
                vs[(i + 1) % n].clone(),
            )
        });
        DirectedMultigraph::build(vs.clone(), es).unwrap()
    }

    #[test]
    fn tau_cutting_edges() {
        assert_eq!(cutting_edges(&tau_graph()), vec![e("e1"), e("e3"), e("e10")]);
    }

    #[test]
    fn cycle_has_no_bridges_path_is_all_bridges() {
        assert!(cutting_edges(&cycle(3)).is_empty());

        let path = DirectedMultigraph::build(
            [v("a"), v("b"), v("c")],
            [(e("e1"), v("a"), v("b")), (e("e2"), v("b"), v("c"))],
        )
        .unwrap();
        assert_eq!(cutting_edges(&path), vec![e("e1"), e("e2")]);
    }

    #[test]
    fn parallel_edges_and_loops_are_never_bridges() {
        let g = DirectedMultigraph::build(
            [v("a"), v("b")],
            [
                (e("p1"), v("a"), v("b")),
                (e("p2"), v("b"), v("a")),
                (e("l"), v("a"), v("a")),
            ],
        )
        .unwrap();
        assert!(cutting_edges(&g).is_empty());
    }

    #[test]
    fn tau_two_edge_components() {
        let classes = two_edge_components(&tau_graph());
        assert_eq!(
            classes,
            vec![
                vec![v("1")],
                vec![v("2"), v("3"), v("9"), v("13")],
                vec![v("6")],
                vec![v("19"), v("21")],
            ]
        );
    }

    #[test]
    fn singleton_loop_component() {
        let g = DirectedMultigraph::build([v("a")], [(e("l"), v("a"), v("a"))]).unwrap();
        assert_eq!(two_edge_components(&g), vec![vec![v("a")]]);
        let f = forest_of(&g);
        assert_eq!(f.leaf_kinds(), vec![LeafKind::TrivialLeaf]);
        assert_eq!(exponent(&g), HalfInt::ONE);
    }

    #[test]
    fn tau_forest_shape_and_exponent() {
        let f = forest_of(&tau_graph());
        assert_eq!(f.trees.len(), 1);
        assert_eq!(f.nodes.len(), 4);
        assert_eq!(f.edges.len(), 3);
        let kinds = f.leaf_kinds();
        assert_eq!(
            kinds,
            vec![
                LeafKind::TreeLeaf, // {1}
                LeafKind::Internal, // {2,3,9,13}
                LeafKind::TreeLeaf, // {6}
                LeafKind::TreeLeaf, // {19,21}
            ]
        );
        assert_eq!(f.exponent(), HalfInt::from_halves(3));
    }

    #[test]
    fn two_disjoint_cycles_make_two_trivial_trees() {
        let mut g = cycle(3);
        for i in 0..3 {
            g.add_vertex(VertexId::new(format!("w{i}"))).unwrap();
        }
        for i in 0..3 {
            g.add_edge(
                EdgeId::new(format!("f{i}")),
                VertexId::new(format!("w{i}")),
                VertexId::new(format!("w{}", (i + 1) % 3)),
            )
            .unwrap();
        }
        let f = forest_of(&g);
        assert_eq!(f.trees.len(), 2);
        assert_eq!(
            f.leaf_kinds(),
            vec![LeafKind::TrivialLeaf, LeafKind::TrivialLeaf]
        );
        assert_eq!(f.exponent(), HalfInt::from_int(2));
    }

    #[test]
    fn two_node_tree_has_two_leaves() {
        let g = DirectedMultigraph::build(
            [v("a"), v("b")],
            [(e("e1"), v("a"), v("b"))],
        )
        .unwrap();
        let f = forest_of(&g);
        assert_eq!(f.trees.len(), 1);
        assert_eq!(f.leaf_kinds(), vec![LeafKind::TreeLeaf, LeafKind::TreeLeaf]);
        assert_eq!(f.exponent(), HalfInt::ONE);
    }

    #[test]
    fn cycle_exponent_is_one() {
        for m in 2..=6 {
            assert_eq!(exponent(&cycle(m)), HalfInt::ONE);
        }
    }

    #[test]
    fn disjoint_edges_exponent_is_m() {
        for m in 1..=4 {
            let g = graph_of_partition(&Partition::singletons(2 * m).unwrap()).unwrap();
            assert_eq!(exponent(&g), HalfInt::from_int(m as i64));
        }
    }

    #[test]
    fn forest_edge_count_invariant() {
        let f = forest_of(&tau_graph());
        assert_eq!(f.edges.len(), f.nodes.len() - f.trees.len());
    }
}
