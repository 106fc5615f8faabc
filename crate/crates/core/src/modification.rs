//! Sum-preserving graph rewrites: edge reversal (with transposition), vertex
//! splitting (with identity link edges), and the transformation of an
//! arbitrary graph of matrices into input-output form.
//!
//! Every rewrite preserves the graph sum, the forest of two-edge connected
//! components (tree count, leaf structure, exponent), and the product of the
//! edge-matrix norms.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::decomposition::{forest_of, two_edge_components};
use crate::error::{Error, Result};
use crate::graph::{DirectedMultigraph, Edge, EdgeEnd, EdgeId, VertexId};
use crate::matrix::{GraphOfMatrices, Matrix, Violation};

/// A graph of matrices together with designated input and output vertices
/// satisfying the input-output invariants (see [`check_io`]).
#[derive(Clone, Debug)]
pub struct IOGraph {
    pub gom: GraphOfMatrices,
    pub inputs: Vec<VertexId>,
    pub outputs: Vec<VertexId>,
    /// Ids created by rewriting, mapped to the id they originate from.
    pub provenance: BTreeMap<String, String>,
}

/// Disposition of one edge-end when a vertex is split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMove {
    Keep,
    Move,
}

/// One edge-end, addressable for splitting; a loop owns two ends.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EndRef {
    pub edge: EdgeId,
    pub end: EdgeEnd,
}

/// Direction of the identity edge(s) introduced by a split.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LinkDirection {
    /// From the splitting vertex to the freshly created one.
    #[default]
    KeepToNew,
    NewToKeep,
}

/// Reverse one edge and transpose its matrix; the graph sum is unchanged.
pub fn reverse_edge(gom: &GraphOfMatrices, e: &EdgeId) -> Result<GraphOfMatrices> {
    let mut rw = Rewriter::new(gom.clone());
    rw.reverse(e)?;
    Ok(rw.gom)
}

/// Split `v` into `v` and a fresh vertex, redistributing the incident
/// edge-ends per `assignment` (which must cover every end at `v` exactly),
/// and link the two by an identity edge — or by two parallel identity edges
/// when `{v}` was a two-edge connected component by itself, so that the link
/// never becomes a cutting edge. The graph sum is unchanged.
pub fn split_vertex(
    gom: &GraphOfMatrices,
    v: &VertexId,
    assignment: &BTreeMap<EndRef, SplitMove>,
    link: LinkDirection,
) -> Result<(GraphOfMatrices, VertexId)> {
    if !gom.graph.has_vertex(v) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let incident = gom.graph.incident_ends(v);
    if incident.len() != assignment.len() {
        return Err(Error::Input(format!(
            "split of `{v}`: assignment covers {} edge-ends, vertex has {}",
            assignment.len(),
            incident.len()
        )));
    }
    let mut move_ends = BTreeSet::new();
    for (end_ref, disposition) in assignment {
        let pos = gom
            .graph
            .edge_position(&end_ref.edge)
            .ok_or_else(|| Error::UnknownEdge(end_ref.edge.to_string()))?;
        if !incident.contains(&(pos, end_ref.end)) {
            return Err(Error::Input(format!(
                "split of `{v}`: edge `{}` has no {:?} end at this vertex",
                end_ref.edge, end_ref.end
            )));
        }
        if *disposition == SplitMove::Move {
            move_ends.insert((pos, end_ref.end));
        }
    }
    let mut rw = Rewriter::new(gom.clone());
    let (new_vertex, _) = rw.split(v, &move_ends, link)?;
    Ok((rw.gom, new_vertex))
}

/// Verify the input-output invariants:
/// no directed cycle; inputs have only outgoing and outputs only incoming
/// edges; every internal vertex has at least one of each; every vertex lies
/// on a directed path from an input to an output; inputs and outputs are
/// non-empty and disjoint.
pub fn check_io(io: &IOGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let g = &io.gom.graph;
    let inputs: HashSet<&VertexId> = io.inputs.iter().collect();
    let outputs: HashSet<&VertexId> = io.outputs.iter().collect();

    if io.inputs.is_empty() {
        out.push(Violation { subject: "inputs".into(), message: "empty input set".into() });
    }
    if io.outputs.is_empty() {
        out.push(Violation { subject: "outputs".into(), message: "empty output set".into() });
    }
    for v in io.inputs.iter().chain(&io.outputs) {
        if !g.has_vertex(v) {
            out.push(Violation {
                subject: format!("vertex {v}"),
                message: "declared input/output is not a vertex".into(),
            });
        }
    }
    for v in &io.inputs {
        if outputs.contains(v) {
            out.push(Violation {
                subject: format!("vertex {v}"),
                message: "declared both input and output".into(),
            });
        }
    }

    let mut incoming: BTreeMap<&VertexId, usize> = BTreeMap::new();
    let mut outgoing: BTreeMap<&VertexId, usize> = BTreeMap::new();
    for e in g.edges() {
        *outgoing.entry(&e.source).or_default() += 1;
        *incoming.entry(&e.target).or_default() += 1;
    }
    for v in g.vertices() {
        let n_in = incoming.get(v).copied().unwrap_or(0);
        let n_out = outgoing.get(v).copied().unwrap_or(0);
        if inputs.contains(v) {
            if n_in > 0 {
                out.push(Violation {
                    subject: format!("vertex {v}"),
                    message: "input vertex has an incoming edge".into(),
                });
            }
        } else if outputs.contains(v) {
            if n_out > 0 {
                out.push(Violation {
                    subject: format!("vertex {v}"),
                    message: "output vertex has an outgoing edge".into(),
                });
            }
        } else {
            if n_in == 0 {
                out.push(Violation {
                    subject: format!("vertex {v}"),
                    message: "internal vertex has no incoming edge".into(),
                });
            }
            if n_out == 0 {
                out.push(Violation {
                    subject: format!("vertex {v}"),
                    message: "internal vertex has no outgoing edge".into(),
                });
            }
        }
    }

    // acyclicity via Kahn's algorithm
    let n = g.vertex_count();
    let rank = |v: &VertexId| g.vertex_rank(v).expect("declared");
    let mut indeg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in g.edges() {
        indeg[rank(&e.target)] += 1;
        succ[rank(&e.source)].push(rank(&e.target));
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(u) = queue.pop_front() {
        seen += 1;
        for &w in &succ[u] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if seen != n {
        out.push(Violation {
            subject: "graph".into(),
            message: "directed cycle".into(),
        });
    }

    // every vertex forward-reachable from an input and backward-reachable from an output
    let forward = directed_closure(g, &io.inputs, false);
    let backward = directed_closure(g, &io.outputs, true);
    for v in g.vertices() {
        if !forward.contains(v) || !backward.contains(v) {
            out.push(Violation {
                subject: format!("vertex {v}"),
                message: "not on any directed path from an input to an output".into(),
            });
        }
    }
    out
}

fn directed_closure(
    g: &DirectedMultigraph,
    seeds: &[VertexId],
    reversed: bool,
) -> HashSet<VertexId> {
    let mut seen: HashSet<VertexId> = seeds.iter().filter(|v| g.has_vertex(v)).cloned().collect();
    let mut queue: VecDeque<VertexId> = seen.iter().cloned().collect();
    while let Some(u) = queue.pop_front() {
        for e in g.edges() {
            let (from, to) = if reversed { (&e.target, &e.source) } else { (&e.source, &e.target) };
            if *from == u && !seen.contains(to) {
                seen.insert(to.clone());
                queue.push_back(to.clone());
            }
        }
    }
    seen
}

/// Rewrite a graph of matrices into input-output form.
///
/// Per tree of the quotient forest, the leaf containing the least vertex
/// becomes the input leaf and all other leaves become output leaves (a
/// trivial tree serves both roles, its vertex split in two). Cutting edges
/// are oriented along the flow away from the input leaf; every two-edge
/// connected component is then rewritten around one input and one output
/// vertex by growing a directed seed path and attaching one ear at a time.
/// The graph sum, the forest structure, and the norm product are preserved.
pub fn to_input_output(gom: &GraphOfMatrices) -> Result<IOGraph> {
    gom.require_valid()?;
    let mut rw = Rewriter::new(gom.clone());
    let forest = forest_of(&rw.gom.graph);
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();

    for tree_idx in 0..forest.trees.len() {
        let tree = &forest.trees[tree_idx];
        let leaves = forest.leaves_of_tree(tree_idx);
        let input_leaf = *leaves
            .iter()
            .min_by_key(|&&node| min_rank(&rw.gom.graph, &forest.nodes[node]))
            .expect("every tree has a leaf");

        // orient cutting edges away from the input leaf
        let mut incoming_cut: BTreeMap<usize, usize> = BTreeMap::new(); // node -> edge pos
        let mut outgoing_cuts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut visited: BTreeSet<usize> = BTreeSet::new();
        visited.insert(input_leaf);
        let mut queue = VecDeque::from([input_leaf]);
        while let Some(parent) = queue.pop_front() {
            for fe in &forest.edges {
                let (a, b) = (fe.source_node, fe.target_node);
                let child = if a == parent && !visited.contains(&b) {
                    b
                } else if b == parent && !visited.contains(&a) {
                    a
                } else {
                    continue;
                };
                visited.insert(child);
                queue.push_back(child);
                let pos = rw
                    .gom
                    .graph
                    .edge_position(&fe.cut_edge)
                    .expect("cutting edge exists");
                let source_in_parent =
                    forest.nodes[parent].contains(&rw.gom.graph.edges()[pos].source);
                if !source_in_parent {
                    rw.reverse(&fe.cut_edge.clone())?;
                }
                incoming_cut.insert(child, pos);
                outgoing_cuts.entry(parent).or_default().push(pos);
            }
        }
        for cuts in outgoing_cuts.values_mut() {
            cuts.sort_unstable();
        }

        for &node in tree {
            let mut comp: Vec<VertexId> = forest.nodes[node].clone();
            let is_input_leaf = node == input_leaf;
            let is_output_leaf = leaves.contains(&node) && !is_input_leaf;
            let trivial_tree = tree.len() == 1;

            let comp_input: VertexId = if is_input_leaf {
                rw.gom
                    .graph
                    .min_vertex(comp.iter())
                    .expect("non-empty component")
                    .clone()
            } else {
                let pos = incoming_cut[&node];
                rw.gom.graph.edges()[pos].target.clone()
            };
            let chosen_out_cut: Option<usize> =
                outgoing_cuts.get(&node).map(|cuts| cuts[0]);
            let comp_output_choice: Option<VertexId> = if is_output_leaf {
                Some(
                    rw.gom
                        .graph
                        .min_vertex(comp.iter())
                        .expect("non-empty component")
                        .clone(),
                )
            } else {
                chosen_out_cut.map(|pos| rw.gom.graph.edges()[pos].source.clone())
            };

            let has_internal_edges = rw
                .gom
                .graph
                .edges()
                .iter()
                .any(|edge| comp.contains(&edge.source) && comp.contains(&edge.target));

            let (comp_input, comp_output) = match comp_output_choice {
                Some(c) if c != comp_input => {
                    make_component_io(&mut rw, &mut comp, comp_input, c)?
                }
                _ if !trivial_tree && !has_internal_edges => {
                    // a bare pass-through vertex: both roles coexist on it
                    // (incoming and outgoing cutting edges only), nothing to orient
                    (comp_input.clone(), comp_input)
                }
                _ => {
                    // the chosen vertex would serve two roles: split it, the
                    // new vertex taking the output role
                    let mut move_ends: BTreeSet<(usize, EdgeEnd)> = BTreeSet::new();
                    if !is_output_leaf {
                        if let Some(pos) = chosen_out_cut {
                            move_ends.insert((pos, EdgeEnd::Source));
                        }
                    }
                    if comp.len() > 1 {
                        // keep the link edge non-cutting: hand one internal
                        // non-loop end over to the new vertex
                        let end = least_internal_end(&rw.gom.graph, &comp, &comp_input)
                            .expect("a vertex of a non-singleton 2EC component has internal edges");
                        move_ends.insert(end);
                    }
                    let (new_vertex, _) =
                        rw.split(&comp_input, &move_ends, LinkDirection::KeepToNew)?;
                    comp.push(new_vertex.clone());
                    make_component_io(&mut rw, &mut comp, comp_input, new_vertex)?
                }
            };

            if is_input_leaf {
                inputs.push(comp_input);
            }
            if is_output_leaf || trivial_tree {
                outputs.push(comp_output);
            }
        }
    }

    let io = IOGraph { gom: rw.gom, inputs, outputs, provenance: rw.provenance };
    let violations = check_io(&io);
    if !violations.is_empty() {
        let joined = violations.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ");
        return Err(Error::Internal(format!(
            "input-output rewrite produced an invalid graph: {joined}"
        )));
    }
    Ok(io)
}

/// Rewrite a two-edge connected graph of matrices into input-output form with
/// the given input and output vertex.
pub fn io_of_two_edge_component(
    gom: &GraphOfMatrices,
    v: &VertexId,
    w: &VertexId,
) -> Result<IOGraph> {
    gom.require_valid()?;
    if !gom.graph.has_vertex(v) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    if !gom.graph.has_vertex(w) {
        return Err(Error::UnknownVertex(w.to_string()));
    }
    if v == w {
        return Err(Error::Input(
            "input and output vertex must be distinct".into(),
        ));
    }
    let classes = two_edge_components(&gom.graph);
    if classes.len() != 1 {
        return Err(Error::Input(
            "underlying graph is not two-edge connected".into(),
        ));
    }

    let mut rw = Rewriter::new(gom.clone());
    let mut comp: Vec<VertexId> = rw.gom.graph.vertices().cloned().collect();
    let (vin, vout) = make_component_io(&mut rw, &mut comp, v.clone(), w.clone())?;
    let io = IOGraph {
        gom: rw.gom,
        inputs: vec![vin],
        outputs: vec![vout],
        provenance: rw.provenance,
    };
    let violations = check_io(&io);
    if !violations.is_empty() {
        let joined = violations.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ");
        return Err(Error::Internal(format!(
            "component rewrite produced an invalid graph: {joined}"
        )));
    }
    Ok(io)
}

fn min_rank(g: &DirectedMultigraph, vertices: &[VertexId]) -> usize {
    vertices
        .iter()
        .map(|v| g.vertex_rank(v).expect("declared"))
        .min()
        .expect("non-empty")
}

/// Least (canonical) non-loop edge-end at `v` whose edge stays inside `comp`.
fn least_internal_end(
    g: &DirectedMultigraph,
    comp: &[VertexId],
    v: &VertexId,
) -> Option<(usize, EdgeEnd)> {
    g.edges().iter().enumerate().find_map(|(pos, e)| {
        if e.is_loop() || !comp.contains(&e.source) || !comp.contains(&e.target) {
            return None;
        }
        if e.source == *v {
            Some((pos, EdgeEnd::Source))
        } else if e.target == *v {
            Some((pos, EdgeEnd::Target))
        } else {
            None
        }
    })
}

/// Stateful rewriting: applies reversal and split moves to an owned graph of
/// matrices, generating fresh ids and recording their provenance.
struct Rewriter {
    gom: GraphOfMatrices,
    provenance: BTreeMap<String, String>,
}

impl Rewriter {
    fn new(gom: GraphOfMatrices) -> Self {
        Rewriter { gom, provenance: BTreeMap::new() }
    }

    fn origin(&self, id: &str) -> String {
        self.provenance.get(id).cloned().unwrap_or_else(|| id.to_owned())
    }

    fn id_unused(&self, id: &str) -> bool {
        !self.gom.graph.has_vertex(&VertexId::new(id))
            && self.gom.graph.edge_position(&EdgeId::new(id)).is_none()
    }

    fn fresh_vertex(&self, base: &VertexId) -> VertexId {
        for k in 1.. {
            let candidate = format!("{base}_split{k}");
            if self.id_unused(&candidate) {
                return VertexId::new(candidate);
            }
        }
        unreachable!()
    }

    fn fresh_edge(&self, base: &VertexId, taken: &[EdgeId]) -> EdgeId {
        for k in 1.. {
            let candidate = format!("{base}_id{k}");
            if self.id_unused(&candidate) && !taken.iter().any(|t| t.as_str() == candidate) {
                return EdgeId::new(candidate);
            }
        }
        unreachable!()
    }

    fn reverse(&mut self, id: &EdgeId) -> Result<()> {
        self.gom.graph.reverse_edge_direction(id)?;
        if let Some(m) = self.gom.take_matrix(id) {
            self.gom.set_matrix(id.clone(), m.transpose());
        }
        Ok(())
    }

    /// Split `v`, moving the listed edge-ends to a fresh vertex. Adds one
    /// identity link edge, or two parallel ones when `{v}` is a two-edge
    /// connected component by itself (the lone case where a single link
    /// would be a cutting edge). Returns the new vertex and the link ids.
    fn split(
        &mut self,
        v: &VertexId,
        move_ends: &BTreeSet<(usize, EdgeEnd)>,
        link: LinkDirection,
    ) -> Result<(VertexId, Vec<EdgeId>)> {
        let dim = self
            .gom
            .dim(v)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
        let singleton = {
            let classes = two_edge_components(&self.gom.graph);
            classes
                .iter()
                .find(|c| c.contains(v))
                .map(|c| c.len() == 1)
                .unwrap_or(true)
        };

        let new_vertex = self.fresh_vertex(v);
        self.gom.graph.add_vertex(new_vertex.clone())?;
        self.gom.set_dim(new_vertex.clone(), dim);
        self.provenance
            .insert(new_vertex.to_string(), self.origin(v.as_str()));

        for &(pos, end) in move_ends {
            self.gom.graph.set_endpoint(pos, end, new_vertex.clone());
        }

        let link_count = if singleton { 2 } else { 1 };
        let mut links = Vec::new();
        for _ in 0..link_count {
            let id = self.fresh_edge(v, &links);
            let (s, t) = match link {
                LinkDirection::KeepToNew => (v.clone(), new_vertex.clone()),
                LinkDirection::NewToKeep => (new_vertex.clone(), v.clone()),
            };
            self.gom.graph.add_edge(id.clone(), s, t)?;
            self.gom.set_matrix(id.clone(), Matrix::identity(dim));
            self.provenance.insert(id.to_string(), self.origin(v.as_str()));
            links.push(id);
        }
        Ok((new_vertex, links))
    }

    /// Re-point an edge along `from → to`, reversing it if it is currently
    /// stored the other way around.
    fn orient(&mut self, pos: usize, from: &VertexId, to: &VertexId) -> Result<()> {
        let e = &self.gom.graph.edges()[pos];
        if e.source == *from && e.target == *to {
            Ok(())
        } else if e.source == *to && e.target == *from {
            let id = e.id.clone();
            self.reverse(&id)
        } else {
            Err(Error::Internal(format!(
                "edge {} does not join {from} and {to}",
                e.id
            )))
        }
    }
}

#[derive(Clone, Debug)]
struct PathStep {
    pos: usize,
    from: VertexId,
    to: VertexId,
}

/// Breadth-first simple path in the undirected shadow, exploring edges in
/// canonical order; returns the step sequence from `start` to the first
/// vertex satisfying `is_target`.
fn undirected_bfs_path(
    g: &DirectedMultigraph,
    allowed: &dyn Fn(usize) -> bool,
    start: &VertexId,
    is_target: &dyn Fn(&VertexId) -> bool,
) -> Option<Vec<PathStep>> {
    let mut parent: BTreeMap<VertexId, (usize, VertexId)> = BTreeMap::new();
    let mut seen: HashSet<VertexId> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(u) = queue.pop_front() {
        for (pos, e) in g.edges().iter().enumerate() {
            if !allowed(pos) || e.is_loop() {
                continue;
            }
            let other = if e.source == u {
                &e.target
            } else if e.target == u {
                &e.source
            } else {
                continue;
            };
            if seen.contains(other) {
                continue;
            }
            seen.insert(other.clone());
            parent.insert(other.clone(), (pos, u.clone()));
            if is_target(other) {
                // reconstruct
                let mut steps = Vec::new();
                let mut cur = other.clone();
                while cur != *start {
                    let (pos, prev) = parent[&cur].clone();
                    steps.push(PathStep { pos, from: prev.clone(), to: cur });
                    cur = prev;
                }
                steps.reverse();
                return Some(steps);
            }
            queue.push_back(other.clone());
        }
    }
    None
}

/// Is there a directed path `from → to` using only processed edges?
fn directed_path_exists(
    g: &DirectedMultigraph,
    processed: &HashSet<usize>,
    from: &VertexId,
    to: &VertexId,
) -> bool {
    if from == to {
        return true;
    }
    let mut seen: HashSet<VertexId> = HashSet::from([from.clone()]);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(u) = queue.pop_front() {
        for (pos, e) in g.edges().iter().enumerate() {
            if !processed.contains(&pos) || e.source != u {
                continue;
            }
            if e.target == *to {
                return true;
            }
            if !seen.contains(&e.target) {
                seen.insert(e.target.clone());
                queue.push_back(e.target.clone());
            }
        }
    }
    false
}

/// Grow an input-output orientation of one two-edge connected component:
/// seed with a directed path from `vin` to `vout`, then repeatedly attach an
/// ear (an unused edge plus a simple path back to the current subgraph),
/// orienting it consistently with the directed paths already present. An ear
/// that closes a cycle at a single vertex splits that vertex, incoming edges
/// on one side and outgoing on the other, joined by an identity edge.
///
/// Returns the final (input, output) pair: a split at the output vertex
/// hands its role to the freshly created only-incoming twin.
fn make_component_io(
    rw: &mut Rewriter,
    comp: &mut Vec<VertexId>,
    vin: VertexId,
    mut vout: VertexId,
) -> Result<(VertexId, VertexId)> {
    debug_assert_ne!(vin, vout);
    let mut processed: HashSet<usize> = HashSet::new();
    let mut on_gk: HashSet<VertexId> = HashSet::new();

    let in_comp = |comp: &[VertexId], e: &Edge| {
        comp.contains(&e.source) && comp.contains(&e.target)
    };

    // seed path vin → vout
    {
        let comp_snapshot = comp.clone();
        let g = &rw.gom.graph;
        let allowed =
            |pos: usize| in_comp(&comp_snapshot, &g.edges()[pos]);
        let seed = undirected_bfs_path(g, &allowed, &vin, &|v| *v == vout).ok_or_else(|| {
            Error::Internal(format!("no path from {vin} to {vout} inside the component"))
        })?;
        on_gk.insert(vin.clone());
        for step in &seed {
            on_gk.insert(step.to.clone());
        }
        for step in seed {
            rw.orient(step.pos, &step.from, &step.to)?;
            processed.insert(step.pos);
        }
    }

    loop {
        // unprocessed internal edges, canonical order
        let pending: Vec<usize> = rw
            .gom
            .graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(pos, e)| !processed.contains(pos) && in_comp(comp, e))
            .map(|(pos, _)| pos)
            .collect();
        if pending.is_empty() {
            break;
        }
        let epos = *pending
            .iter()
            .find(|&&pos| {
                let e = &rw.gom.graph.edges()[pos];
                on_gk.contains(&e.source) || on_gk.contains(&e.target)
            })
            .ok_or_else(|| Error::Internal("component is not connected".into()))?;

        let edge = rw.gom.graph.edges()[epos].clone();
        let (x, z) = if on_gk.contains(&edge.source) {
            (edge.source.clone(), edge.target.clone())
        } else {
            (edge.target.clone(), edge.source.clone())
        };

        // simple path from z back to the current subgraph, avoiding e
        let tail: Vec<PathStep> = if on_gk.contains(&z) {
            Vec::new()
        } else {
            let comp_snapshot = comp.clone();
            let g = &rw.gom.graph;
            let allowed = |pos: usize| {
                pos != epos && !processed.contains(&pos) && in_comp(&comp_snapshot, &g.edges()[pos])
            };
            undirected_bfs_path(g, &allowed, &z, &|v| on_gk.contains(v)).ok_or_else(|| {
                Error::Internal(format!(
                    "edge {} would be a cutting edge: no return path from {z}",
                    edge.id
                ))
            })?
        };
        let y = tail.last().map(|s| s.to.clone()).unwrap_or_else(|| z.clone());

        if x != y {
            let forward = directed_path_exists(&rw.gom.graph, &processed, &x, &y);
            let backward =
                !forward && directed_path_exists(&rw.gom.graph, &processed, &y, &x);
            if backward {
                // direct the ear from y to x
                for step in tail.iter().rev() {
                    rw.orient(step.pos, &step.to, &step.from)?;
                }
                rw.orient(epos, &z, &x)?;
            } else {
                // a forward path exists, or neither does: direct from x to y
                rw.orient(epos, &x, &z)?;
                for step in &tail {
                    rw.orient(step.pos, &step.from, &step.to)?;
                }
            }
            processed.insert(epos);
            on_gk.insert(z.clone());
            for step in &tail {
                processed.insert(step.pos);
                on_gk.insert(step.to.clone());
            }
        } else {
            // the ear closes a cycle at x: split x, incoming edges staying,
            // outgoing edges moving, the ear threaded from old to new
            let old = x;
            let ear_first = epos;
            let ear_last = tail.last().map(|s| s.pos);

            let mut move_ends: BTreeSet<(usize, EdgeEnd)> = BTreeSet::new();
            for (pos, end) in rw.gom.graph.incident_ends(&old) {
                if pos == ear_first {
                    if edge.is_loop() {
                        // the loop's target end becomes the ear's landing at the new vertex
                        if end == EdgeEnd::Target {
                            move_ends.insert((pos, end));
                        }
                    }
                    // a non-loop ear edge keeps its single end at old: the ear leaves from there
                    continue;
                }
                if Some(pos) == ear_last {
                    // the return path lands at the new vertex
                    move_ends.insert((pos, end));
                    continue;
                }
                if end == EdgeEnd::Source {
                    move_ends.insert((pos, end));
                }
            }

            let (new_vertex, links) = rw.split(&old, &move_ends, LinkDirection::KeepToNew)?;
            comp.push(new_vertex.clone());
            on_gk.insert(new_vertex.clone());

            // orient the ear from old to the new vertex
            if edge.is_loop() {
                // now an edge old → new by construction
                rw.orient(epos, &old, &new_vertex)?;
            } else {
                rw.orient(epos, &old, &z)?;
                for (i, step) in tail.iter().enumerate() {
                    let is_last = i + 1 == tail.len();
                    let to = if is_last { &new_vertex } else { &step.to };
                    rw.orient(step.pos, &step.from, to)?;
                }
            }
            processed.insert(epos);
            for step in &tail {
                processed.insert(step.pos);
                on_gk.insert(step.to.clone());
            }
            on_gk.insert(z.clone());
            for link in links {
                let pos = rw.gom.graph.edge_position(&link).expect("just added");
                processed.insert(pos);
            }

            if old == vout {
                // the only-incoming twin takes over the output role
                vout = new_vertex;
            }
        }
    }
    Ok((vin, vout))
}
