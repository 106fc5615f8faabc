//! Acceptance suite: one test per advertised guarantee, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the report.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use graphsum::decomposition::{cutting_edges, exponent, forest_of, LeafKind};
use graphsum::evaluation::{bound, graph_sum_bruteforce, partition_sum};
use graphsum::graph::{DirectedMultigraph, EdgeId, VertexId};
use graphsum::half::HalfInt;
use graphsum::matrix::{GraphOfMatrices, Matrix};
use graphsum::modification::{check_io, to_input_output};
use graphsum::operator::{graph_sum_via_operator, operator_norm_check, vertex_isometry};
use graphsum::partition::{graph_of_partition, Partition};
use graphsum::witness::verify_optimality;

const TAU_TEXT: &str =
    "{2,4,11}{3,5,10}{6,7,8}{9,12,14,16,20}{13,15,17,18}{19,22,24}{21,23}{1}";

fn report(name: &str, pass: bool) {
    println!("{}: {}", name, if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name} failed");
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

fn random_multigraph(
    rng: &mut ChaCha8Rng,
    max_vertices: usize,
    max_edges: usize,
    connected: bool,
) -> DirectedMultigraph {
    let nv = rng.random_range(1..=max_vertices);
    let vs: Vec<VertexId> = (0..nv).map(|i| VertexId::new(format!("v{i}"))).collect();
    let mut g = DirectedMultigraph::new();
    for v in &vs {
        g.add_vertex(v.clone()).unwrap();
    }
    let mut k = 0;
    if connected {
        for i in 1..nv {
            let j = rng.random_range(0..i);
            g.add_edge(EdgeId::new(format!("e{k}")), vs[j].clone(), vs[i].clone())
                .unwrap();
            k += 1;
        }
    }
    let budget = max_edges.saturating_sub(k);
    let extra = rng.random_range(0..=budget);
    for _ in 0..extra {
        let a = rng.random_range(0..nv);
        let b = rng.random_range(0..nv);
        g.add_edge(EdgeId::new(format!("e{k}")), vs[a].clone(), vs[b].clone())
            .unwrap();
        k += 1;
    }
    g
}

fn with_random_matrices(g: DirectedMultigraph, n: usize, rng: &mut ChaCha8Rng) -> GraphOfMatrices {
    let mats: Vec<Matrix> = g.edges().iter().map(|_| random_matrix(rng, n, n)).collect();
    let mut i = 0;
    GraphOfMatrices::uniform(g, n, |_| {
        i += 1;
        mats[i - 1].clone()
    })
}

/// Criterion 1: the running 24-position example parses to the 8-block
/// partition, its exponent is exactly 3/2, and the forest is a single tree
/// with four nodes and three leaves — in under a second.
#[test]
fn criterion_1_tau_exponent() {
    let start = Instant::now();
    let tau = Partition::parse(TAU_TEXT).unwrap();
    let g = graph_of_partition(&tau).unwrap();
    let r = exponent(&g);
    let forest = forest_of(&g);
    let leaves = forest
        .leaf_kinds()
        .iter()
        .filter(|k| **k != LeafKind::Internal)
        .count();
    let elapsed = start.elapsed();

    let pass = r == HalfInt::from_halves(3)
        && forest.trees.len() == 1
        && forest.nodes.len() == 4
        && leaves == 3
        && elapsed.as_secs_f64() < 1.0;
    report("criterion 1 (tau: r = 3/2, one tree, four nodes, three leaves, < 1s)", pass);
}

/// Criterion 2: cycle constraints give exponent exactly 1 and the graph sum
/// reproduces Tr(T_1 ... T_m) for m in 2..=6, relative 1e-12.
#[test]
fn criterion_2_cycles_trace_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut pass = true;
    for m in 2..=6 {
        // σ = {(2,3),(4,5),...,(2m,1)}
        let mut blocks: Vec<Vec<usize>> = (1..m).map(|l| vec![2 * l, 2 * l + 1]).collect();
        blocks.push(vec![2 * m, 1]);
        let sigma = Partition::new(blocks).unwrap();
        let g = graph_of_partition(&sigma).unwrap();
        pass &= exponent(&g) == HalfInt::ONE;

        let ts: Vec<Matrix> = (0..m).map(|_| random_matrix(&mut rng, 3, 3)).collect();
        let mut gom = GraphOfMatrices::new(g.clone(), BTreeMap::new(), BTreeMap::new());
        for v in g.vertices() {
            gom.set_dim(v.clone(), 3);
        }
        for (l, t) in ts.iter().enumerate() {
            gom.set_matrix(EdgeId::new(format!("e{}", l + 1)), t.clone());
        }
        let s = graph_sum_bruteforce(&gom).unwrap();

        let mut product = ts[0].clone();
        for t in &ts[1..] {
            product = product.matmul(t).unwrap();
        }
        let trace = product.trace().unwrap();
        pass &= (s - trace).abs() <= 1e-12 * trace.abs().max(1.0);
    }
    report("criterion 2 (cycles: r = 1 and sum = Tr(T1...Tm) at 1e-12)", pass);
}

/// Criterion 3: the witness construction on the running example attains
/// N^{3/2} exactly (1, 8, 27 for N = 1, 4, 9) with all norms 1, the N = 4
/// case in under ten seconds.
#[test]
fn criterion_3_tau_optimality() {
    let tau = Partition::parse(TAU_TEXT).unwrap();
    let g = graph_of_partition(&tau).unwrap();
    let mut pass = true;
    for (n, expected) in [(1usize, 1.0), (4, 8.0), (9, 27.0)] {
        let start = Instant::now();
        let r = verify_optimality(&g, n).unwrap();
        let elapsed = start.elapsed();
        pass &= r.pass
            && (r.sum - expected).abs() <= 1e-12 * expected
            && r.max_norm_deviation <= 1e-10;
        if n == 4 {
            pass &= elapsed.as_secs_f64() < 10.0;
        }
    }
    report("criterion 3 (tau witness: S = N^{3/2} for N in {1,4,9}, norms 1)", pass);
}

/// Criterion 4: |S| ≤ N^r · Π‖T_e‖ · (1 + 1e-9) over 200 seeded graphs with
/// entries uniform in [−1, 1], N in {2, 3, 4}; zero violations, < 60 s.
#[test]
fn criterion_4_bound_property() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut violations = 0;
    for case in 0..200 {
        let g = random_multigraph(&mut rng, 6, 8, false);
        let n = [2, 3, 4][case % 3];
        let gom = with_random_matrices(g, n, &mut rng);
        let s = graph_sum_bruteforce(&gom).unwrap();
        let b = bound(&gom).unwrap();
        if s.abs() > b * (1.0 + 1e-9) {
            violations += 1;
            eprintln!("case {case}: |{s}| > {b}");
        }
    }
    let elapsed = start.elapsed();
    report(
        "criterion 4 (bound holds on 200 random graphs, zero violations, < 60s)",
        violations == 0 && elapsed.as_secs_f64() < 60.0,
    );
}

/// Criterion 5: the 2×3 single-edge instance with T = J/√6 attains the
/// rectangular bound √6 at 1e-12, and 50 random rectangular instances
/// respect the product-form bound.
#[test]
fn criterion_5_rectangular_bound() {
    let mut pass = true;

    let g = DirectedMultigraph::build(
        [VertexId::from("a"), VertexId::from("b")],
        [(EdgeId::from("e1"), VertexId::from("a"), VertexId::from("b"))],
    )
    .unwrap();
    let mut gom = GraphOfMatrices::new(g, BTreeMap::new(), BTreeMap::new());
    gom.set_dim(VertexId::from("a"), 2);
    gom.set_dim(VertexId::from("b"), 3);
    let scale = 1.0 / 6.0_f64.sqrt();
    gom.set_matrix(EdgeId::from("e1"), Matrix::new(3, 2, vec![scale; 6]).unwrap());
    let s = graph_sum_bruteforce(&gom).unwrap();
    let b = bound(&gom).unwrap();
    let sqrt6 = 6.0_f64.sqrt();
    pass &= (b - sqrt6).abs() <= 1e-12 * sqrt6;
    pass &= (s - b).abs() <= 1e-12 * b;

    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    for _ in 0..50 {
        let g = random_multigraph(&mut rng, 5, 7, false);
        let dims: BTreeMap<VertexId, usize> = g
            .vertices()
            .map(|v| (v.clone(), rng.random_range(1..=4)))
            .collect();
        let mut gom = GraphOfMatrices::new(g.clone(), BTreeMap::new(), BTreeMap::new());
        for (v, d) in &dims {
            gom.set_dim(v.clone(), *d);
        }
        for e in g.edges() {
            let rows = dims[&e.target];
            let cols = dims[&e.source];
            gom.set_matrix(e.id.clone(), random_matrix(&mut rng, rows, cols));
        }
        let s = graph_sum_bruteforce(&gom).unwrap();
        let b = bound(&gom).unwrap();
        pass &= s.abs() <= b * (1.0 + 1e-9);
    }
    report("criterion 5 (rectangular bound attained at sqrt(6); 50 random instances hold)", pass);
}

/// Criterion 6: the constrained partition sum equals the graph sum of the
/// constraint graph on 100 random partitions (1e-9), and the operator route
/// equals brute force on 30 random input-output instances (1e-9).
#[test]
fn criterion_6_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let mut pass = true;

    for _ in 0..100 {
        let m = rng.random_range(1..=4);
        let n = rng.random_range(1..=3);
        let labels: Vec<u64> = (0..2 * m).map(|_| rng.random_range(0..2 * m as u64)).collect();
        let pi = Partition::kernel_of(&labels).unwrap();
        let ts: Vec<Matrix> = (0..m).map(|_| random_matrix(&mut rng, n, n)).collect();

        let direct = partition_sum(&ts, &pi, n).unwrap();

        let g = graph_of_partition(&pi).unwrap();
        let mut gom = GraphOfMatrices::new(g.clone(), BTreeMap::new(), BTreeMap::new());
        for v in g.vertices() {
            gom.set_dim(v.clone(), n);
        }
        for (l, t) in ts.iter().enumerate() {
            gom.set_matrix(EdgeId::new(format!("e{}", l + 1)), t.clone());
        }
        let via_graph = graph_sum_bruteforce(&gom).unwrap();
        pass &= (direct - via_graph).abs() <= 1e-9 * direct.abs().max(1.0);
    }

    for _ in 0..30 {
        let g = random_multigraph(&mut rng, 4, 6, true);
        let n = rng.random_range(1..=3);
        let gom = with_random_matrices(g, n, &mut rng);
        let io = to_input_output(&gom).unwrap();
        let brute = graph_sum_bruteforce(&gom).unwrap();
        let via_op = graph_sum_via_operator(&io).unwrap();
        pass &= (brute - via_op).abs() <= 1e-9 * brute.abs().max(1.0);
    }
    report("criterion 6 (partition sum = graph sum x100; operator = brute force x30)", pass);
}

/// Criterion 7: the input-output rewrite preserves the sum (1e-9), the norm
/// product (1e-12), the tree count, the per-tree leaf multiset and the
/// exponent, and passes the input-output checks, on 100 random connected
/// graphs.
#[test]
fn criterion_7_modification_preservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let mut pass = true;
    for case in 0..100 {
        let g = random_multigraph(&mut rng, 6, 8, true);
        let n = rng.random_range(1..=3);
        let gom = with_random_matrices(g, n, &mut rng);
        let io = to_input_output(&gom).unwrap();

        let ok_io = check_io(&io).is_empty();

        let before = graph_sum_bruteforce(&gom).unwrap();
        let after = graph_sum_bruteforce(&io.gom).unwrap();
        let ok_sum = (before - after).abs() <= 1e-9 * before.abs().max(1.0);

        let p0 = gom.norm_product();
        let p1 = io.gom.norm_product();
        let ok_norms = (p0 - p1).abs() <= 1e-12 * p0.max(1.0);

        let f0 = forest_of(&gom.graph);
        let f1 = forest_of(&io.gom.graph);
        let mut leaves0: Vec<usize> =
            (0..f0.trees.len()).map(|t| f0.leaves_of_tree(t).len()).collect();
        let mut leaves1: Vec<usize> =
            (0..f1.trees.len()).map(|t| f1.leaves_of_tree(t).len()).collect();
        leaves0.sort_unstable();
        leaves1.sort_unstable();
        let ok_forest = f0.trees.len() == f1.trees.len()
            && leaves0 == leaves1
            && f0.exponent() == f1.exponent();

        if !(ok_io && ok_sum && ok_norms && ok_forest) {
            eprintln!("case {case}: io={ok_io} sum={ok_sum} norms={ok_norms} forest={ok_forest}");
            pass = false;
        }
    }
    report("criterion 7 (rewrite preserves sum, norms, forest on 100 graphs)", pass);
}

/// Criterion 8: ‖T_G‖ ≤ Π‖T_e‖ (1 + 1e-9) on 50 materializable instances,
/// and every vertex isometry satisfies L·Lᵀ·L = L entrywise at 1e-12.
#[test]
fn criterion_8_operator_norm_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let mut pass = true;
    for case in 0..50 {
        let g = random_multigraph(&mut rng, 4, 6, true);
        let n = rng.random_range(1..=3);
        let gom = with_random_matrices(g, n, &mut rng);
        let io = to_input_output(&gom).unwrap();
        let (norm_t, product) = operator_norm_check(&io).unwrap();
        if norm_t > product * (1.0 + 1e-9) {
            eprintln!("case {case}: |T| = {norm_t} > {product}");
            pass = false;
        }

        // per-vertex partial isometries over the degrees present
        for v in io.gom.graph.vertices() {
            let incoming = io.gom.graph.edges().iter().filter(|e| e.target == *v).count();
            let outgoing = io.gom.graph.edges().iter().filter(|e| e.source == *v).count();
            let dim = io.gom.dim(v).unwrap();
            let t = incoming.clamp(1, 4);
            let s = outgoing.clamp(1, 4);
            let l = vertex_isometry(dim, t, s);
            let llt_l = l.matmul(&l.transpose()).unwrap().matmul(&l).unwrap();
            for (a, b) in llt_l.data().iter().zip(l.data()) {
                if (a - b).abs() > 1e-12 {
                    pass = false;
                }
            }
        }
    }
    report("criterion 8 (operator norm bounded by norm product; L L^t L = L)", pass);
}

/// Criterion 9: low-link bridge finding agrees exactly with the
/// delete-one-edge-and-test oracle on 100 random multigraphs.
#[test]
fn criterion_9_bridge_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let mut pass = true;
    for case in 0..100 {
        let g = random_multigraph(&mut rng, 8, 12, false);
        let fast: Vec<EdgeId> = cutting_edges(&g);
        let slow: Vec<EdgeId> = bridge_oracle(&g);
        if fast != slow {
            eprintln!("case {case}: low-link {fast:?} vs oracle {slow:?}");
            pass = false;
        }
    }
    report("criterion 9 (bridges match the delete-and-test oracle exactly x100)", pass);
}

/// Delete each edge in turn and test whether its endpooints disconnect.
fn bridge_oracle(g: &DirectedMultigraph) -> Vec<EdgeId> {
    let vs: Vec<VertexId> = g.vertices().cloned().collect();
    let mut bridges = Vec::new();
    for (skip, e) in g.edges().iter().enumerate() {
        if e.is_loop() {
            continue;
        }
        // undirected reachability from e.source without edge `skip`
        let mut seen = vec![false; vs.len()];
        let rank = |v: &VertexId| vs.iter().position(|u| u == v).unwrap();
        seen[rank(&e.source)] = true;
        let mut stack = vec![rank(&e.source)];
        while let Some(u) = stack.pop() {
            for (i, f) in g.edges().iter().enumerate() {
                if i == skip {
                    continue;
                }
                let (a, b) = (rank(&f.source), rank(&f.target));
                for (x, y) in [(a, b), (b, a)] {
                    if x == u && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if !seen[rank(&e.target)] {
            bridges.push(e.id.clone());
        }
    }
    bridges
}
