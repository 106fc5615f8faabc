//! `graphsum`: compute sharp exponents, evaluate graph sums two ways, rewrite
//! graphs into input-output form, and build/verify optimal witness matrices.
//!
//! Exit codes: 0 success or check passed, 1 check failed, 2 input error.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use graphsum::decomposition::{forest_of, LeafKind};
use graphsum::evaluation::{bound_report, graph_sum_bruteforce_capped};
use graphsum::modification::to_input_output;
use graphsum::operator::{build_operator_capped, graph_sum_via_operator_capped};
use graphsum::partition::{graph_of_partition, Partition};
use graphsum::schema::{EdgeDoc, GraphDoc, MatrixSpec, NamedMatrix, VertexDoc, SCHEMA_VERSION};
use graphsum::witness::{verify_optimality_capped, witness_matrices};
use graphsum::{Error, GraphOfMatrices};

#[derive(Parser)]
#[command(name = "graphsum", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forest report and the sharp exponent r(G)
    Exponent(CommonArgs),
    /// Build the constraint graph of a partition and emit it as JSON
    GraphOfPartition(PartitionArgs),
    /// Evaluate the graph sum
    Sum(SumArgs),
    /// The sharp bound N^r · prod |T_e| (leaf-wise product form)
    Bound(CommonArgs),
    /// Rewrite into input-output form and emit the result as JSON
    Modify(CommonArgs),
    /// Emit the norm-one witness matrices attaining the bound
    Witness(CommonArgs),
    /// Check that the witness attains N^r, or with --bound that |S| <= bound
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the graph JSON document, or `-` for standard input
    input: Option<String>,
    /// Take the JSON document from the command line instead of a file
    #[arg(long, conflicts_with = "input")]
    inline: Option<String>,
    /// Default dimension for vertices without an explicit `dim`
    #[arg(long)]
    n: Option<usize>,
    /// Cap on brute-force index assignments
    #[arg(long, default_value_t = graphsum::DEFAULT_TERM_CAP)]
    term_cap: u128,
    /// Cap on per-level dimension products in the operator factorization
    #[arg(long, default_value_t = graphsum::DEFAULT_LEVEL_WIDTH_CAP)]
    level_cap: u128,
    /// Relative tolerance for cross-checks
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Seed for `random` matrix specs that do not carry one
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct PartitionArgs {
    /// The partition, e.g. `{1,2,4}{3}` or `[[1,2,4],[3]]`; `-` reads stdin
    #[arg(long)]
    partition: String,
    /// JSON array of matrix specs, one per matrix position
    #[arg(long)]
    matrices: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SumArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Method::Brute)]
    method: Method,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Check |S| <= bound on the given instance instead of witness optimality
    #[arg(long)]
    bound: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Operator,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// 15 significant digits, plain decimal in a sane range.
fn sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.14e}")
    }
}

fn read_document(args: &CommonArgs) -> Result<GraphDoc, Error> {
    let text = match (&args.inline, &args.input) {
        (Some(inline), _) => inline.clone(),
        (None, Some(path)) if path != "-" => std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {path}: {e}")))?,
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Input(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    GraphDoc::parse(&text)
}

fn resolve(args: &CommonArgs) -> Result<GraphOfMatrices, Error> {
    let doc = read_document(args)?;
    let gom = doc.resolve(args.n, args.seed)?;
    gom.require_valid()?;
    Ok(gom)
}

/// Pick the dimension for graph-only commands: --n, else the unanimous `dim`.
fn uniform_n(doc: &GraphDoc, flag: Option<usize>) -> Result<usize, Error> {
    if let Some(n) = flag {
        return Ok(n);
    }
    let dims: Vec<usize> = doc.vertices.iter().filter_map(|v| v.dim).collect();
    match dims.first() {
        Some(&first) if dims.len() == doc.vertices.len() && dims.iter().all(|&d| d == first) => {
            Ok(first)
        }
        _ => Err(Error::Input(
            "supply --n or give every vertex the same dim".into(),
        )),
    }
}

fn exponent_command(args: &CommonArgs) -> Result<i32, Error> {
    let doc = read_document(args)?;
    let graph = doc.to_graph()?;
    let forest = forest_of(&graph);
    let kinds = forest.leaf_kinds();
    let r = forest.exponent();

    let kind_name = |k: &LeafKind| match k {
        LeafKind::TrivialLeaf => "trivial leaf",
        LeafKind::TreeLeaf => "tree leaf",
        LeafKind::Internal => "internal",
    };

    match args.format {
        Format::Text => {
            println!("two-edge connected components:");
            for (i, node) in forest.nodes.iter().enumerate() {
                let names: Vec<&str> = node.iter().map(|v| v.as_str()).collect();
                println!("  c{i}: {{{}}} ({})", names.join(","), kind_name(&kinds[i]));
            }
            let cuts: Vec<&str> = forest.edges.iter().map(|e| e.cut_edge.as_str()).collect();
            println!(
                "cutting edges: {}",
                if cuts.is_empty() { "none".into() } else { cuts.join(", ") }
            );
            for (t, tree) in forest.trees.iter().enumerate() {
                let nodes: Vec<String> = tree.iter().map(|n| format!("c{n}")).collect();
                let leaves = forest.leaves_of_tree(t).len();
                println!(
                    "tree {t}: {} node(s) [{}], {} leaf(s)",
                    tree.len(),
                    nodes.join(", "),
                    leaves
                );
            }
            println!("r = {} (= {})", r, r.to_f64());
        }
        Format::Json => {
            let out = json!({
                "schema_version": SCHEMA_VERSION,
                "components": forest.nodes.iter().enumerate().map(|(i, node)| json!({
                    "name": format!("c{i}"),
                    "vertices": node.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "kind": kind_name(&kinds[i]),
                })).collect::<Vec<_>>(),
                "cutting_edges": forest.edges.iter().map(|e| e.cut_edge.to_string()).collect::<Vec<_>>(),
                "trees": forest.trees.iter().enumerate().map(|(t, tree)| json!({
                    "nodes": tree.iter().map(|n| format!("c{n}")).collect::<Vec<_>>(),
                    "leaves": forest.leaves_of_tree(t).len(),
                })).collect::<Vec<_>>(),
                "exponent": {
                    "numerator": r.numerator(),
                    "denominator": r.denominator(),
                    "value": r.to_f64(),
                },
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
        }
    }
    Ok(0)
}

fn graph_of_partition_command(args: &PartitionArgs) -> Result<i32, Error> {
    let text = if args.partition == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Input(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        args.partition.clone()
    };
    let pi = Partition::parse(&text)?;
    let graph = graph_of_partition(&pi)?;
    let m = graph.edge_count();

    let specs: Vec<MatrixSpec> = match &args.matrices {
        None => vec![MatrixSpec::Named(NamedMatrix::Identity); m],
        Some(raw) => {
            let parsed: Vec<MatrixSpec> = serde_json::from_str(raw)
                .map_err(|e| Error::Input(format!("bad --matrices: {e}")))?;
            if parsed.len() != m {
                return Err(Error::Input(format!(
                    "--matrices has {} entries, the partition needs {m}",
                    parsed.len()
                )));
            }
            parsed
        }
    };

    let doc = GraphDoc {
        schema_version: Some(SCHEMA_VERSION),
        vertices: graph
            .vertices()
            .map(|v| VertexDoc { id: v.to_string(), dim: args.n })
            .collect(),
        edges: graph
            .edges()
            .iter()
            .zip(specs)
            .map(|(e, spec)| EdgeDoc {
                id: e.id.to_string(),
                source: e.source.to_string(),
                target: e.target.to_string(),
                matrix: Some(spec),
            })
            .collect(),
        inputs: None,
        outputs: None,
        provenance: None,
    };
    if args.n.is_some() {
        // catch dimension problems now rather than downstream
        doc.resolve(args.n, args.seed)?.require_valid()?;
    }
    match args.format {
        Format::Text | Format::Json => println!("{}", doc.to_json()),
    }
    Ok(0)
}

fn sum_command(args: &SumArgs) -> Result<i32, Error> {
    let gom = resolve(&args.common)?;
    let brute = match args.method {
        Method::Brute | Method::Both => {
            Some(graph_sum_bruteforce_capped(&gom, args.common.term_cap)?)
        }
        Method::Operator => None,
    };
    let operator = match args.method {
        Method::Operator | Method::Both => {
            let io = to_input_output(&gom)?;
            let s = graph_sum_via_operator_capped(&io, args.common.level_cap)?;
            let built = build_operator_capped(&io, args.common.level_cap)?;
            Some((s, built.matrix.operator_norm(), io.gom.norm_product()))
        }
        Method::Brute => None,
    };

    let mut code = 0;
    let discrepancy = match (brute, &operator) {
        (Some(b), Some((o, _, _))) => {
            let d = (b - o).abs() / b.abs().max(o.abs()).max(1e-300);
            if d > args.common.tolerance {
                code = 1;
            }
            Some(d)
        }
        _ => None,
    };

    match args.common.format {
        Format::Text => {
            if let Some(b) = brute {
                println!("S (brute) = {}", sig15(b));
            }
            if let Some((o, norm_t, product)) = operator {
                println!("S (operator) = {}", sig15(o));
                println!("|T_G| = {} <= prod |T_e| = {}", sig15(norm_t), sig15(product));
            }
            if let Some(d) = discrepancy {
                println!("relative discrepancy = {:.3e}", d);
            }
        }
        Format::Json => {
            let mut out = json!({ "schema_version": SCHEMA_VERSION });
            if let Some(b) = brute {
                out["sum_brute"] = json!(b);
            }
            if let Some((o, norm_t, product)) = operator {
                out["sum_operator"] = json!(o);
                out["operator_norm"] = json!(norm_t);
                out["norm_product"] = json!(product);
            }
            if let Some(d) = discrepancy {
                out["relative_discrepancy"] = json!(d);
            }
            println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
        }
    }
    Ok(code)
}

fn bound_command(args: &CommonArgs) -> Result<i32, Error> {
    let gom = resolve(args)?;
    let report = bound_report(&gom)?;
    match args.format {
        Format::Text => {
            println!("r = {} (= {})", report.exponent, report.exponent.to_f64());
            println!("norm product = {}", sig15(report.norm_product));
            println!("bound = {}", sig15(report.bound));
        }
        Format::Json => {
            let out = json!({
                "schema_version": SCHEMA_VERSION,
                "exponent": {
                    "numerator": report.exponent.numerator(),
                    "denominator": report.exponent.denominator(),
                    "value": report.exponent.to_f64(),
                },
                "norm_product": report.norm_product,
                "bound": report.bound,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
        }
    }
    Ok(0)
}

fn modify_command(args: &CommonArgs) -> Result<i32, Error> {
    let gom = resolve(args)?;
    let io = to_input_output(&gom)?;
    println!("{}", GraphDoc::from_io(&io).to_json());
    Ok(0)
}

fn witness_command(args: &CommonArgs) -> Result<i32, Error> {
    let doc = read_document(args)?;
    let graph = doc.to_graph()?;
    let n = uniform_n(&doc, args.n)?;
    let gom = witness_matrices(&graph, n)?;
    println!("{}", GraphDoc::from_gom(&gom).to_json());
    Ok(0)
}

fn verify_command(args: &VerifyArgs) -> Result<i32, Error> {
    if args.bound {
        let gom = resolve(&args.common)?;
        let s = graph_sum_bruteforce_capped(&gom, args.common.term_cap)?;
        let report = bound_report(&gom)?;
        let pass = s.abs() <= report.bound * (1.0 + args.common.tolerance);
        match args.common.format {
            Format::Text => println!(
                "|S| = {}, bound = {}, {}",
                sig15(s.abs()),
                sig15(report.bound),
                if pass { "PASS" } else { "FAIL" }
            ),
            Format::Json => println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "sum": s,
                    "bound": report.bound,
                    "pass": pass,
                }))
                .expect("serializes")
            ),
        }
        return Ok(if pass { 0 } else { 1 });
    }

    let doc = read_document(&args.common)?;
    let graph = doc.to_graph()?;
    let n = uniform_n(&doc, args.common.n)?;
    let report = verify_optimality_capped(&graph, n, args.common.term_cap)?;
    match args.common.format {
        Format::Text => println!(
            "S = {}, target = {}, {}",
            sig15(report.sum),
            sig15(report.target),
            if report.pass { "PASS" } else { "FAIL" }
        ),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "schema_version": SCHEMA_VERSION,
                "sum": report.sum,
                "target": report.target,
                "exponent": {
                    "numerator": report.exponent.numerator(),
                    "denominator": report.exponent.denominator(),
                    "value": report.exponent.to_f64(),
                },
                "max_norm_deviation": report.max_norm_deviation,
                "pass": report.pass,
            }))
            .expect("serializes")
        ),
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn run() -> Result<i32, Error> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Exponent(args) => exponent_command(args),
        Command::GraphOfPartition(args) => graph_of_partition_command(args),
        Command::Sum(args) => sum_command(args),
        Command::Bound(args) => bound_command(args),
        Command::Modify(args) => modify_command(args),
        Command::Witness(args) => witness_command(args),
        Command::Verify(args) => verify_command(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(0) => ExitCode::from(0),
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
