//! Command-line front end: parse networks from files or standard input, run
//! the analyses, build and query persisted sensitivity oracles, generate the
//! fixture families, and emit byte-stable JSON or short text reports.
//!
//! Exit codes: `0` on success, `1` on a usage error (bad flags or arguments),
//! `2` on a domain error (unparsable network, unbounded flow, exceeded
//! limits, failed self-checks).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cover::{
    build_insert_oracle, build_tvit_from_analysis, query_cap, query_insert, InsertOracle,
    TvitTree,
};
use crate::dvit::{build_dvit, farthest_mincut, max_crossings};
use crate::error::{Error, Result};
use crate::gen::{
    cover_gadget, gen_db, gen_gm, gen_gsq, heavy_bipartite, path_graph, random_network,
    zigzag_ladder,
};
use crate::graph::{parse_network, serialize_network, CapacityValue, FlowNetwork};
use crate::labels::{build_labels, query_cap_labels, VertexLabel};
use crate::maxflow::max_flow;
use crate::oracle::CutCatalog;
use crate::pqdag::{build_pq, is_one_transversal, stored_cut_sides};
use crate::steiner::{build_steiner_structure, build_svit, query_allcuts};
use crate::vital::{all_vital_edges, EdgeKind};

/// Version tag stamped into every JSON document and oracle file.
pub const SCHEMA: &str = "vitalcut/1";

#[derive(Parser, Debug)]
#[command(
    name = "vitalcut",
    version,
    about = "Vital edges, minimum-cut covers, and sensitivity queries for directed flow networks",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Summarize a network: flow value and edge-class counts.
    Analyze(InputArgs),
    /// Per-edge classification table (tight / loose / nonvital).
    Vital(InputArgs),
    /// Cover of the vital edges by at most n-1 minimum cuts.
    Cover(InputArgs),
    /// Flattened cut structure; with --edge, that edge's farthest least cut.
    Dvit(DvitArgs),
    /// Build the sensitivity oracle and write it to a file.
    OracleBuild(OracleBuildArgs),
    /// Answer a capacity-change or insertion query from an oracle file.
    OracleQuery(OracleQueryArgs),
    /// Cut structure for a set of terminals.
    Steiner(SteinerArgs),
    /// All-minimum-cut structure; with --edge, all least cuts for that edge.
    Allcuts(AllcutsArgs),
    /// Generate a named network family on stdout or into a file.
    Gen(GenArgs),
    /// Cross-check the library against brute-force cut enumeration on
    /// embedded fixtures.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Network file; "-" reads standard input.
    input: String,
    /// Emit JSON instead of the text report.
    #[arg(long)]
    json: bool,
    /// Refuse networks with more than this many vertices.
    #[arg(long, value_name = "N")]
    max_n: Option<usize>,
}

#[derive(Args, Debug)]
struct DvitArgs {
    #[command(flatten)]
    common: InputArgs,
    /// Report the farthest least cut of this edge instead of the structure.
    #[arg(long, value_name = "ID")]
    edge: Option<usize>,
}

#[derive(Args, Debug)]
struct OracleBuildArgs {
    #[command(flatten)]
    common: InputArgs,
    /// Destination file for the serialized oracle.
    #[arg(short = 'o', long = "out", value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = ArgGroup::new("probe").required(true).args(["edge", "insert"]))]
struct OracleQueryArgs {
    /// Oracle file produced by oracle-build.
    oracle: PathBuf,
    /// Edge whose capacity changes by --delta.
    #[arg(long, value_name = "ID", requires = "delta")]
    edge: Option<usize>,
    /// Signed capacity change applied to --edge.
    #[arg(long, value_name = "D", allow_hyphen_values = true, requires = "edge")]
    delta: Option<i64>,
    /// Insert an edge: tail, head, capacity.
    #[arg(long, num_args = 3, value_names = ["U", "V", "CAP"])]
    insert: Option<Vec<u64>>,
    /// Emit JSON instead of the bare number.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SteinerArgs {
    #[command(flatten)]
    common: InputArgs,
    /// Comma-separated terminal vertices.
    #[arg(long, value_delimiter = ',', required = true, value_name = "V1,V2,...")]
    steiner: Vec<usize>,
}

#[derive(Args, Debug)]
struct AllcutsArgs {
    #[command(flatten)]
    common: InputArgs,
    /// Restrict to the least cuts this edge contributes to.
    #[arg(long, value_name = "ID")]
    edge: Option<usize>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(subcommand)]
    scheme: GenScheme,
    /// Write the network here instead of stdout.
    #[arg(short = 'o', long = "out", value_name = "PATH", global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GenScheme {
    /// Unit-fringe bipartite grid whose n*n middle edges have distinct
    /// heavy weights; defaults to weights n*n .. 2n*n-1.
    Gsq {
        #[arg(long)]
        n: usize,
        /// Exactly n*n distinct weights, each at least n*n.
        #[arg(long, value_delimiter = ',', value_name = "W1,W2,...")]
        weights: Option<Vec<u64>>,
    },
    /// Matrix network: infinite fringe edges, one finite middle edge per
    /// entry; row-major square matrix unless --cols is given.
    Gm {
        #[arg(long, value_delimiter = ',', required = true, value_name = "M11,M12,...")]
        matrix: Vec<u64>,
        /// Number of matrix columns.
        #[arg(long, value_name = "K")]
        cols: Option<usize>,
    },
    /// Unit bipartite network from 0/1 adjacency rows.
    Db {
        /// Comma-separated rows of '0'/'1' characters, for example 10,01.
        #[arg(long, value_delimiter = ',', required = true, value_name = "ROW,ROW,...")]
        adj: Vec<String>,
    },
    /// Simple path with the given edge capacities.
    Path {
        #[arg(long, value_delimiter = ',', required = true, value_name = "C1,C2,...")]
        caps: Vec<u64>,
    },
    /// Ladder whose chain and back edges make some least cuts weave 2n-1
    /// times before flattening.
    Zigzag {
        #[arg(long)]
        n: usize,
    },
    /// Complete bipartite core with unit fringes and n^exponent middles.
    Heavy {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        exponent: u32,
    },
    /// Seeded random multigraph with source 0 and sink n-1.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        max_cap: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fixed six-vertex fixture whose cover needs overlapping cuts.
    Gadget,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Skip embedded fixtures with more vertices than this.
    #[arg(long, value_name = "N", default_value_t = 12)]
    max_n: usize,
    /// Emit JSON instead of one line per check.
    #[arg(long)]
    json: bool,
}

/// Serialized sensitivity oracle: the canonical network text plus the three
/// query structures, none of which needs a flow computation to answer.
#[derive(Serialize, Deserialize)]
struct OracleBlob {
    schema: String,
    network: String,
    tree: TvitTree,
    insert: InsertOracle,
    labels: Vec<VertexLabel>,
}

/// Parse `argv` and execute; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap routes help/version to stdout and diagnostics to stderr.
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(output) => {
            print!("{output}");
            0
        }
        Err(e) => {
            eprintln!("vitalcut: {e}");
            2
        }
    }
}

/// Execute one parsed subcommand and render its stdout payload.
fn dispatch(cmd: Cmd) -> Result<String> {
    match cmd {
        Cmd::Analyze(a) => {
            let g = load_network(&a.input, a.max_n)?;
            cmd_analyze(&g, a.json)
        }
        Cmd::Vital(a) => {
            let g = load_network(&a.input, a.max_n)?;
            cmd_vital(&g, a.json)
        }
        Cmd::Cover(a) => {
            let g = load_network(&a.input, a.max_n)?;
            cmd_cover(&g, a.json)
        }
        Cmd::Dvit(a) => {
            let g = load_network(&a.common.input, a.common.max_n)?;
            cmd_dvit(&g, a.edge, a.common.json)
        }
        Cmd::OracleBuild(a) => {
            let g = load_network(&a.common.input, a.common.max_n)?;
            cmd_oracle_build(&g, &a.out, a.common.json)
        }
        Cmd::OracleQuery(a) => cmd_oracle_query(&a),
        Cmd::Steiner(a) => {
            let g = load_network(&a.common.input, a.common.max_n)?;
            cmd_steiner(&g, &a.steiner, a.common.json)
        }
        Cmd::Allcuts(a) => {
            let g = load_network(&a.common.input, a.common.max_n)?;
            cmd_allcuts(&g, a.edge, a.common.json)
        }
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Selftest(a) => cmd_selftest(a.max_n, a.json),
    }
}

/// Read a network from a path or standard input and enforce the size limit
/// before any expensive work happens.
fn load_network(input: &str, max_n: Option<usize>) -> Result<FlowNetwork> {
    let text = if input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(input)?
    };
    let g = parse_network(&text)?;
    if let Some(limit) = max_n {
        if g.n() > limit {
            return Err(Error::LimitExceeded(format!(
                "network has {} vertices, --max-n is {limit}",
                g.n()
            )));
        }
    }
    Ok(g)
}

fn json_line(v: Value) -> String {
    // Default serde_json maps sort keys, so this is byte-deterministic.
    format!("{v}\n")
}

fn cmd_analyze(g: &FlowNetwork, as_json: bool) -> Result<String> {
    let analysis = all_vital_edges(g)?;
    let tight = analysis.rows.iter().filter(|r| r.class == EdgeKind::Tight).count();
    let loose = analysis.rows.iter().filter(|r| r.class == EdgeKind::Loose).count();
    let vital = tight + loose;
    if as_json {
        return Ok(json_line(json!({
            "schema": SCHEMA,
            "n": g.n(),
            "m": g.m(),
            "s": g.s(),
            "t": g.t(),
            "fstar": analysis.fstar,
            "vital": vital,
            "tight": tight,
            "loose": loose,
            "flow_calls": {
                "loose_side": analysis.loose_flow_calls,
                "tight_side": analysis.tight_flow_calls,
            },
        })));
    }
    let mut out = String::new();
    writeln!(out, "f* = {}", analysis.fstar).unwrap();
    writeln!(out, "n = {}, m = {}, s = {}, t = {}", g.n(), g.m(), g.s(), g.t()).unwrap();
    writeln!(out, "vital edges: {vital} of {} (tight {tight}, loose {loose})", g.m()).unwrap();
    writeln!(
        out,
        "flow calls: {} loose-side, {} tight-side",
        analysis.loose_flow_calls, analysis.tight_flow_calls
    )
    .unwrap();
    Ok(out)
}

fn cmd_vital(g: &FlowNetwork, as_json: bool) -> Result<String> {
    let analysis = all_vital_edges(g)?;
    if as_json {
        return Ok(json_line(json!({
            "schema": SCHEMA,
            "fstar": analysis.fstar,
            "edges": analysis.rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        })));
    }
    let mut out = String::new();
    writeln!(out, "f* = {}", analysis.fstar).unwrap();
    writeln!(out, "edge\ttail\thead\tcap\tclass\tvitality\tlambda").unwrap();
    for r in &analysis.rows {
        let e = g.edge(r.edge)?;
        let class = match r.class {
            EdgeKind::Tight => "tight",
            EdgeKind::Loose => "loose",
            EdgeKind::Nonvital => "nonvital",
        };
        let lambda = r.lambda.map_or_else(|| "-".to_string(), |c| c.to_string());
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.edge, e.tail, e.head, e.cap, class, r.vitality, lambda
        )
        .unwrap();
    }
    Ok(out)
}

fn cmd_cover(g: &FlowNetwork, as_json: bool) -> Result<String> {
    let analysis = all_vital_edges(g)?;
    let tree = build_tvit_from_analysis(g, &analysis)?;
    let cover = tree.core.cover();
    if as_json {
        return Ok(json_line(json!({
            "schema": SCHEMA,
            "fstar": tree.fstar,
            "cover_size": tree.cover_size(),
            "cuts": cover
                .iter()
                .map(|(lambda, cut)| json!({"lambda": lambda, "side": cut.vertices()}))
                .collect::<Vec<_>>(),
        })));
    }
    let mut out = String::new();
    writeln!(out, "f* = {}", tree.fstar).unwrap();
    writeln!(out, "cover size = {} (limit n-1 = {})", tree.cover_size(), g.n() - 1).unwrap();
    for (i, (lambda, cut)) in cover.iter().enumerate() {
        writeln!(out, "cut {i}: capacity {lambda}, side = {:?}", cut.vertices()).unwrap();
    }
    Ok(out)
}

fn cmd_dvit(g: &FlowNetwork, edge: Option<usize>, as_json: bool) -> Result<String> {
    let analysis = all_vital_edges(g)?;
    if let Some(e_id) = edge {
        let cut = farthest_mincut(g, e_id)?;
        if as_json {
            return Ok(json_line(json!({
                "schema": SCHEMA,
                "edge": e_id,
                "capacity": cut.capacity,
                "side": cut.vertices(),
            })));
        }
        return Ok(format!(
            "farthest least cut for edge {e_id}: capacity {}, side = {:?}\n",
            cut.capacity,
            cut.vertices()
        ));
    }
    let d = build_dvit(g, &analysis)?;
    if as_json {
        let mut doc = d.to_json();
        doc["schema"] = json!(SCHEMA);
        return Ok(json_line(doc));
    }
    let mut out = String::new();
    writeln!(out, "f* = {}", d.fstar).unwrap();
    writeln!(out, "nodes = {}, arcs = {}", d.node_count(), d.arcs.len()).unwrap();
    for (x, members) in d.members.iter().enumerate() {
        writeln!(out, "node {x}: {members:?}").unwrap();
    }
    for a in &d.arcs {
        writeln!(
            out,
            "arc {} -> {} (edge {}, cap {}, {})",
            a.tail,
            a.head,
            a.edge,
            a.cap,
            match a.kind {
                crate::dvit::DvitArcKind::Kept => "kept",
                crate::dvit::DvitArcKind::Reversed0 => "reversed0",
            }
        )
        .unwrap();
    }
    for (e, role) in d.edges.iter().zip(&d.roles) {
        writeln!(out, "edge {}: {}", e.id, role.tag()).unwrap();
    }
    Ok(out)
}

fn cmd_oracle_build(g: &FlowNetwork, out_path: &PathBuf, as_json: bool) -> Result<String> {
    let analysis = all_vital_edges(g)?;
    let tree = build_tvit_from_analysis(g, &analysis)?;
    let labels = build_labels(&tree);
    let insert = build_insert_oracle(g)?;
    let blob = OracleBlob {
        schema: SCHEMA.to_string(),
        network: serialize_network(g),
        tree,
        insert,
        labels,
    };
    let bytes = serde_json::to_vec(&blob)?;
    fs::write(out_path, &bytes)?;
    if as_json {
        return Ok(json_line(json!({
            "schema": SCHEMA,
            "written": out_path.display().to_string(),
            "bytes": bytes.len(),
        })));
    }
    Ok(format!("wrote {} ({} bytes)\n", out_path.display(), bytes.len()))
}

fn cmd_oracle_query(a: &OracleQueryArgs) -> Result<String> {
    let text = fs::read_to_string(&a.oracle)?;
    let blob: OracleBlob = serde_json::from_str(&text)?;
    if blob.schema != SCHEMA {
        return Err(Error::InvalidInput(format!(
            "oracle file schema {:?}, expected {SCHEMA:?}",
            blob.schema
        )));
    }
    if let (Some(e_id), Some(delta)) = (a.edge, a.delta) {
        let value = query_cap(&blob.tree, e_id, delta)?;
        if a.json {
            return Ok(json_line(json!({
                "schema": SCHEMA,
                "edge": e_id,
                "delta": delta,
                "value": value,
            })));
        }
        return Ok(format!("{value}\n"));
    }
    let ins = a.insert.as_ref().expect("clap group guarantees a probe");
    let (u, v, cap) = (ins[0] as usize, ins[1] as usize, ins[2]);
    let (value, cut) = query_insert(&blob.insert, u, v, cap)?;
    if a.json {
        return Ok(json_line(json!({
            "schema": SCHEMA,
            "insert": [u, v, cap],
            "value": value,
            "witness_side": cut.vertices(),
        })));
    }
    Ok(format!("{value}\n"))
}

fn cmd_steiner(g: &FlowNetwork, terminals: &[usize], as_json: bool) -> Result<String> {
    let st = build_steiner_structure(g, terminals)?;
    let mut cuts: Vec<Vec<usize>> = st
        .family_sides()?
        .iter()
        .map(|side| (0..g.n()).filter(|&v| side[v]).collect())
        .collect();
    cuts.sort();
    cuts.dedup();
    if as_json {
        return Ok(json_line(json!({
            "schema": SCHEMA,
            "steiner": terminals,
            "dag_count": st.dag_count(),
            "cuts": cuts,
        })));
    }
    let mut out = String::new();
    writeln!(out, "terminals = {terminals:?}").unwrap();
    writeln!(out, "stored structures = {}", st.dag_count()).unwrap();
    writeln!(out, "least separating cuts = {}", cuts.len()).unwrap();
    for c in &cuts {
        writeln!(out, "  {c:?}").unwrap();
    }
    Ok(out)
}

fn cmd_allcuts(g: &FlowNetwork, edge: Option<usize>, as_json: bool) -> Result<String> {
    let dag = match edge {
        None => build_pq(g)?,
        Some(e_id) => {
            let analysis = all_vital_edges(g)?;
            let store = build_svit(g, &analysis)?;
            query_allcuts(&store, e_id)?
        }
    };
    if as_json {
        let mut doc = dag.to_json();
        doc["schema"] = json!(SCHEMA);
        if let Some(e_id) = edge {
            doc["edge"] = json!(e_id);
        }
        return Ok(json_line(doc));
    }
    let mut out = String::new();
    match edge {
        None => writeln!(out, "all least cuts of the network").unwrap(),
        Some(e_id) => writeln!(out, "all least cuts edge {e_id} contributes to").unwrap(),
    }
    writeln!(out, "nodes = {}, arcs = {}", dag.node_count(), dag.arcs.len()).unwrap();
    for (x, members) in dag.nodes.iter().enumerate() {
        writeln!(out, "node {x}: {members:?}").unwrap();
    }
    for a in &dag.arcs {
        writeln!(out, "arc {} -> {} (edge {})", a.from, a.to, a.edge).unwrap();
    }
    Ok(out)
}

fn cmd_gen(a: GenArgs) -> Result<String> {
    let g = match a.scheme {
        GenScheme::Gsq { n, weights } => {
            let ws = weights.unwrap_or_else(|| {
                let base = (n * n) as u64;
                (0..(n * n) as u64).map(|i| base + i).collect()
            });
            gen_gsq(n, &ws)?
        }
        GenScheme::Gm { matrix, cols } => {
            let cols = match cols {
                Some(c) => c,
                None => {
                    let k = (matrix.len() as f64).sqrt().round() as usize;
                    if k * k != matrix.len() {
                        return Err(Error::InvalidInput(format!(
                            "{} entries do not form a square matrix; pass --cols",
                            matrix.len()
                        )));
                    }
                    k
                }
            };
            if cols == 0 || matrix.len() % cols != 0 {
                return Err(Error::InvalidInput(format!(
                    "{} entries do not split into rows of {cols}",
                    matrix.len()
                )));
            }
            let rows: Vec<Vec<u64>> = matrix.chunks(cols).map(<[u64]>::to_vec).collect();
            gen_gm(&rows)?
        }
        GenScheme::Db { adj } => {
            let n = adj.len();
            let mut rows = Vec::with_capacity(n);
            for r in &adj {
                if r.len() != n || r.chars().any(|c| c != '0' && c != '1') {
                    return Err(Error::InvalidInput(format!(
                        "adjacency row {r:?} is not {n} characters of 0/1"
                    )));
                }
                rows.push(r.chars().map(|c| c == '1').collect::<Vec<bool>>());
            }
            gen_db(n, &rows)?
        }
        GenScheme::Path { caps } => path_graph(&caps)?,
        GenScheme::Zigzag { n } => zigzag_ladder(n)?,
        GenScheme::Heavy { n, exponent } => heavy_bipartite(n, exponent)?,
        GenScheme::Random { n, m, max_cap, seed } => random_network(n, m, max_cap, seed)?,
        GenScheme::Gadget => cover_gadget(),
    };
    let text = serialize_network(&g);
    match a.out {
        Some(path) => {
            fs::write(&path, text.as_bytes())?;
            Ok(format!("wrote {} ({} vertices, {} edges)\n", path.display(), g.n(), g.m()))
        }
        None => Ok(text),
    }
}

/// One embedded self-check; returns a short failure description on mismatch.
type Check = (&'static str, fn(&FlowNetwork) -> Result<()>);

fn cmd_selftest(max_n: usize, as_json: bool) -> Result<String> {
    let fixtures: Vec<(String, FlowNetwork)> = selftest_fixtures()?;
    let checks: [Check; 5] = [
        ("vital-table", check_vital_table),
        ("cut-structure", check_cut_structure),
        ("decrease-queries", check_decrease_queries),
        ("insert-queries", check_insert_queries),
        ("flattened-structure", check_flattened_structure),
    ];
    let mut out = String::new();
    let mut rows = Vec::new();
    let mut ran = 0usize;
    let mut failures = Vec::new();
    for (name, g) in &fixtures {
        if g.n() > max_n {
            continue;
        }
        for (check, f) in &checks {
            let verdict = f(g);
            ran += 1;
            let ok = verdict.is_ok();
            if as_json {
                rows.push(json!({"fixture": name, "check": check, "ok": ok}));
            } else if ok {
                writeln!(out, "ok {name}: {check}").unwrap();
            } else {
                writeln!(out, "FAIL {name}: {check}").unwrap();
            }
            if let Err(e) = verdict {
                failures.push(format!("{name}/{check}: {e}"));
            }
        }
    }
    if !failures.is_empty() {
        eprint!("{out}");
        return Err(Error::InvariantViolation(format!(
            "{} of {ran} self-checks failed: {}",
            failures.len(),
            failures.join("; ")
        )));
    }
    if as_json {
        return Ok(json_line(json!({
            "schema": SCHEMA,
            "checks": rows,
            "passed": ran,
            "failed": 0,
        })));
    }
    writeln!(out, "selftest: {ran} checks passed").unwrap();
    Ok(out)
}

fn selftest_fixtures() -> Result<Vec<(String, FlowNetwork)>> {
    let mut fixtures = vec![
        ("path-2-1-2".to_string(), path_graph(&[2, 1, 2])?),
        ("cover-gadget".to_string(), cover_gadget()),
        ("zigzag-3".to_string(), zigzag_ladder(3)?),
        ("matrix-2x2".to_string(), gen_gm(&[vec![1, 2], vec![3, 4]])?),
        (
            "bipartite-unit".to_string(),
            gen_db(2, &[vec![true, false], vec![false, true]])?,
        ),
        ("grid-2".to_string(), gen_gsq(2, &[4, 5, 6, 7])?),
    ];
    for seed in 0..4u64 {
        fixtures.push((format!("random-{seed}"), random_network(7, 16, 6, seed)?));
    }
    Ok(fixtures)
}

/// Vital set, vitality, and least-cut value per edge against enumeration.
fn check_vital_table(g: &FlowNetwork) -> Result<()> {
    let cat = CutCatalog::compute(g)?;
    let analysis = all_vital_edges(g)?;
    if analysis.fstar != cat.fstar {
        return Err(Error::InvariantViolation(format!(
            "flow value {} vs enumerated {}",
            analysis.fstar, cat.fstar
        )));
    }
    for (pos, r) in analysis.rows.iter().enumerate() {
        let vital = r.class != EdgeKind::Nonvital;
        if vital != (cat.vitality[pos] > 0) || r.vitality != cat.vitality[pos] {
            return Err(Error::InvariantViolation(format!(
                "edge {}: class/vitality mismatch",
                r.edge
            )));
        }
        if let Some(lambda) = r.lambda {
            if lambda != cat.lambda[pos] {
                return Err(Error::InvariantViolation(format!(
                    "edge {}: least-cut value {lambda} vs enumerated {}",
                    r.edge, cat.lambda[pos]
                )));
            }
        }
    }
    Ok(())
}

/// The stored cut structure holds exactly the least cuts, both directions.
fn check_cut_structure(g: &FlowNetwork) -> Result<()> {
    let cat = CutCatalog::compute(g)?;
    let d = build_pq(g)?;
    for ci in 0..cat.len() {
        let cut = cat.cut(g, ci);
        let is_min = cat.capacity(ci) == CapacityValue::Finite(cat.fstar);
        // A side that subdivides a structure node cannot be stored.
        let stored = match is_one_transversal(&d, &cut) {
            Ok(b) => b,
            Err(Error::NotRepresentable) => false,
            Err(e) => return Err(e),
        };
        if stored != is_min {
            return Err(Error::InvariantViolation(format!(
                "cut {:?} membership mismatch",
                cut.vertices()
            )));
        }
    }
    for side in stored_cut_sides(&d)? {
        let cut = g.cut_from_side(&side)?;
        if cut.capacity != CapacityValue::Finite(cat.fstar) {
            return Err(Error::InvariantViolation(format!(
                "stored side {:?} is not a least cut",
                cut.vertices()
            )));
        }
    }
    Ok(())
}

/// Capacity-decrease answers (tree and labels) and capacity-increase
/// answers (insertion oracle) equal recomputation.
fn check_decrease_queries(g: &FlowNetwork) -> Result<()> {
    let analysis = all_vital_edges(g)?;
    let tree = build_tvit_from_analysis(g, &analysis)?;
    let labels = build_labels(&tree);
    let oracle = build_insert_oracle(g)?;
    for e in g.edges() {
        let mut deltas = vec![-1i64, 0];
        if let CapacityValue::Finite(w) = e.cap {
            deltas.push(-(w as i64));
        }
        deltas.sort_unstable();
        deltas.dedup();
        for delta in deltas {
            // A finite decrease leaves an infinite capacity infinite.
            let expected = match e.cap {
                CapacityValue::Finite(w) => {
                    if (w as i64) < -delta {
                        continue;
                    }
                    let changed = g.with_edge_capacity(e.id, e.cap.add_signed(delta)?)?;
                    max_flow(&changed)?.value
                }
                CapacityValue::Infinite => analysis.fstar,
            };
            let got = query_cap(&tree, e.id, delta)?;
            if got != expected {
                return Err(Error::InvariantViolation(format!(
                    "edge {} delta {delta}: answered {got}, recomputed {expected}",
                    e.id
                )));
            }
            let via_labels = query_cap_labels(&labels[e.tail], &labels[e.head], e.cap, delta)?;
            if via_labels != expected {
                return Err(Error::InvariantViolation(format!(
                    "edge {} delta {delta}: labels answered {via_labels}, recomputed {expected}",
                    e.id
                )));
            }
        }
        // Increases route through the insertion oracle; endpoints that no
        // cut separates are rejected there and cannot change the value.
        if e.tail == e.head || e.tail == g.t() || e.head == g.s() {
            continue;
        }
        for delta in [1u64, 7] {
            let expected = match e.cap {
                CapacityValue::Finite(_) => {
                    let changed =
                        g.with_edge_capacity(e.id, e.cap.add_signed(delta as i64)?)?;
                    max_flow(&changed)?.value
                }
                CapacityValue::Infinite => analysis.fstar,
            };
            let (got, _) = query_insert(&oracle, e.tail, e.head, delta)?;
            if got != CapacityValue::Finite(expected) {
                return Err(Error::InvariantViolation(format!(
                    "edge {} delta +{delta}: answered {got}, recomputed {expected}",
                    e.id
                )));
            }
        }
    }
    Ok(())
}

/// Insertion answers equal recomputation on the modified network.
fn check_insert_queries(g: &FlowNetwork) -> Result<()> {
    let oracle = build_insert_oracle(g)?;
    for u in 0..g.n() {
        for v in 0..g.n() {
            if u == v || u == g.t() || v == g.s() {
                continue;
            }
            for cap in [1u64, 3] {
                let (changed, _) = g.with_inserted_edge(u, v, CapacityValue::Finite(cap))?;
                let expected = max_flow(&changed)?.value;
                let (got, witness) = query_insert(&oracle, u, v, cap)?;
                if got != CapacityValue::Finite(expected) {
                    return Err(Error::InvariantViolation(format!(
                        "insert ({u},{v},{cap}): answered {got}, recomputed {expected}"
                    )));
                }
                let side: Vec<bool> = (0..g.n()).map(|x| witness.contains(x)).collect();
                let wcap = changed.cut_from_side(&side)?.capacity;
                if wcap != CapacityValue::Finite(expected) {
                    return Err(Error::InvariantViolation(format!(
                        "insert ({u},{v},{cap}): witness side has capacity {wcap}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The flattened structure preserves the flow value and makes every least
/// cut cross each path at most once.
fn check_flattened_structure(g: &FlowNetwork) -> Result<()> {
    let cat = CutCatalog::compute(g)?;
    let analysis = all_vital_edges(g)?;
    if analysis.fstar == 0 {
        return Ok(());
    }
    let d = build_dvit(g, &analysis)?;
    let quotient = d.quotient_network()?;
    let qflow = max_flow(&quotient)?.value;
    if qflow != analysis.fstar {
        return Err(Error::InvariantViolation(format!(
            "quotient flow {qflow} vs original {}",
            analysis.fstar
        )));
    }
    for &ci in &cat.mincuts {
        let cut = cat.cut(g, ci);
        if max_crossings(&d, &cut)? > 1 {
            return Err(Error::InvariantViolation(format!(
                "least cut {:?} still weaves",
                cut.vertices()
            )));
        }
    }
    Ok(())
}
