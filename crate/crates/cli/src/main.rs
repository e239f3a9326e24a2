//! Command-line front end: graph searches, condition translation and
//! triviality, clone witness search, forbidden-image CSPs, and the
//! growth recursion. Every run writes a deterministic JSON report to
//! standard output; exit codes are 0 for a positive answer or plain
//! success, 1 for a negative answer, 2 for input errors, and 3 when a
//! resource cap or the `H1WB_TIMEOUT_MS` deadline cuts a search short.

mod report;

use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use h1wb_core::algebra::{
    build_fgraph, enumerate_polymorphisms, find_pseudo_siggers, minion_hom_to_p,
    quotient_power_with_limit, satisfies, AlgebraError, FiniteStructure,
    DEFAULT_QUOTIENT_LIMIT,
};
use h1wb_core::cond::{
    builtin_condition, check_derivation, entails_identity, find_derivation, is_trivial,
    refute_implication, sigma_of_graph, CondError, H1Condition, Identity, Term,
};
use h1wb_core::forb::{encode_graph_tuples, loop_like_bounds, solve_css_csp, TemplateForb};
use h1wb_core::graph::{
    build_chain, build_gadget_n, glue, hom_search, trim_to_critical, verify_gadget_n, Graph,
    GraphError, MarkedGraph,
};
use h1wb_core::growth::{compute_alpha, verify_plan, GrowthError, GrowthFn};
use h1wb_core::io;

use report::{Report, ReportBuilder};

#[derive(Parser)]
#[command(name = "h1wb", version, about = "Workbench for height-1 identities over finite structures")]
struct Cli {
    /// Report format written to standard output
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Recorded in the report; all built-in algorithms are deterministic
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Reserved parallelism knob; outputs never depend on it
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Homomorphism and coloring search, critical-edge trimming
    #[command(subcommand)]
    Graph(GraphCmd),
    /// The exclusive-or gadget
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Glue two marked graphs through a fresh gadget
    Glue {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// The glued chain of marked graphs
    Chain {
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 8)]
        max_vertices: usize,
    },
    /// Height-1 conditions: translation, triviality, derivations
    #[command(subcommand)]
    Cond(CondCmd),
    /// Polymorphism clones of finite structures
    #[command(subcommand)]
    Clone(CloneCmd),
    /// Forbidden-image templates
    #[command(subcommand)]
    Css(CssCmd),
    /// Exact-arithmetic growth recursion
    #[command(subcommand)]
    Growth(GrowthCmd),
}

#[derive(Subcommand, Clone)]
enum GraphCmd {
    /// Lexicographically least homomorphism between two graphs
    Hom {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    /// 3-colorability with a coloring witness
    Color {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Trim to a subgraph with a verified critical edge
    Critical {
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Subcommand, Clone)]
enum GadgetCmd {
    /// Emit the fixed 18-vertex gadget
    Build,
    /// Exhaustively check the three boundary properties
    Verify,
}

#[derive(Subcommand, Clone)]
enum CondCmd {
    /// The condition of a graph
    Sigma {
        #[arg(long)]
        graph: PathBuf,
    },
    /// A named built-in condition
    Builtin {
        #[arg(long)]
        name: String,
        #[arg(long)]
        arity: Option<usize>,
    },
    /// Satisfiability by projections (label cover)
    Trivial {
        #[arg(long)]
        cond: PathBuf,
    },
    /// Search for a minor derivation of target from source
    Derive {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
    },
    /// Entailment of a single identity by a condition
    Entails {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        identity: PathBuf,
    },
    /// Search listed structures for a semantic refutation of an implication
    Refute {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long = "witness", required = true)]
        witnesses: Vec<PathBuf>,
    },
}

#[derive(Subcommand, Clone)]
enum CloneCmd {
    /// Witness search for an arbitrary condition
    Satisfies {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        cond: PathBuf,
        /// Comma-separated quantification range, e.g. 0,1
        #[arg(long)]
        subset: Option<String>,
    },
    /// Witness search for the Siggers condition
    Siggers {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Witness search for quasi near unanimity of the given arity
    Qnu {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Enumerate polymorphisms of one arity in table order
    Polys {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// The graph on ternary clone elements
    Fgraph {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 512)]
        cap: usize,
    },
    /// Quotient of a graph power by the almost-constant collapse
    Quotient {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        power: usize,
        #[arg(long, default_value_t = DEFAULT_QUOTIENT_LIMIT)]
        limit: usize,
    },
    /// Pseudo-Siggers probe over endomorphism pairs
    Pseudosiggers {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
    },
    /// Decide the minion homomorphism to the projections
    Minionp {
        #[arg(long)]
        structure: PathBuf,
    },
}

#[derive(Subcommand, Clone)]
enum CssCmd {
    /// Decide an instance of the forbidden-image CSP
    Solve {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Blow a graph up to blocks of n fresh elements
    Encode {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// List the loop-like obstructions for one arity
    Bounds {
        #[arg(long)]
        arity: usize,
    },
}

#[derive(Subcommand, Clone)]
enum GrowthCmd {
    /// Run the threshold recursion for f(k) = 2^ceil(k^(1/m))
    Alpha {
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// Comma-separated graph sizes |H_1|,|H_2|,...
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1 << 50)]
        k_max: u64,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn cap(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<CondError> for Failure {
    fn from(e: CondError) -> Self {
        match e {
            CondError::BudgetExceeded => Failure::cap(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::CapExceeded | AlgebraError::SizeLimit => Failure::cap(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<GrowthError> for Failure {
    fn from(e: GrowthError) -> Self {
        Failure::cap(e.to_string())
    }
}

fn read_input(rb: &mut ReportBuilder, name: &str, path: &Path) -> Result<String, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    rb.input(name, &bytes);
    String::from_utf8(bytes)
        .map_err(|_| Failure::input(format!("{} is not UTF-8", path.display())))
}

fn load_graph(rb: &mut ReportBuilder, name: &str, path: &Path) -> Result<Graph, Failure> {
    let text = read_input(rb, name, path)?;
    let (g, _) = io::graph_from_str(&text).map_err(|e| Failure::input(e.to_string()))?;
    Ok(g)
}

fn load_marked(rb: &mut ReportBuilder, name: &str, path: &Path) -> Result<MarkedGraph, Failure> {
    let text = read_input(rb, name, path)?;
    let (g, marked) = io::graph_from_str(&text).map_err(|e| Failure::input(e.to_string()))?;
    let marked = marked.ok_or_else(|| {
        Failure::input(format!("{} does not carry a marked edge", path.display()))
    })?;
    MarkedGraph::new(g, marked).map_err(|e| Failure::input(e.to_string()))
}

fn load_cond(rb: &mut ReportBuilder, name: &str, path: &Path) -> Result<H1Condition, Failure> {
    let text = read_input(rb, name, path)?;
    serde_json::from_str(&text).map_err(|e| Failure::input(e.to_string()))
}

fn load_structure(
    rb: &mut ReportBuilder,
    name: &str,
    path: &Path,
) -> Result<FiniteStructure, Failure> {
    let text = read_input(rb, name, path)?;
    serde_json::from_str(&text).map_err(|e| Failure::input(e.to_string()))
}

fn parse_identity(cond: &H1Condition, text: &str) -> Result<Identity, Failure> {
    #[derive(serde::Deserialize)]
    struct TermRepr {
        sym: String,
        map: Vec<usize>,
    }
    #[derive(serde::Deserialize)]
    struct IdentityRepr {
        r: usize,
        lhs: TermRepr,
        rhs: TermRepr,
    }
    let repr: IdentityRepr =
        serde_json::from_str(text).map_err(|e| Failure::input(e.to_string()))?;
    let resolve = |t: &TermRepr| -> Result<Term, Failure> {
        let sym = cond
            .symbol_index(&t.sym)
            .ok_or_else(|| Failure::input(format!("unknown symbol {}", t.sym)))?;
        if t.map.len() != cond.symbols()[sym].arity || t.map.iter().any(|&v| v >= repr.r) {
            return Err(Failure::input(format!("malformed term for {}", t.sym)));
        }
        Ok(Term {
            sym,
            map: t.map.clone(),
        })
    };
    Ok(Identity {
        vars: repr.r,
        lhs: resolve(&repr.lhs)?,
        rhs: resolve(&repr.rhs)?,
    })
}

fn parse_csv(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Failure::input(format!("bad number {s}")))
        })
        .collect()
}

fn value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("serializable value")
}

/// Runs one command to completion; returns the exit code, the result
/// payload, and the witness payload.
fn execute(cmd: Command, rb: &mut ReportBuilder) -> Result<(i32, Value, Value), Failure> {
    match cmd {
        Command::Graph(GraphCmd::Hom { source, target }) => {
            let s = load_graph(rb, "source", &source)?;
            let t = load_graph(rb, "target", &target)?;
            match hom_search(&s, &t) {
                Some(h) => Ok((0, json!({ "found": true }), value(&h))),
                None => Ok((1, json!({ "found": false }), Value::Null)),
            }
        }
        Command::Graph(GraphCmd::Color { graph }) => {
            let g = load_graph(rb, "graph", &graph)?;
            match h1wb_core::graph::find_three_coloring(&g) {
                Some(c) => Ok((0, json!({ "colorable": true }), value(&c))),
                None => Ok((1, json!({ "colorable": false }), Value::Null)),
            }
        }
        Command::Graph(GraphCmd::Critical { graph }) => {
            let g = load_graph(rb, "graph", &graph)?;
            let (trimmed, edge) = trim_to_critical(&g)?;
            Ok((
                0,
                json!({ "graph": value(&trimmed), "edge": value(edge) }),
                Value::Null,
            ))
        }
        Command::Gadget(GadgetCmd::Build) => {
            let n = build_gadget_n();
            Ok((0, value(&n), Value::Null))
        }
        Command::Gadget(GadgetCmd::Verify) => {
            let n = build_gadget_n();
            let rep = verify_gadget_n(&n)?;
            Ok((0, value(&rep), Value::Null))
        }
        Command::Glue { left, right } => {
            let l = load_marked(rb, "left", &left)?;
            let r = load_marked(rb, "right", &right)?;
            let w = glue(&l, &r)?;
            Ok((0, value(&w), Value::Null))
        }
        Command::Chain {
            length,
            max_vertices,
        } => {
            rb.param("length", length);
            rb.param("max_vertices", max_vertices);
            if length == 0 {
                return Err(Failure::input("chain length must be at least 1"));
            }
            let chain = build_chain(length, max_vertices)?;
            Ok((0, value(&chain), Value::Null))
        }
        Command::Cond(CondCmd::Sigma { graph }) => {
            let g = load_graph(rb, "graph", &graph)?;
            Ok((0, value(&sigma_of_graph(&g)), Value::Null))
        }
        Command::Cond(CondCmd::Builtin { name, arity }) => {
            rb.param("name", &name);
            rb.param("arity", arity);
            let cond = builtin_condition(&name, arity)?;
            Ok((0, value(&cond), Value::Null))
        }
        Command::Cond(CondCmd::Trivial { cond }) => {
            let c = load_cond(rb, "cond", &cond)?;
            match is_trivial(&c) {
                Some(a) => Ok((0, json!({ "trivial": true }), value(&a))),
                None => Ok((1, json!({ "trivial": false }), Value::Null)),
            }
        }
        Command::Cond(CondCmd::Derive {
            source,
            target,
            budget,
        }) => {
            let s = load_cond(rb, "source", &source)?;
            let t = load_cond(rb, "target", &target)?;
            rb.param("budget", budget);
            match find_derivation(&s, &t, budget)? {
                Some(d) => {
                    assert!(check_derivation(&s, &t, &d));
                    Ok((0, json!({ "found": true }), value(&d)))
                }
                None => Ok((1, json!({ "found": false }), Value::Null)),
            }
        }
        Command::Cond(CondCmd::Entails { source, identity }) => {
            let s = load_cond(rb, "source", &source)?;
            let text = read_input(rb, "identity", &identity)?;
            let ident = parse_identity(&s, &text)?;
            let holds = entails_identity(&s, &ident);
            Ok((
                if holds { 0 } else { 1 },
                json!({ "entailed": holds }),
                Value::Null,
            ))
        }
        Command::Cond(CondCmd::Refute {
            source,
            target,
            witnesses,
        }) => {
            let s = load_cond(rb, "source", &source)?;
            let t = load_cond(rb, "target", &target)?;
            let structures: Vec<FiniteStructure> = witnesses
                .iter()
                .enumerate()
                .map(|(i, p)| load_structure(rb, &format!("witness{i}"), p))
                .collect::<Result<_, _>>()?;
            match refute_implication(&s, &t, &structures) {
                Some(b) => {
                    let index = structures.iter().position(|x| x == b).expect("from list");
                    Ok((
                        0,
                        json!({ "refuted": true, "witness_index": index }),
                        value(b),
                    ))
                }
                None => Ok((1, json!({ "refuted": false }), Value::Null)),
            }
        }
        Command::Clone(CloneCmd::Satisfies {
            structure,
            cond,
            subset,
        }) => {
            let b = load_structure(rb, "structure", &structure)?;
            let c = load_cond(rb, "cond", &cond)?;
            let range: Option<Vec<usize>> = match &subset {
                Some(text) if text.trim().is_empty() => Some(Vec::new()),
                Some(text) => Some(
                    parse_csv(text)?
                        .into_iter()
                        .map(|v| v as usize)
                        .collect(),
                ),
                None => None,
            };
            if let Some(r) = &range {
                rb.param("subset", r);
                if r.iter().any(|&v| v >= b.size) {
                    return Err(Failure::input("subset element outside the domain"));
                }
            }
            match satisfies(&b, &c, range.as_deref()) {
                Some(w) => Ok((0, json!({ "satisfied": true }), value(&w))),
                None => Ok((1, json!({ "satisfied": false }), Value::Null)),
            }
        }
        Command::Clone(CloneCmd::Siggers { structure }) => {
            let b = load_structure(rb, "structure", &structure)?;
            match h1wb_core::algebra::find_siggers(&b) {
                Some(w) => Ok((0, json!({ "satisfied": true }), value(&w))),
                None => Ok((1, json!({ "satisfied": false }), Value::Null)),
            }
        }
        Command::Clone(CloneCmd::Qnu { structure, arity }) => {
            let b = load_structure(rb, "structure", &structure)?;
            rb.param("arity", arity);
            match h1wb_core::algebra::find_qnu(&b, arity)? {
                Some(w) => Ok((0, json!({ "satisfied": true }), value(&w))),
                None => Ok((1, json!({ "satisfied": false }), Value::Null)),
            }
        }
        Command::Clone(CloneCmd::Polys {
            structure,
            arity,
            cap,
        }) => {
            let b = load_structure(rb, "structure", &structure)?;
            rb.param("arity", arity);
            rb.param("cap", cap);
            let list = enumerate_polymorphisms(&b, arity, cap.unwrap_or(usize::MAX));
            Ok((
                0,
                json!({ "count": list.tables.len(), "truncated": list.truncated }),
                value(&list.tables),
            ))
        }
        Command::Clone(CloneCmd::Fgraph { structure, cap }) => {
            let b = load_structure(rb, "structure", &structure)?;
            rb.param("cap", cap);
            let fg = build_fgraph(&b, cap)?;
            let colorable = h1wb_core::graph::three_colorable(&fg);
            Ok((
                0,
                json!({ "graph": value(&fg), "three_colorable": colorable }),
                Value::Null,
            ))
        }
        Command::Clone(CloneCmd::Quotient {
            graph,
            power,
            limit,
        }) => {
            let g = load_graph(rb, "graph", &graph)?;
            rb.param("power", power);
            rb.param("limit", limit);
            if power < 2 {
                return Err(Failure::input("power must be at least 2"));
            }
            let q = quotient_power_with_limit(&g, power, limit)?;
            Ok((0, value(&q), Value::Null))
        }
        Command::Clone(CloneCmd::Pseudosiggers { structure, cap }) => {
            let b = load_structure(rb, "structure", &structure)?;
            rb.param("cap", cap);
            match find_pseudo_siggers(&b, cap)? {
                Some((s, (e1, e2))) => Ok((
                    0,
                    json!({ "found": true }),
                    json!({ "operation": value(&s), "endomorphisms": [value(&e1), value(&e2)] }),
                )),
                None => Ok((1, json!({ "found": false }), Value::Null)),
            }
        }
        Command::Clone(CloneCmd::Minionp { structure }) => {
            let b = load_structure(rb, "structure", &structure)?;
            let answer = minion_hom_to_p(&b);
            Ok((
                if answer { 0 } else { 1 },
                json!({ "minion_hom_to_p": answer }),
                Value::Null,
            ))
        }
        Command::Css(CssCmd::Solve { template, instance }) => {
            let t = load_graph(rb, "template", &template)?;
            let template = TemplateForb::new(t).map_err(|e| Failure::input(e.to_string()))?;
            let text = read_input(rb, "instance", &instance)?;
            let inst = io::instance_from_str(&text).map_err(|e| Failure::input(e.to_string()))?;
            let accept = solve_css_csp(&template, &inst);
            Ok((
                if accept { 0 } else { 1 },
                json!({ "accept": accept }),
                Value::Null,
            ))
        }
        Command::Css(CssCmd::Encode { graph, arity }) => {
            let g = load_graph(rb, "graph", &graph)?;
            rb.param("arity", arity);
            if arity == 0 {
                return Err(Failure::input("arity must be at least 1"));
            }
            let enc = encode_graph_tuples(&g, arity).map_err(|e| Failure::input(e.to_string()))?;
            Ok((0, value(&enc), Value::Null))
        }
        Command::Css(CssCmd::Bounds { arity }) => {
            rb.param("arity", arity);
            if arity == 0 {
                return Err(Failure::input("arity must be at least 1"));
            }
            let bounds = loop_like_bounds(arity);
            Ok((
                0,
                json!({ "count": bounds.len(), "structures": value(&bounds) }),
                Value::Null,
            ))
        }
        Command::Growth(GrowthCmd::Alpha {
            m,
            sizes,
            steps,
            k_max,
        }) => {
            rb.param("m", m);
            rb.param("steps", steps);
            rb.param("k_max", k_max);
            if m == 0 || steps == 0 {
                return Err(Failure::input("m and steps must be at least 1"));
            }
            let sizes = parse_csv(&sizes)?;
            rb.param("sizes", &sizes);
            if sizes.len() < steps {
                return Err(Failure::input("need one graph size per step"));
            }
            let plan = compute_alpha(GrowthFn { m }, &sizes, steps, k_max)?;
            assert!(verify_plan(&plan), "plan failed independent verification");
            Ok((0, value(&plan), Value::Null))
        }
    }
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
}

fn command_label(cmd: &Command) -> String {
    match cmd {
        Command::Graph(GraphCmd::Hom { .. }) => "graph hom",
        Command::Graph(GraphCmd::Color { .. }) => "graph color",
        Command::Graph(GraphCmd::Critical { .. }) => "graph critical",
        Command::Gadget(GadgetCmd::Build) => "gadget build",
        Command::Gadget(GadgetCmd::Verify) => "gadget verify",
        Command::Glue { .. } => "glue",
        Command::Chain { .. } => "chain",
        Command::Cond(CondCmd::Sigma { .. }) => "cond sigma",
        Command::Cond(CondCmd::Builtin { .. }) => "cond builtin",
        Command::Cond(CondCmd::Trivial { .. }) => "cond trivial",
        Command::Cond(CondCmd::Derive { .. }) => "cond derive",
        Command::Cond(CondCmd::Entails { .. }) => "cond entails",
        Command::Cond(CondCmd::Refute { .. }) => "cond refute",
        Command::Clone(CloneCmd::Satisfies { .. }) => "clone satisfies",
        Command::Clone(CloneCmd::Siggers { .. }) => "clone siggers",
        Command::Clone(CloneCmd::Qnu { .. }) => "clone qnu",
        Command::Clone(CloneCmd::Polys { .. }) => "clone polys",
        Command::Clone(CloneCmd::Fgraph { .. }) => "clone fgraph",
        Command::Clone(CloneCmd::Quotient { .. }) => "clone quotient",
        Command::Clone(CloneCmd::Pseudosiggers { .. }) => "clone pseudosiggers",
        Command::Clone(CloneCmd::Minionp { .. }) => "clone minionp",
        Command::Css(CssCmd::Solve { .. }) => "css solve",
        Command::Css(CssCmd::Encode { .. }) => "css encode",
        Command::Css(CssCmd::Bounds { .. }) => "css bounds",
        Command::Growth(GrowthCmd::Alpha { .. }) => "growth alpha",
    }
    .to_string()
}

fn main() {
    let cli = Cli::parse();
    let label = command_label(&cli.command);
    let timeout = std::env::var("H1WB_TIMEOUT_MS")
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .map(Duration::from_millis);

    let run = {
        let label = label.clone();
        let cmd = cli.command.clone();
        let seed = cli.seed;
        let jobs = cli.jobs;
        move || {
            let mut rb = ReportBuilder::new(label);
            if let Some(s) = seed {
                rb.param("seed", s);
            }
            if let Some(j) = jobs {
                rb.param("jobs", j);
            }
            match execute(cmd, &mut rb) {
                Ok((code, result, witness)) => (code, rb.finish(result, witness)),
                Err(f) => {
                    let report = rb.finish(json!({ "error": f.message }), Value::Null);
                    (f.code, report)
                }
            }
        }
    };

    let (code, report) = match timeout {
        None => run(),
        Some(limit) => {
            let (tx, rx) = mpsc::channel();
            std::thread::spawn(move || {
                let _ = tx.send(run());
            });
            match rx.recv_timeout(limit) {
                Ok(outcome) => outcome,
                Err(mpsc::RecvTimeoutError::Timeout) => {
                    let rb = ReportBuilder::new(label);
                    let report = rb.finish(
                        json!({ "error": "search deadline expired" }),
                        Value::Null,
                    );
                    emit(&report, cli.format);
                    std::process::exit(3);
                }
                Err(mpsc::RecvTimeoutError::Disconnected) => {
                    eprintln!("internal error: worker terminated abnormally");
                    std::process::exit(101);
                }
            }
        }
    };
    emit(&report, cli.format);
    std::process::exit(code);
}
