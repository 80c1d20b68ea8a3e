//! Command-line front end: argument parsing, JSON file formats and the
//! text reports.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bubbling::{
    clebsch16_bundle, heisenberg27_bundle, invariance_suite, paley9_bundle, shrikhande_bundle, Bundle,
};
use crate::constructors::{
    cayley_graph, named_graph_str, spectrum_with_multiplicity, twisted_cayley, AbelianGroup, ConnectionSet,
    NamedGraph,
};
use crate::error::{QglError, Result};
use crate::knots::{braid_rep, evaluate_link, markov_invariance_suite, standard_braid, BraidWord};
use crate::quantum_set::{QuantumSet, SetDescriptor};
use crate::regularity::{association_scheme, regularity_report, RegularityReport};
use crate::render::{format_complex, format_real, format_row, matrix_from_json, matrix_to_json};
use crate::schur_algebra::{complement, complete_adjacency, QuantumGraph};
use crate::spin::{
    boltzmann_weights, check_exchange, check_hadamard, duality_psi, solve_spin_params, verify_qsm, SpinModel,
    SpinParams,
};
use crate::tensor_core::Tolerance;
use crate::topology::{topology_report, TopologyReport};
use crate::{CMat, C64};

#[derive(Parser, Debug)]
#[command(name = "qgl", version, about = "Finite quantum graphs, bubbling, spin models and braid invariants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Absolute tolerance (overrides QGL_TOL).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Frobenius axioms of the set and flags of the graph.
    Verify(GraphInput),
    /// Topology and regularity table row.
    Analyze(GraphInput),
    /// Build a graph and write it as JSON.
    Construct(ConstructArgs),
    /// Deform a graph along central-type group data.
    Bubble(BubbleArgs),
    /// Solve and verify a spin model.
    Spin(SpinArgs),
    /// Evaluate a braid closure.
    Knot(KnotArgs),
    /// List the named graphs.
    Catalog,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GraphInput {
    /// Named graph from the catalog.
    #[arg(long)]
    pub named: Option<String>,
    /// Set as JSON, e.g. '{"blocks":[3]}'.
    #[arg(long)]
    pub set: Option<String>,
    /// Adjacency: zero, identity, complete, or a JSON matrix.
    #[arg(long)]
    pub adj: Option<String>,
    /// Graph JSON file written by `construct`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Cyclic orders of an abelian group, e.g. 3,3.
    #[arg(long, value_delimiter = ',')]
    pub group: Option<Vec<usize>>,
    /// Connection set, e.g. "(0,1),(0,2),(1,0),(2,0)".
    #[arg(long)]
    pub connection: Option<String>,
    /// Twisted (quantum) Cayley graph instead of the classical one.
    #[arg(long)]
    pub twisted: bool,
    /// Replace the graph by its irreflexive complement.
    #[arg(long)]
    pub complement: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BubbleArgs {
    /// Bundle JSON file.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    /// Built-in bundle: paley9, clebsch16, shrikhande, heisenberg27.
    #[arg(long)]
    pub example: Option<String>,
    /// Write the deformed graph here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SpinArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    pub epsilon: i32,
    /// Explicit t as RE,IM (required when t is free).
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Which of the solved t values to use.
    #[arg(long, default_value_t = 0)]
    pub t_index: usize,
    /// Write the model JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KnotArgs {
    /// Spin model JSON written by `spin --out`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub spin: SpinArgs,
    /// Braid word, e.g. "s1 -s2 s1 -s2".
    #[arg(long, allow_hyphen_values = true)]
    pub braid: Option<String>,
    /// Named closure: unknot, unlink2, hopf, trefoil, figure-eight, solomon, cinquefoil.
    #[arg(long)]
    pub knot: Option<String>,
    #[arg(long)]
    pub strands: Option<usize>,
    /// Also run the Markov suite on this many random words.
    #[arg(long)]
    pub markov: Option<usize>,
}

/// Tolerance from `--tol`, then `QGL_TOL`, then the default.
pub fn tolerance(flag: Option<f64>) -> Result<Tolerance> {
    let eps = match flag {
        Some(e) => Some(e),
        None => match std::env::var("QGL_TOL") {
            Ok(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| QglError::Validation(format!("QGL_TOL={s:?} is not a number")))?,
            ),
            Err(_) => None,
        },
    };
    let default = Tolerance::default();
    match eps {
        Some(e) => Tolerance::new(e, default.eig_cluster_eps.max(e), default.rank_rel_eps),
        None => Ok(default),
    }
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    m: Value,
    unit: Vec<C64>,
}

/// Block sets serialize as their descriptor, abstract sets as structure
/// constants.
pub fn set_to_json(qs: &QuantumSet) -> Value {
    match qs.descriptor() {
        Some(d) => serde_json::to_value(d).expect("descriptor serializes"),
        None => json!({"structure": {"m": matrix_to_json(&qs.m_matrix()), "unit": qs.unit()}}),
    }
}

pub fn set_from_json(v: &Value) -> Result<QuantumSet> {
    if let Some(s) = v.get("structure") {
        let s: StructureJson =
            serde_json::from_value(s.clone()).map_err(|e| QglError::Validation(format!("set structure: {e}")))?;
        return QuantumSet::from_dense(&matrix_from_json(&s.m)?, s.unit, 0.0);
    }
    let d: SetDescriptor =
        serde_json::from_value(v.clone()).map_err(|e| QglError::Validation(format!("set descriptor: {e}")))?;
    QuantumSet::from_descriptor(&d)
}

pub fn graph_to_json(g: &QuantumGraph) -> Value {
    json!({"set": set_to_json(&g.set), "adj": matrix_to_json(&g.adj)})
}

pub fn graph_from_json(v: &Value, tol: &Tolerance) -> Result<QuantumGraph> {
    let set = set_from_json(v.get("set").ok_or_else(|| QglError::Validation("graph JSON needs \"set\"".into()))?)?;
    let adj = matrix_from_json(v.get("adj").ok_or_else(|| QglError::Validation("graph JSON needs \"adj\"".into()))?)?;
    QuantumGraph::new(&set, &adj, tol)
}

pub fn model_to_json(m: &SpinModel) -> Value {
    json!({
        "set": set_to_json(&m.set),
        "adj": matrix_to_json(&m.adj),
        "w_plus": matrix_to_json(&m.w_plus),
        "w_minus": matrix_to_json(&m.w_minus),
        "d": m.d,
        "a": m.a,
        "params": m.params,
    })
}

/// Reads a model and re-runs the axiom checks on the stored weights.
pub fn model_from_json(v: &Value, tol: &Tolerance) -> Result<SpinModel> {
    let field = |k: &str| v.get(k).ok_or_else(|| QglError::Validation(format!("model JSON needs \"{k}\"")));
    let set = set_from_json(field("set")?)?;
    let params: SpinParams = serde_json::from_value(field("params")?.clone())
        .map_err(|e| QglError::Validation(format!("model params: {e}")))?;
    let c = |k: &str| -> Result<C64> {
        serde_json::from_value(field(k)?.clone()).map_err(|e| QglError::Validation(format!("{k}: {e}")))
    };
    let mut model = SpinModel {
        adj: matrix_from_json(field("adj")?)?,
        w_plus: matrix_from_json(field("w_plus")?)?,
        w_minus: matrix_from_json(field("w_minus")?)?,
        d: c("d")?,
        a: c("a")?,
        params,
        report: crate::spin::QsmReport { checks: Vec::new(), all_pass: false },
        set,
    };
    model.report = verify_qsm(&model, tol)?;
    Ok(model)
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| QglError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| QglError::Validation(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("JSON value serializes");
    fs::write(path, text + "\n").map_err(|e| QglError::Validation(format!("{}: {e}", path.display())))
}

pub fn load_graph(input: &GraphInput, tol: &Tolerance) -> Result<QuantumGraph> {
    if let Some(path) = &input.graph {
        return graph_from_json(&read_json(path)?, tol);
    }
    if let Some(name) = &input.named {
        return named_graph_str(name, tol);
    }
    let set_text = input
        .set
        .as_deref()
        .ok_or_else(|| QglError::Validation("give --named, --graph or --set with --adj".into()))?;
    let set = set_from_json(&serde_json::from_str(set_text).map_err(|e| QglError::Validation(format!("--set: {e}")))?)?;
    let n = set.dim();
    let adj = match input.adj.as_deref().unwrap_or("zero") {
        "zero" => CMat::zeros(n, n),
        "identity" => CMat::identity(n),
        "complete" => complete_adjacency(&set),
        text => matrix_from_json(&serde_json::from_str(text).map_err(|e| QglError::Validation(format!("--adj: {e}")))?)?,
    };
    QuantumGraph::new(&set, &adj, tol)
}

/// Exit code `0`, `1` (bad input) or `2` (a verification failed).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Rendered report and exit code of one command.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn outcome(cli: &Cli, value: Value, text: String, ok: bool) -> Outcome {
    let text = if cli.json {
        serde_json::to_string_pretty(&value).expect("JSON value serializes") + "\n"
    } else {
        text
    };
    Outcome { text, code: if ok { 0 } else { 2 } }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let tol = tolerance(cli.tol)?;
    match &cli.command {
        Command::Verify(input) => verify(cli, input, &tol),
        Command::Analyze(input) => analyze(cli, input, &tol),
        Command::Construct(args) => construct(cli, args, &tol),
        Command::Bubble(args) => bubble(cli, args, &tol),
        Command::Spin(args) => spin(cli, args, &tol),
        Command::Knot(args) => knot(cli, args, &tol),
        Command::Catalog => Ok(catalog(cli)),
    }
}

fn check_lines(checks: &[crate::quantum_set::AxiomCheck]) -> String {
    checks
        .iter()
        .map(|c| format!("  {:<28} {:>10.3e}  {}\n", c.name, c.residual, if c.pass { "ok" } else { "FAIL" }))
        .collect()
}

fn verify(cli: &Cli, input: &GraphInput, tol: &Tolerance) -> Result<Outcome> {
    let g = load_graph(input, tol)?;
    let frob = g.set.verify_frobenius(tol);
    let ok = frob.all_pass();
    let text = format!(
        "dimension {}  δ² = {}\n{}flags: {:?}\n",
        g.dim(),
        format_real(frob.delta_sq, 1e-9),
        check_lines(&frob.checks),
        g.flags
    );
    let value = json!({"dimension": g.dim(), "frobenius": frob, "flags": g.flags, "residuals": g.residuals});
    Ok(outcome(cli, value, text, ok))
}

/// `k | λ | μ | q₃ | q₂ | q₁ | q₀ | TrL | rank | #π₀ | cycle`.
pub fn table_row(reg: &RegularityReport, topo: &TopologyReport, tol: f64) -> String {
    let row = reg.row();
    let mut cells = format_row(&row.iter().map(|z| z.re).collect::<Vec<_>>(), tol);
    for (name, cell) in ["k", "lambda", "mu", "q3", "q2", "q1", "q0"].iter().zip(cells.iter_mut()) {
        if reg.free_params.iter().any(|p| p == name) {
            *cell = "free".into();
        }
    }
    cells.push(format_real(topo.laplacian_trace, tol));
    cells.push(topo.laplacian_rank.to_string());
    cells.push(topo.components.to_string());
    cells.push(if topo.has_cycle { "Y" } else { "N" }.into());
    cells.join(" | ")
}

fn analyze(cli: &Cli, input: &GraphInput, tol: &Tolerance) -> Result<Outcome> {
    let g = load_graph(input, tol)?;
    let topo = topology_report(&g, tol)?;
    let reg = regularity_report(&g, tol)?;
    let spectrum = spectrum_with_multiplicity(&g.adj, tol)?;
    let row = table_row(&reg, &topo, 1e-9);
    let spec_text: Vec<String> = spectrum.iter().map(|(v, m)| format!("{}(×{m})", format_real(*v, 1e-9))).collect();
    let text = format!(
        "k | λ | μ | q3 | q2 | q1 | q0 | TrL | rank | #π0 | cycle\n{row}\nspectrum: {}\nLaplacian spectrum: {}\nregular: 1pt {} 2pt {} 3pt {}\n",
        spec_text.join(" "),
        topo.laplacian_spectrum.iter().map(|v| format_real(*v, 1e-9)).collect::<Vec<_>>().join(" "),
        reg.regular_1pt,
        reg.regular_2pt,
        reg.regular_3pt,
    );
    let value = json!({"row": row, "regularity": reg, "topology": topo, "spectrum": spectrum});
    Ok(outcome(cli, value, text, true))
}

fn parse_tuples(text: &str) -> Result<Vec<Vec<usize>>> {
    let bad = || QglError::Validation(format!("bad connection set {text:?}"));
    let mut out = Vec::new();
    for part in text.split(')') {
        let part = part.trim().trim_start_matches(',').trim();
        if part.is_empty() {
            continue;
        }
        let inner = part.strip_prefix('(').ok_or_else(bad)?;
        let tuple = inner
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        out.push(tuple);
    }
    Ok(out)
}

fn construct(cli: &Cli, args: &ConstructArgs, tol: &Tolerance) -> Result<Outcome> {
    let mut g = match (&args.group, &args.connection) {
        (Some(orders), Some(conn)) => {
            let group = AbelianGroup::new(orders)?;
            let s = ConnectionSet::new(&group, &parse_tuples(conn)?)?;
            if args.twisted {
                twisted_cayley(&group, &s, tol)?
            } else {
                cayley_graph(&group, &s, tol)?
            }
        }
        (None, None) => load_graph(&args.input, tol)?,
        _ => return Err(QglError::Validation("--group and --connection go together".into())),
    };
    if args.complement {
        g = complement(&g, tol)?;
    }
    let value = graph_to_json(&g);
    if let Some(path) = &args.out {
        write_json(path, &value)?;
        let text = format!("wrote {} (dimension {})\n", path.display(), g.dim());
        return Ok(outcome(cli, json!({"written": path, "dimension": g.dim()}), text, true));
    }
    let text = serde_json::to_string_pretty(&value).expect("JSON value serializes") + "\n";
    Ok(Outcome { text, code: 0 })
}

fn bubble(cli: &Cli, args: &BubbleArgs, tol: &Tolerance) -> Result<Outcome> {
    let bundle = match (&args.bundle, args.example.as_deref()) {
        (Some(path), _) => {
            let text =
                fs::read_to_string(path).map_err(|e| QglError::Validation(format!("{}: {e}", path.display())))?;
            Bundle::from_json(&text, tol)?
        }
        (None, Some("paley9")) => paley9_bundle(),
        (None, Some("clebsch16")) => clebsch16_bundle(),
        (None, Some("shrikhande")) => shrikhande_bundle(),
        (None, Some("heisenberg27")) => heisenberg27_bundle(),
        (None, Some(other)) => return Err(QglError::Validation(format!("unknown example bundle {other:?}"))),
        (None, None) => return Err(QglError::Validation("give --bundle FILE or --example NAME".into())),
    };
    let r = bundle.bubble(tol)?;
    let suite = invariance_suite(&r, tol)?;
    let pi_rank = r.pi.trace().re.round() as usize;
    if let Some(path) = &args.out {
        write_json(path, &graph_to_json(&r.deformed))?;
    }
    let spec: Vec<String> = suite.spectrum.iter().map(|(v, m)| format!("{}(×{m})", format_real(*v, 1e-9))).collect();
    let mut text = format!(
        "source dimension {}  h = {}  π: {}×{} of rank {pi_rank}  center dimension {}\nspectrum: {}\n",
        r.source.dim(),
        r.h,
        r.pi.rows(),
        r.pi.cols(),
        r.center_dim,
        spec.join(" ")
    );
    if let (Some(reg), Some(topo)) = (&suite.deformed_regularity, &suite.deformed_topology) {
        text += &format!("deformed row: {}\n", table_row(reg, topo, 1e-9));
    }
    text += &check_lines(&suite.checks);
    text += &format!("invariance suite: {}\n", if suite.all_pass { "PASS" } else { "FAIL" });
    let value = json!({
        "source_dimension": r.source.dim(),
        "h": r.h,
        "pi_dimension": r.pi.rows(),
        "pi_rank": pi_rank,
        "center_dimension": r.center_dim,
        "suite": suite,
        "deformed": graph_to_json(&r.deformed),
    });
    Ok(outcome(cli, value, text, suite.all_pass))
}

fn parse_complex(text: &str) -> Result<C64> {
    let bad = || QglError::Validation(format!("expected RE,IM, got {text:?}"));
    let mut parts = text.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad()));
    let re = parts.next().ok_or_else(bad)??;
    let im = parts.next().transpose()?.unwrap_or(0.0);
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

pub fn build_model(args: &SpinArgs, tol: &Tolerance) -> Result<SpinModel> {
    let mut g = load_graph(&args.input, tol)?;
    if g.flags.reflexive {
        g = g.irreflexive_part(tol)?;
    }
    let scheme = association_scheme(&g, tol)?;
    let sol = solve_spin_params(&scheme, args.epsilon, tol)?;
    let params = match (&args.t, sol.t_free) {
        (Some(t), _) => sol.at(parse_complex(t)?, tol)?,
        (None, true) => return Err(QglError::Validation("t is free for this scheme; pass --t RE,IM".into())),
        (None, false) => *sol.params.get(args.t_index).ok_or_else(|| {
            QglError::Validation(format!("--t-index {} but only {} solutions", args.t_index, sol.params.len()))
        })?,
    };
    boltzmann_weights(&g, &params, tol)
}

fn spin(cli: &Cli, args: &SpinArgs, tol: &Tolerance) -> Result<Outcome> {
    let m = build_model(args, tol)?;
    let exchange = check_exchange(&m, tol);
    let hadamard = check_hadamard(&m.w_plus, &m.set, tol)?;
    let duality = duality_psi(&m, tol)?;
    let p = &m.params;
    let f = |z: C64| format_complex(z, 1e-9);
    let mut text = format!(
        "ε = {}  s = {}  r = {}\nt = {}  a = {}  d = {}  z = {}\nt0 = {}  t1 = {}  t2 = {}\n",
        p.epsilon,
        format_real(p.s, 1e-9),
        format_real(p.r, 1e-9),
        f(p.t),
        f(p.a),
        f(p.d),
        f(p.z),
        f(p.t0),
        f(p.t1),
        f(p.t2)
    );
    text += &check_lines(&m.report.checks);
    text += &format!(
        "  exchange z fit {} (residual {:.3e})  {}\n  hadamard {}\n  duality {}\n",
        f(exchange.z),
        exchange.residual,
        if exchange.pass { "ok" } else { "FAIL" },
        hadamard,
        if duality.pass { "ok" } else { "FAIL" }
    );
    let ok = m.report.all_pass && exchange.pass;
    if let Some(path) = &args.out {
        write_json(path, &model_to_json(&m))?;
    }
    let value = json!({
        "model": model_to_json(&m),
        "report": m.report,
        "exchange": exchange,
        "hadamard": hadamard,
        "duality": duality,
    });
    Ok(outcome(cli, value, text, ok))
}

fn knot(cli: &Cli, args: &KnotArgs, tol: &Tolerance) -> Result<Outcome> {
    let model = match &args.model {
        Some(path) => model_from_json(&read_json(path)?, tol)?,
        None => build_model(&args.spin, tol)?,
    };
    if !model.report.all_pass {
        return Err(QglError::Numerical("spin model fails its axioms".into()));
    }
    let word = match (&args.braid, &args.knot) {
        (Some(b), _) => BraidWord::parse(b, args.strands)?,
        (None, Some(name)) => standard_braid(name).ok_or_else(|| QglError::Validation(format!("unknown knot {name:?}")))?,
        (None, None) => return Err(QglError::Validation("give --braid or --knot".into())),
    };
    let strands = word.strands.max(if args.markov.is_some() { 3 } else { 1 });
    let rep = braid_rep(&model, strands, tol)?;
    let z = evaluate_link(&rep, &word)?;
    let mut text = format!(
        "braid [{word}] on {} strands, writhe {}\nZ = {}\nc_writhe = {}  c_trace = {}\n",
        word.strands,
        word.writhe(),
        format_complex(z, 1e-9),
        format_complex(rep.c_writhe, 1e-9),
        format_complex(rep.c_trace, 1e-9)
    );
    let mut value = json!({
        "braid": word.to_string(),
        "strands": word.strands,
        "writhe": word.writhe(),
        "z": z,
        "c_writhe": rep.c_writhe,
        "c_trace": rep.c_trace,
        "relations": rep.relations,
    });
    let mut ok = true;
    if let Some(count) = args.markov {
        let r = markov_invariance_suite(&rep, count, 1, tol)?;
        text += &format!("markov suite on {count} words: max residual {:.3e}  {}\n", r.max_residual, if r.pass { "PASS" } else { "FAIL" });
        ok = r.pass;
        value["markov"] = serde_json::to_value(&r).expect("report serializes");
    }
    Ok(outcome(cli, value, text, ok))
}

fn catalog(cli: &Cli) -> Outcome {
    let tol = Tolerance::default();
    let mut text = String::new();
    let mut items = Vec::new();
    for g in NamedGraph::ALL {
        let dim = named_graph_str(g.name(), &tol).map(|x| x.dim()).unwrap_or(0);
        text += &format!("{:<22} dim {:>3}  {}\n", g.name(), dim, g.description());
        items.push(json!({"name": g.name(), "dimension": dim, "description": g.description()}));
    }
    outcome(cli, Value::Array(items), text, true)
}
