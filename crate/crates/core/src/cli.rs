//! Command-line front end.
//!
//! Every artifact starts with a metadata header: `#` comment lines for CSV
//! and edge lists, a `metadata` object for JSON. The header holds the tool
//! version, the seed and the parsed arguments, so any table can be
//! regenerated from its own header. The thread count is left out on purpose:
//! output does not depend on it.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::birthdeath::{complete_graph_spec, expected_hitting_times, hitting_lower_bound, hitting_upper_bound};
use crate::bounds_cm::{
    const_degree_bounds, general_bounds, poisson_bounds, psi, Mu0Options, PsiQuery, RateFunction,
};
use crate::bounds_er::{
    complete_graph_report, dense_growth_exponent, entropy, sparse_growth_exponent, sparse_params, DenseRegime,
    SIGMA_MIN,
};
use crate::contact::{infected_trajectory, replicate, summarize, ContactConfig};
use crate::degree::{DegreeDistribution, DegreeKind};
use crate::error::Error;
use crate::graph::{
    gen_configuration, gen_erdos_renyi, min_cut_over_size, sampled_min_cut, verify_uniform_bound, Graph,
    VerifyOptions, DEFAULT_ENUMERATION_BUDGET,
};
use crate::pairing::{mixed_pair_pmf, simulate_pairing_indexed, tail_bound};
use crate::report::BoundReport;
use crate::rng::DEFAULT_SEED;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "CONTACT_META_SEED";

#[derive(Parser, Debug)]
#[command(name = "contact-meta", version, about = "Contact process metastability on random graphs")]
pub struct Cli {
    /// RNG seed; defaults to $CONTACT_META_SEED, then a fixed constant.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate an Erdős–Rényi or configuration-model graph as an edge list.
    Gen(GenArgs),
    /// Exact (or opt-in sampled) minimum cut over subsets of each size.
    Mincut(MincutArgs),
    /// Law of the number of mixed pairs in a uniform stub matching.
    Pairing(PairingArgs),
    /// Exact expected hitting times of the birth-death chain on K_N.
    Hitting(HittingArgs),
    /// Monte Carlo extinction times of the contact process.
    Simulate(SimulateArgs),
    /// Closed-form lower bounds.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Check the cut bound on every subset size up to gamma·N.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsCommand {
    /// Erdős–Rényi graphs: sparse (sigma/N), dense and complete.
    Er(BoundsErArgs),
    /// Configuration model with a given degree law.
    Cm(BoundsCmArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Er,
    Cm,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    /// Edge probability for `er`.
    #[arg(long)]
    pub p: Option<f64>,
    /// Degree law for `cm`: constant:d, poisson:mu, empirical:FILE or empirical:p0,p1,...
    #[arg(long)]
    pub dist: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct MincutArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Single subset size; otherwise every size in [k-lo, k-hi].
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub k_lo: Option<usize>,
    #[arg(long)]
    pub k_hi: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u64,
    /// Sample this many subsets when enumeration is over budget.
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct PairingArgs {
    #[arg(long)]
    pub n1: u64,
    #[arg(long)]
    pub n2: u64,
    /// Add an empirical frequency column from this many simulated matchings.
    #[arg(long)]
    pub simulate: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct HittingArgs {
    /// Number of nodes of the complete graph.
    #[arg(long)]
    pub complete: usize,
    /// Infection parameter; the per-edge rate is lambda/N.
    #[arg(long)]
    pub lambda: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Use K_N.
    #[arg(long)]
    pub complete: Option<usize>,
    /// Generate G(N, p) with --p.
    #[arg(long)]
    pub er: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Generate a configuration model on N nodes with --dist.
    #[arg(long)]
    pub cm: Option<usize>,
    #[arg(long)]
    pub dist: Option<String>,
    /// Per-edge infection rate.
    #[arg(long)]
    pub tau: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: u64,
    /// Censoring horizon.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Initially infected nodes, comma separated; default all.
    #[arg(long, value_delimiter = ',')]
    pub initial: Option<Vec<usize>>,
    /// Sample the infected count at start:end:count instead of replicating.
    #[arg(long)]
    pub trajectory: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Diverging,
    Constant,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsErArgs {
    /// Sparse regime p = sigma/N.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Sweep name=start:end:count with name in {sigma, tau}.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Dense regime: number of nodes.
    #[arg(long)]
    pub n: Option<u64>,
    /// Dense regime: edge probability.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_enum, default_value_t = Regime::Diverging)]
    pub regime: Regime,
    /// Complete graph with per-edge rate lambda/N.
    #[arg(long)]
    pub complete_lambda: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsCmArgs {
    /// constant:d, poisson:mu, empirical:FILE or empirical:p0,p1,...
    #[arg(long)]
    pub dist: String,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Number of gamma grid points in the mu0 search.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    /// Sweep tau=start:end:count.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Psi curve table over gamma=start:end:count ...
    #[arg(long)]
    pub psi_gammas: Option<String>,
    /// ... and lambda fractions start:end:count.
    #[arg(long, default_value = "0:0.9:10")]
    pub psi_lambdas: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// rho·p·k(N-k)
    Er,
    /// rho·k
    Linear,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Check sizes 1..=floor(gamma·N).
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub rho: f64,
    /// Edge probability in the bound; defaults to the graph's edge density.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_enum, default_value_t = BoundKind::Er)]
    pub bound: BoundKind,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or inputs; exit status 1.
    Usage(String),
    /// Anything else; exit status 2.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Internal(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Parse { .. } | Error::BudgetExceeded { .. } | Error::Inapplicable(_) => {
                CliError::Usage(e.to_string())
            }
            Error::NoUncensoredSamples { .. } | Error::Io(_) => CliError::Internal(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Resolves the seed: flag, then environment, then the built-in default.
pub fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{SEED_ENV} must be an unsigned integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Runs the parsed command and writes its artifact.
pub fn run(cli: Cli) -> CliResult<()> {
    let seed = resolve_seed(cli.seed)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be positive"));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Internal(e.to_string()))?;
    let text = pool.install(|| render(&cli, seed))?;
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gen(_) => "gen",
        Command::Mincut(_) => "mincut",
        Command::Pairing(_) => "pairing",
        Command::Hitting(_) => "hitting",
        Command::Simulate(_) => "simulate",
        Command::Bounds(BoundsCommand::Er(_)) => "bounds-er",
        Command::Bounds(BoundsCommand::Cm(_)) => "bounds-cm",
        Command::Verify(_) => "verify",
    }
}

struct Meta {
    command: &'static str,
    seed: u64,
    params: Value,
}

impl Meta {
    fn json(&self) -> Value {
        json!({
            "tool": "contact-meta",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.seed,
            "params": self.params,
        })
    }

    fn comment_header(&self) -> String {
        format!(
            "# contact-meta {}\n# command: {}\n# seed: {}\n# params: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.seed,
            self.params
        )
    }
}

/// Table with a header row; cells are written with `Display`, so floats use
/// the shortest representation that round-trips.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    /// Extra `# key: value` lines placed after the metadata.
    notes: Vec<(String, String)>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), notes: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render_csv(&self, meta: &Meta) -> String {
        let mut s = meta.comment_header();
        for (k, v) in &self.notes {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj = self.columns.iter().zip(r).map(|(c, v)| (c.clone(), cell_json(v))).collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::Map::new();
        for (k, v) in &self.notes {
            out.insert(k.clone(), cell_json(v));
        }
        out.insert("rows".into(), Value::Array(rows));
        Value::Object(out)
    }
}

fn cell_json(v: &str) -> Value {
    if v.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = v.parse::<i64>() {
        return json!(i);
    }
    if let Ok(x) = v.parse::<f64>() {
        if x.is_finite() {
            return json!(x);
        }
    }
    match v {
        "true" => json!(true),
        "false" => json!(false),
        _ => json!(v),
    }
}

fn cell(x: f64) -> String {
    format!("{x}")
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}

enum Artifact {
    Table(Table),
    Json(Value),
    Text(String),
}

fn render(cli: &Cli, seed: u64) -> CliResult<String> {
    let meta = Meta {
        command: command_name(&cli.command),
        seed,
        params: serde_json::to_value(&cli.command).map_err(|e| CliError::Internal(e.to_string()))?,
    };
    let artifact = match &cli.command {
        Command::Gen(a) => cmd_gen(a, seed)?,
        Command::Mincut(a) => cmd_mincut(a, seed)?,
        Command::Pairing(a) => cmd_pairing(a, seed)?,
        Command::Hitting(a) => cmd_hitting(a)?,
        Command::Simulate(a) => cmd_simulate(a, seed, cli.format)?,
        Command::Bounds(BoundsCommand::Er(a)) => cmd_bounds_er(a)?,
        Command::Bounds(BoundsCommand::Cm(a)) => cmd_bounds_cm(a)?,
        Command::Verify(a) => cmd_verify(a, seed)?,
    };
    Ok(match artifact {
        Artifact::Text(body) => {
            if cli.format.is_some() {
                return Err(usage("--format does not apply to edge-list output"));
            }
            meta.comment_header() + &body
        }
        Artifact::Table(t) => match cli.format.unwrap_or(Format::Csv) {
            Format::Csv => t.render_csv(&meta),
            Format::Json => pretty(json!({ "metadata": meta.json(), "result": t.to_json() }))?,
        },
        Artifact::Json(v) => match cli.format.unwrap_or(Format::Json) {
            Format::Json => pretty(json!({ "metadata": meta.json(), "result": v }))?,
            Format::Csv => return Err(usage("this command only produces JSON; drop --format csv or use --sweep")),
        },
    })
}

fn pretty(v: Value) -> CliResult<String> {
    serde_json::to_string_pretty(&v).map(|s| s + "\n").map_err(|e| CliError::Internal(e.to_string()))
}

/// `start:end:count`, evenly spaced, endpoints included.
pub fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let bad = || usage(format!("expected start:end:count, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect())
}

/// `name=start:end:count`.
pub fn parse_sweep(s: &str) -> CliResult<(String, Vec<f64>)> {
    let (name, range) = s.split_once('=').ok_or_else(|| usage(format!("expected name=start:end:count, got '{s}'")))?;
    Ok((name.trim().to_string(), parse_range(range)?))
}

/// Parses a degree law; `empirical:PATH` reads `k probability` lines from a
/// file when PATH exists, otherwise the value is an inline pmf.
pub fn parse_dist(s: &str) -> CliResult<DegreeDistribution> {
    if let Some(rest) = s.strip_prefix("empirical:") {
        let path = std::path::Path::new(rest);
        if path.is_file() {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{rest}: {e}")))?;
            return Ok(DegreeDistribution::read_empirical(&text)?);
        }
    }
    Ok(s.parse()?)
}

fn load_graph(path: &PathBuf) -> CliResult<Graph> {
    let file = std::fs::File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(Graph::read_edge_list(std::io::BufReader::new(file))?)
}

fn cmd_gen(a: &GenArgs, seed: u64) -> CliResult<Artifact> {
    let g = match a.model {
        Model::Er => gen_erdos_renyi(a.n, a.p.ok_or_else(|| usage("--model er needs --p"))?, seed)?,
        Model::Cm => gen_configuration(a.n, &parse_dist(a.dist.as_deref().ok_or_else(|| usage("--model cm needs --dist"))?)?, seed)?,
    };
    let d = g.discarded();
    let mut buf = format!("# discarded self-loop stubs: {}, leftover stubs: {}\n", d.self_loop_stubs, d.leftover_stubs).into_bytes();
    g.write_edge_list(&mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Artifact::Text(String::from_utf8(buf).map_err(|e| CliError::Internal(e.to_string()))?))
}

fn witness_cell(w: &[usize]) -> String {
    w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_mincut(a: &MincutArgs, seed: u64) -> CliResult<Artifact> {
    let g = load_graph(&a.graph)?;
    let (lo, hi) = match (a.k, a.k_lo, a.k_hi) {
        (Some(k), None, None) => (k, k),
        (None, lo, hi) => (lo.unwrap_or(1), hi.unwrap_or(g.n_nodes().saturating_sub(1))),
        _ => return Err(usage("use either --k or --k-lo/--k-hi")),
    };
    if lo == 0 || lo > hi || hi >= g.n_nodes() {
        return Err(usage(format!("need 1 <= k-lo <= k-hi < {}", g.n_nodes())));
    }
    let mut t = Table::new(&["k", "min_cut", "exact", "witness"]);
    for k in lo..=hi {
        let (mc, exact) = match min_cut_over_size(&g, k, a.budget) {
            Ok(mc) => (mc, true),
            Err(e @ Error::BudgetExceeded { .. }) => match a.samples {
                Some(s) => (sampled_min_cut(&g, k, s, seed.wrapping_add(k as u64))?, false),
                None => return Err(usage(format!("{e}; pass --samples to sample instead"))),
            },
            Err(e) => return Err(e.into()),
        };
        t.push(vec![k.to_string(), mc.size.to_string(), exact.to_string(), witness_cell(&mc.witness)]);
    }
    Ok(Artifact::Table(t))
}

fn cmd_pairing(a: &PairingArgs, seed: u64) -> CliResult<Artifact> {
    let law = mixed_pair_pmf(a.n1, a.n2)?;
    let counts = match a.simulate {
        Some(reps) => {
            use rayon::prelude::*;
            let draws: Vec<u64> = (0..reps)
                .into_par_iter()
                .map(|r| simulate_pairing_indexed(a.n1, a.n2, seed, r))
                .collect::<crate::Result<_>>()?;
            let mut c = vec![0u64; law.pmf.len()];
            for l in draws {
                c[l as usize] += 1;
            }
            Some((c, reps))
        }
        None => None,
    };
    let mut cols = vec!["l", "probability", "tail_bound"];
    if counts.is_some() {
        cols.push("empirical");
    }
    let mut t = Table::new(&cols);
    for l in 0..law.pmf.len() as u64 {
        let mut row = vec![l.to_string(), cell(law.prob(l)), cell(tail_bound(a.n1, a.n2, l))];
        if let Some((c, reps)) = &counts {
            row.push(cell(c[l as usize] as f64 / *reps as f64));
        }
        t.push(row);
    }
    t.notes.push(("mean".into(), cell(law.mean())));
    Ok(Artifact::Table(t))
}

fn cmd_hitting(a: &HittingArgs) -> CliResult<Artifact> {
    let spec = complete_graph_spec(a.complete, a.lambda)?;
    let h = expected_hitting_times(&spec);
    let (lower, upper) = (hitting_lower_bound(&spec).ln(), hitting_upper_bound(&spec).ln());
    let n = a.complete;
    let mut t = Table::new(&["k", "log_h", "log_lower", "log_upper"]);
    for k in 1..=n {
        t.push(vec![k.to_string(), cell(h.at(k).ln()), cell(lower), cell(upper)]);
    }
    t.notes.push(("rate".into(), cell(h.at(n).ln() / n as f64)));
    let limit = if a.lambda > 1.0 { Some(a.lambda.ln() + 1.0 / a.lambda - 1.0) } else { None };
    t.notes.push(("limit".into(), opt_cell(limit)));
    Ok(Artifact::Table(t))
}

fn simulation_graph(a: &SimulateArgs, seed: u64) -> CliResult<Graph> {
    let sources = [a.graph.is_some(), a.complete.is_some(), a.er.is_some(), a.cm.is_some()];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(usage("give exactly one of --graph, --complete, --er, --cm"));
    }
    if let Some(path) = &a.graph {
        return load_graph(path);
    }
    if let Some(n) = a.complete {
        return Ok(Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1))))?);
    }
    if let Some(n) = a.er {
        return Ok(gen_erdos_renyi(n, a.p.ok_or_else(|| usage("--er needs --p"))?, seed)?);
    }
    let n = a.cm.expect("one source is set");
    let dist = parse_dist(a.dist.as_deref().ok_or_else(|| usage("--cm needs --dist"))?)?;
    Ok(gen_configuration(n, &dist, seed)?)
}

fn cmd_simulate(a: &SimulateArgs, seed: u64, format: Option<Format>) -> CliResult<Artifact> {
    let g = simulation_graph(a, seed)?;
    let mut cfg = ContactConfig::new(a.tau).with_seed(seed);
    if let Some(nodes) = &a.initial {
        cfg = cfg.with_initial(nodes.clone());
    }
    if let Some(t) = a.t_max {
        cfg = cfg.with_t_max(t);
    }
    if let Some(spec) = &a.trajectory {
        let times = parse_range(spec)?;
        let counts = infected_trajectory(&g, &cfg, &times)?;
        let mut t = Table::new(&["time", "infected"]);
        for (time, k) in times.iter().zip(counts) {
            t.push(vec![cell(*time), k.to_string()]);
        }
        return Ok(Artifact::Table(t));
    }
    if a.reps == 0 {
        return Err(usage("--reps must be positive"));
    }
    let samples = replicate(&g, &cfg, a.reps)?;
    let summary = summarize(&samples);
    if format == Some(Format::Json) {
        return Ok(Artifact::Json(serde_json::to_value(summary).map_err(|e| CliError::Internal(e.to_string()))?));
    }
    let mut t = Table::new(&["rep", "time", "censored", "peak_infected", "events"]);
    for (r, s) in samples.iter().enumerate() {
        t.push(vec![r.to_string(), cell(s.time), s.censored.to_string(), s.peak_infected.to_string(), s.events.to_string()]);
    }
    Ok(Artifact::Table(t))
}

/// Threshold-only report for the sparse regime, used when no `τ` is given.
fn sparse_threshold_report(sigma: f64) -> crate::Result<BoundReport> {
    let mut r = BoundReport::new().input("sigma", sigma);
    match sparse_params(sigma) {
        Ok(sp) => {
            let tau0 = sp.tau0();
            r = r
                .term("zeta", sp.zeta)
                .term("gamma_sigma", sp.gamma_sigma)
                .term("alpha", sp.alpha)
                .term("c", sp.c)
                .term("gamma0", sp.gamma0)
                .term("tau0", tau0)
                .term("sigma_tau0", sigma * tau0);
            r.threshold_tau = Some(tau0);
            r.feasible = true;
            Ok(r)
        }
        Err(Error::Inapplicable(msg)) => Ok(r.note(msg)),
        Err(e) => Err(e),
    }
}

fn sparse_report(sigma: f64, tau: Option<f64>) -> crate::Result<BoundReport> {
    match tau {
        Some(t) => sparse_growth_exponent(sigma, t),
        None => sparse_threshold_report(sigma),
    }
}

/// One row per report; columns are the union of inputs and terms.
fn reports_table(param: &str, rows: &[(f64, BoundReport)]) -> Table {
    let keys: BTreeSet<&String> = rows.iter().flat_map(|(_, r)| r.inputs.keys().chain(r.terms.keys())).collect();
    let keys: Vec<&String> = keys.into_iter().filter(|k| k.as_str() != param).collect();
    let mut cols = vec![param.to_string(), "feasible".into(), "threshold_tau".into(), "growth_exponent".into()];
    cols.extend(keys.iter().map(|k| k.to_string()));
    let mut t = Table { columns: cols, rows: Vec::new(), notes: Vec::new() };
    for (x, r) in rows {
        let mut row = vec![cell(*x), r.feasible.to_string(), opt_cell(r.threshold_tau), opt_cell(r.growth_exponent)];
        row.extend(keys.iter().map(|k| opt_cell(r.get(k))));
        t.push(row);
    }
    t
}

fn report_json(r: &BoundReport) -> CliResult<Value> {
    serde_json::to_value(r).map_err(|e| CliError::Internal(e.to_string()))
}

fn cmd_bounds_er(a: &BoundsErArgs) -> CliResult<Artifact> {
    if let Some(lam) = a.complete_lambda {
        return Ok(Artifact::Json(report_json(&complete_graph_report(lam)?)?));
    }
    if a.n.is_some() || a.p.is_some() {
        let n = a.n.ok_or_else(|| usage("dense regime needs --n"))?;
        let p = a.p.ok_or_else(|| usage("dense regime needs --p"))?;
        let tau = a.tau.ok_or_else(|| usage("dense regime needs --tau"))?;
        let regime = match a.regime {
            Regime::Diverging => DenseRegime::Diverging,
            Regime::Constant => DenseRegime::Constant,
        };
        return Ok(Artifact::Json(report_json(&dense_growth_exponent(n, p, tau, a.eps, regime)?)?));
    }
    if let Some(sweep) = &a.sweep {
        let (name, values) = parse_sweep(sweep)?;
        let rows = match name.as_str() {
            "sigma" => values.iter().map(|&s| Ok((s, sparse_report(s, a.tau)?))).collect::<crate::Result<Vec<_>>>()?,
            "tau" => {
                let sigma = a.sigma.ok_or_else(|| usage("a tau sweep needs --sigma"))?;
                values.iter().map(|&t| Ok((t, sparse_growth_exponent(sigma, t)?))).collect::<crate::Result<Vec<_>>>()?
            }
            other => return Err(usage(format!("cannot sweep '{other}'; use sigma or tau"))),
        };
        let mut t = reports_table(&name, &rows);
        t.notes.push(("sigma_min".into(), cell(SIGMA_MIN)));
        return Ok(Artifact::Table(t));
    }
    let sigma = a.sigma.ok_or_else(|| usage("give --sigma, --n/--p, --complete-lambda or --sweep"))?;
    Ok(Artifact::Json(report_json(&sparse_report(sigma, a.tau)?)?))
}

fn family_report(dist: &DegreeDistribution, tau: f64, eps: f64) -> crate::Result<Option<BoundReport>> {
    let r = match dist.kind() {
        DegreeKind::Constant { d } => const_degree_bounds(*d, tau, eps),
        DegreeKind::Poisson { mu } => poisson_bounds(*mu, tau, eps),
        DegreeKind::Empirical { .. } => return Ok(None),
    };
    match r {
        Ok(r) => Ok(Some(r)),
        Err(Error::Inapplicable(msg)) => Ok(Some(BoundReport::new().input("tau", tau).note(msg))),
        Err(e) => Err(e),
    }
}

fn cmd_bounds_cm(a: &BoundsCmArgs) -> CliResult<Artifact> {
    let dist = parse_dist(&a.dist)?;
    let rate = RateFunction::new(dist.clone());
    if let Some(gs) = &a.psi_gammas {
        let (gammas, lambdas) = (parse_range(gs)?, parse_range(&a.psi_lambdas)?);
        let mut t = Table::new(&["gamma", "lambda_frac", "rho", "psi", "entropy", "margin", "ratio"]);
        for &g in &gammas {
            let h = entropy(g)?;
            for &l in &lambdas {
                let q = PsiQuery::from_lambda_frac(&dist, g, l)?;
                let v = psi(&rate, q).value;
                t.push(vec![cell(g), cell(l), cell(q.rho), cell(v), cell(h), cell(v - h), cell(v / h)]);
            }
        }
        return Ok(Artifact::Table(t));
    }
    let opts = Mu0Options { gamma_points: a.grid, ..Mu0Options::default() };
    if let Some(sweep) = &a.sweep {
        let (name, values) = parse_sweep(sweep)?;
        if name != "tau" {
            return Err(usage(format!("cannot sweep '{name}'; use tau")));
        }
        let mut rows = Vec::with_capacity(values.len());
        for &tau in &values {
            let r = match family_report(&dist, tau, a.eps)? {
                Some(r) => r,
                None => general_bounds(&rate, tau, opts)?,
            };
            rows.push((tau, r));
        }
        return Ok(Artifact::Table(reports_table("tau", &rows)));
    }
    let tau = a.tau.ok_or_else(|| usage("bounds cm needs --tau or --sweep"))?;
    let general = general_bounds(&rate, tau, opts)?;
    let mut out = serde_json::Map::new();
    out.insert("distribution".into(), json!(dist.to_string()));
    if let Some(r) = family_report(&dist, tau, a.eps)? {
        out.insert("closed_form".into(), report_json(&r)?);
    }
    out.insert("general".into(), report_json(&general)?);
    Ok(Artifact::Json(Value::Object(out)))
}

fn cmd_verify(a: &VerifyArgs, seed: u64) -> CliResult<Artifact> {
    let g = load_graph(&a.graph)?;
    let n = g.n_nodes();
    if !(a.gamma > 0.0 && a.gamma < 1.0) {
        return Err(usage("--gamma must lie in (0, 1)"));
    }
    if !(a.rho >= 0.0 && a.rho.is_finite()) {
        return Err(usage("--rho must be nonnegative"));
    }
    let k_hi = ((a.gamma * n as f64).floor() as usize).min(n.saturating_sub(1));
    if k_hi == 0 {
        return Err(usage(format!("gamma·N < 1 for N = {n}: nothing to check")));
    }
    let p = match a.p {
        Some(p) => p,
        None if n >= 2 => g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0) / 2.0),
        None => 0.0,
    };
    let (rho, kind) = (a.rho, a.bound);
    let bound = move |k: usize| match kind {
        BoundKind::Er => rho * p * k as f64 * (n - k) as f64,
        BoundKind::Linear => rho * k as f64,
    };
    let opts = VerifyOptions { budget: a.budget, samples: a.samples, seed };
    let checks = verify_uniform_bound(&g, 1, k_hi, bound, opts)?;
    let mut t = Table::new(&["k", "bound", "min_cut", "exact", "status", "witness"]);
    let mut violations = 0;
    for c in &checks {
        let status = serde_json::to_value(c.status).map_err(|e| CliError::Internal(e.to_string()))?;
        if c.status == crate::graph::CheckStatus::Violated {
            violations += 1;
        }
        t.push(vec![
            c.k.to_string(),
            cell(c.bound),
            c.min_cut.to_string(),
            c.exact.to_string(),
            status.as_str().unwrap_or_default().to_string(),
            witness_cell(&c.witness),
        ]);
    }
    t.notes.push(("p".into(), cell(p)));
    t.notes.push(("violations".into(), violations.to_string()));
    Ok(Artifact::Table(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("3:100:1").unwrap(), vec![3.0]);
        assert_eq!(parse_range("3:100:50").unwrap().last(), Some(&100.0));
        assert!(parse_range("1:2").is_err());
        assert!(parse_range("1:2:0").is_err());
        let (name, v) = parse_sweep("sigma=3:100:50").unwrap();
        assert_eq!((name.as_str(), v.len()), ("sigma", 50));
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(Error::param("x")).exit_code(), 1);
        assert_eq!(CliError::from(Error::Io(std::io::Error::other("x"))).exit_code(), 2);
    }

    #[test]
    fn json_cells() {
        assert_eq!(cell_json("3"), json!(3));
        assert_eq!(cell_json("0.25"), json!(0.25));
        assert_eq!(cell_json(""), Value::Null);
        assert_eq!(cell_json("true"), json!(true));
        assert_eq!(cell_json("0 4 7"), json!("0 4 7"));
    }

    #[test]
    fn sparse_threshold_only() {
        let r = sparse_threshold_report(10.0).unwrap();
        assert!(r.feasible && r.threshold_tau.unwrap() > 0.1);
        let r = sparse_threshold_report(2.0).unwrap();
        assert!(!r.feasible && r.threshold_tau.is_none());
    }
}
