//! `qldpc`: construct hypergraph-product codes, evaluate bounds, and run
//! decoding and percolation experiments.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qldpc_core::bounds::{self, BoundsReport};
use qldpc_core::code::{hypergraph_product_with_meta, CssCode};
use qldpc_core::decoder::{self, ClusterBudget, DecodeStatus, DEFAULT_MAX_WORK};
use qldpc_core::distance::{distance_exhaustive, find_low_weight_logical};
use qldpc_core::formats::{code_to_json, read_code_file, SeedSpec};
use qldpc_core::graph::{build_connectivity_graph, build_spacetime_graph};
use qldpc_core::harness::{run_sweep, Channel, SweepConfig};
use qldpc_core::pauli::PauliSpec;
use qldpc_core::percolation::{sample_cluster_histogram, sample_vertex_histogram};
use qldpc_core::Error;
use serde::{Deserialize, Serialize};

use config::{resolve, FileConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or input files. Exit code 2.
    Config(String),
    /// A search or decode ran out of budget. Exit code 3.
    Budget(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Budget(m) => write!(f, "budget exhausted: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(m) => CliError::Budget(m),
            Error::NoSolution(_) | Error::InconsistentSyndrome(_) => CliError::Other(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Writes to stdout; a closed pipe ends the process quietly.
fn out_raw(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

macro_rules! out {
    ($($arg:tt)*) => { out_raw(&(format!($($arg)*) + "\n")) };
}

#[derive(Parser, Debug)]
#[command(name = "qldpc", version, about = "Hypergraph-product quantum LDPC codes: construction, bounds, decoding and percolation")]
struct Cli {
    /// TOML file with defaults; command-line flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (results do not depend on this)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Seed for every random choice [default: 0]
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a hypergraph-product code from one or two seed matrices
    Construct(ConstructArgs),
    /// Report parameters, graph degrees and distance of a code file
    Analyze(AnalyzeArgs),
    /// Print closed-form threshold, rate and distance bounds as JSON
    Bounds(BoundsArgs),
    /// Monte Carlo decoding sweep; writes CSV
    Sim(SimArgs),
    /// Cluster-size histogram on the qubit or space-time graph; writes CSV
    Percolate(PercolateArgs),
    /// Decode one error and print the outcome as JSON
    Decode(DecodeArgs),
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstructArgs {
    /// First seed: circulant:L:i1,i2,..., random:n:h:v:seed, dense:PATH or an alist path
    #[arg(long, value_name = "SPEC")]
    h1: Option<String>,
    /// Second seed [default: same as --h1]
    #[arg(long, value_name = "SPEC")]
    h2: Option<String>,
    /// Write the code as JSON to this file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DistanceMode {
    /// Exhaustive for small codes or small w-max, randomized otherwise
    Auto,
    /// Randomized information-set search only
    Upper,
    /// Exhaustive search up to --w-max only
    Exhaustive,
    /// Both searches
    Both,
    /// Skip distance estimation
    None,
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeArgs {
    /// Code JSON file
    #[arg(long, value_name = "FILE")]
    code: Option<PathBuf>,
    /// Distance estimation mode [default: auto]
    #[arg(long, value_enum)]
    distance: Option<DistanceMode>,
    /// Rounds of randomized search [default: 1000]
    #[arg(long, value_name = "N")]
    iterations: Option<u64>,
    /// Largest weight checked exhaustively [default: 4]
    #[arg(long, value_name = "W")]
    w_max: Option<usize>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsArgs {
    /// Maximum column weight j
    #[arg(long)]
    j: Option<usize>,
    /// Maximum row weight l
    #[arg(long)]
    l: Option<usize>,
    /// Column weight h of a random (h,v)-regular seed, for the distance and blocklength estimates
    #[arg(long)]
    h: Option<usize>,
    /// Row weight v of a random (h,v)-regular seed
    #[arg(long)]
    v: Option<usize>,
    /// Power in the (1±y)^k terms of the distance equation [default: v]
    #[arg(long, value_name = "K")]
    gv_exponent: Option<usize>,
    /// Target failure probability per cycle for the blocklength estimate [default: 1e-9]
    #[arg(long, value_name = "PF")]
    blocklength_pf: Option<f64>,
    /// Single-qubit error rate for the blocklength estimate [default: p1(z)/e^2]
    #[arg(long, value_name = "P")]
    blocklength_p: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ChannelArg {
    Erasure,
    Depolarizing,
}

impl From<ChannelArg> for Channel {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Erasure => Channel::Erasure,
            ChannelArg::Depolarizing => Channel::Depolarizing,
        }
    }
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimArgs {
    /// Code JSON file
    #[arg(long, value_name = "FILE")]
    code: Option<PathBuf>,
    /// Noise channel
    #[arg(long, value_enum)]
    channel: Option<ChannelArg>,
    /// Comma-separated error probabilities
    #[arg(long, value_delimiter = ',', value_name = "P,...")]
    p: Option<Vec<f64>>,
    /// Trials per probability [default: 1000]
    #[arg(long, value_name = "N")]
    trials: Option<u64>,
    /// Largest correction weight searched per cluster [default: from the tail bound]
    #[arg(long, value_name = "W")]
    max_cluster_size: Option<usize>,
    /// Error patterns examined per decode before giving up [default: 100000000]
    #[arg(long, value_name = "N")]
    max_work: Option<u64>,
    /// Distance used in the default cluster budget [default: randomized estimate]
    #[arg(long, value_name = "D")]
    distance_hint: Option<usize>,
    /// Leave budget exhaustion out of the failure rate
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    exclude_budget_failures: bool,
    /// Write the CSV here and a JSON sidecar next to it
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PercolateArgs {
    /// Code JSON file
    #[arg(long, value_name = "FILE")]
    code: Option<PathBuf>,
    /// Site occupation probability
    #[arg(long)]
    p: Option<f64>,
    /// Number of samples [default: 1000]
    #[arg(long, value_name = "N")]
    trials: Option<u64>,
    /// Use the space-time graph with this many syndrome rounds
    #[arg(long, value_name = "R")]
    rounds: Option<usize>,
    /// Only record the cluster containing this vertex
    #[arg(long, value_name = "V")]
    vertex: Option<usize>,
    /// Write the CSV here instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecodeArgs {
    /// Code JSON file
    #[arg(long, value_name = "FILE")]
    code: Option<PathBuf>,
    /// Noise channel
    #[arg(long, value_enum)]
    channel: Option<ChannelArg>,
    /// The error, e.g. "X0 Z5 Y7"
    #[arg(long, value_name = "PAULIS")]
    error: Option<String>,
    /// Erased qubits for the erasure channel [default: support of the error]
    #[arg(long, value_delimiter = ',', value_name = "Q,...")]
    erasure: Option<Vec<usize>>,
    /// Largest correction weight searched per cluster [default: n]
    #[arg(long, value_name = "W")]
    max_cluster_size: Option<usize>,
    /// Error patterns examined before giving up [default: 100000000]
    #[arg(long, value_name = "N")]
    max_work: Option<u64>,
}

#[derive(Serialize)]
struct Resolved<'a, T: Serialize> {
    command: &'a str,
    seed: u64,
    threads: Option<usize>,
    #[serde(flatten)]
    args: &'a T,
}

fn require<T: Clone>(value: &Option<T>, flag: &str) -> CliResult<T> {
    value.clone().ok_or_else(|| CliError::Config(format!("missing --{flag}")))
}

fn load_code(path: &Option<PathBuf>) -> CliResult<CssCode> {
    let path = require(path, "code")?;
    read_code_file(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))
}

fn parse_seed(spec: &str) -> CliResult<SeedSpec> {
    spec.parse().map_err(|e: Error| CliError::Config(format!("seed {spec:?}: {e}")))
}

fn construct(args: &ConstructArgs) -> CliResult<()> {
    let s1 = require(&args.h1, "h1")?;
    let s2 = args.h2.clone().unwrap_or_else(|| s1.clone());
    let h1 = parse_seed(&s1)?.to_matrix()?;
    let h2 = parse_seed(&s2)?.to_matrix()?;
    let code = hypergraph_product_with_meta(&h1, &h2, format!("hypergraph_product({s1}, {s2})"))?;
    out!("{}", code.parameters_string(None));
    out!("n={} k={} j={} l={} z={}", code.n(), code.k(), code.j(), code.ell(), code.z_bound());
    if let Some(out) = &args.out {
        write_file(out, &code_to_json(&code)?)?;
    }
    Ok(())
}

fn analyze(args: &AnalyzeArgs, seed: u64) -> CliResult<()> {
    let code = load_code(&args.code)?;
    let graph = build_connectivity_graph(&code);
    out!("parameters: {}", code.parameters_string(None));
    out!(
        "n={} k={} j={} l={} z={} rank_gx={} rank_gz={}",
        code.n(),
        code.k(),
        code.j(),
        code.ell(),
        code.z_bound(),
        code.rank_x(),
        code.rank_z()
    );
    let hist: Vec<String> = graph
        .degree_histogram()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(d, c)| format!("{d}:{c}"))
        .collect();
    out!("degree histogram (degree:count): {}", hist.join(" "));
    out!("max degree {} (bound {})", graph.max_degree_observed(), graph.z_bound());
    let mode = args.distance.unwrap_or(DistanceMode::Auto);
    let w_max = args.w_max.unwrap_or(4);
    let iterations = args.iterations.unwrap_or(1000);
    if mode == DistanceMode::None || code.k() == 0 {
        return Ok(());
    }
    let (upper, exhaustive) = match mode {
        DistanceMode::Upper => (true, false),
        DistanceMode::Exhaustive => (false, true),
        DistanceMode::Both => (true, true),
        _ => match qldpc_core::distance::DistanceStrategy::choose(code.n(), w_max) {
            qldpc_core::distance::DistanceStrategy::Exhaustive => (false, true),
            qldpc_core::distance::DistanceStrategy::Randomized => (true, false),
        },
    };
    if upper {
        match find_low_weight_logical(&code, iterations, seed)? {
            Some(l) => out!("distance upper bound: {} ({iterations} iterations, seed {seed}): {}", l.weight(), l.to_pauli()),
            None => out!("distance upper bound: none found in {iterations} iterations"),
        }
    }
    if exhaustive {
        match distance_exhaustive(&code, w_max)? {
            Some(d) => out!("distance: {d} (exhaustive)"),
            None => out!("distance: > {w_max} (exhaustive, no logical of weight <= {w_max})"),
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BoundsOutput {
    #[serde(flatten)]
    report: BoundsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocklength: Option<BlocklengthOutput>,
}

#[derive(Serialize)]
struct BlocklengthOutput {
    p: f64,
    p_assumption: String,
    pf_per_cycle: f64,
    n: u64,
}

fn bounds_cmd(args: &BoundsArgs) -> CliResult<()> {
    let j = require(&args.j, "j")?;
    let l = require(&args.l, "l")?;
    let mut report = BoundsReport::new(j, l)?;
    let mut blocklength = None;
    match (args.h, args.v) {
        (Some(h), Some(v)) => {
            report = report.with_gv(h, v, args.gv_exponent)?;
            let pf = args.blocklength_pf.unwrap_or(1e-9);
            let (p, assumption) = match args.blocklength_p {
                Some(p) => (p, "given".to_string()),
                None => (bounds::default_blocklength_p(h, v)?, format!("p1(z={})/e^2", v * (v + h - 1))),
            };
            let n = bounds::min_blocklength(h, v, p, pf)?;
            blocklength = Some(BlocklengthOutput { p, p_assumption: assumption, pf_per_cycle: pf, n });
        }
        (None, None) => {}
        _ => return Err(CliError::Config("--h and --v must be given together".into())),
    }
    let out = BoundsOutput { report, blocklength };
    out!("{}", serde_json::to_string_pretty(&out).map_err(|e| CliError::Other(e.to_string()))?);
    Ok(())
}

fn sim(args: &SimArgs, seed: u64) -> CliResult<()> {
    let code = load_code(&args.code)?;
    let channel: Channel = require(&args.channel, "channel")?.into();
    let p_values = require(&args.p, "p")?;
    let max_p = p_values.iter().copied().fold(0.0, f64::max);
    let max_cluster_size = match args.max_cluster_size {
        Some(w) => w,
        None => {
            let d = match args.distance_hint {
                Some(d) => d,
                None if code.k() > 0 => qldpc_core::distance::distance_upper_bound(&code, 100, seed)?,
                None => 1,
            };
            ClusterBudget::recommended(d, code.n(), max_p, code.z_bound()).max_cluster_size
        }
    };
    let config = SweepConfig {
        channel,
        p_values,
        trials: args.trials.unwrap_or(1000),
        seed,
        budget: ClusterBudget { max_cluster_size, max_work: args.max_work.unwrap_or(DEFAULT_MAX_WORK) },
        count_budget_failures: !args.exclude_budget_failures,
    };
    let result = run_sweep(&code, &config)?;
    let csv = result.to_csv();
    match &args.out {
        Some(out) => {
            write_file(out, &csv)?;
            let mut sidecar = out.clone().into_os_string();
            sidecar.push(".json");
            write_file(Path::new(&sidecar), &(result.sidecar_json()? + "\n"))?;
        }
        None => out_raw(&csv),
    }
    Ok(())
}

fn percolate(args: &PercolateArgs, seed: u64) -> CliResult<()> {
    let code = load_code(&args.code)?;
    let p = require(&args.p, "p")?;
    let trials = args.trials.unwrap_or(1000);
    let graph = match args.rounds {
        Some(r) => build_spacetime_graph(&code, r)?.0,
        None => build_connectivity_graph(&code),
    };
    let hist = match args.vertex {
        Some(v) => sample_vertex_histogram(&graph, v, p, trials, seed)?,
        None => sample_cluster_histogram(&graph, p, trials, seed)?,
    };
    let csv = hist.to_csv(graph.z_bound());
    match &args.out {
        Some(out) => write_file(out, &csv)?,
        None => out_raw(&csv),
    }
    Ok(())
}

#[derive(Serialize)]
struct DecodeOutput {
    error: String,
    correction: String,
    status: DecodeStatus,
    clusters_processed: usize,
    largest_cluster: usize,
    work_units: u64,
}

fn decode(args: &DecodeArgs) -> CliResult<()> {
    let code = load_code(&args.code)?;
    let graph = build_connectivity_graph(&code);
    let channel: Channel = require(&args.channel, "channel")?.into();
    let spec: PauliSpec = require(&args.error, "error")?.parse()?;
    let error = spec.to_vector(code.n())?;
    let synd = decoder::syndrome(&code, &error)?;
    let mut outcome = match channel {
        Channel::Erasure => {
            let mask = args.erasure.clone().unwrap_or_else(|| error.support());
            decoder::decode_erasure(&code, &graph, &mask, &synd)?
        }
        Channel::Depolarizing => {
            let budget = ClusterBudget {
                max_cluster_size: args.max_cluster_size.unwrap_or(code.n()),
                max_work: args.max_work.unwrap_or(DEFAULT_MAX_WORK),
            };
            decoder::decode_depolarizing(&code, &graph, &synd, &budget)?
        }
    };
    let status = outcome.adjudicate_against(&code, &error)?;
    let out = DecodeOutput {
        error: error.to_string(),
        correction: outcome.correction.to_string(),
        status,
        clusters_processed: outcome.clusters_processed,
        largest_cluster: outcome.largest_cluster,
        work_units: outcome.work_units,
    };
    out!("{}", serde_json::to_string_pretty(&out).map_err(|e| CliError::Other(e.to_string()))?);
    if status == DecodeStatus::ClusterBudgetExceeded {
        return Err(CliError::Budget("cluster budget exceeded while decoding".into()));
    }
    Ok(())
}

fn run_with<T: Serialize + serde::de::DeserializeOwned>(
    name: &str,
    flags: &T,
    file: &FileConfig,
    seed: u64,
    threads: Option<usize>,
    body: impl FnOnce(&T) -> CliResult<()>,
) -> CliResult<()> {
    let args: T = resolve(flags, file.section(name), name)?;
    let shown = Resolved { command: name, seed, threads, args: &args };
    eprintln!("resolved config: {}", serde_json::to_string(&shown).map_err(|e| CliError::Other(e.to_string()))?);
    body(&args)
}

fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let threads = cli.threads.or(file.threads);
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    match &cli.command {
        Command::Construct(a) => run_with("construct", a, &file, seed, threads, construct),
        Command::Analyze(a) => run_with("analyze", a, &file, seed, threads, |a| analyze(a, seed)),
        Command::Bounds(a) => run_with("bounds", a, &file, seed, threads, bounds_cmd),
        Command::Sim(a) => run_with("sim", a, &file, seed, threads, |a| sim(a, seed)),
        Command::Percolate(a) => run_with("percolate", a, &file, seed, threads, |a| percolate(a, seed)),
        Command::Decode(a) => run_with("decode", a, &file, seed, threads, decode),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
