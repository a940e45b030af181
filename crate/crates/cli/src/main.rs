//! `arw`: command-line front end for absorbing random-walk centrality.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use arw::experiment::{
    generate_queries, load_dataset, parse_k_range, run_experiment, Algorithm, CandidateMode,
    ExperimentSpec,
};
use arw::oracle::{exhaustive_opt, simulate, DEFAULT_SUBSET_BUDGET};
use arw::walk::DEFAULT_MAX_ITERATIONS;
use arw::{
    approximate_ac, build_transition, exact_ac, CentralityProblem, Error, LoadedGraph, NodeSet,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "arw", version, about = "Absorbing random-walk centrality")]
#[command(
    after_help = "Exit codes: 0 success, 1 invalid input, 2 numerical failure.\n\
    ARW_THREADS caps the number of worker threads."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algorithm-by-budget experiment and write CSV.
    Run(RunArgs),
    /// Exact and series evaluation of one absorbing set.
    Eval(EvalArgs),
    /// Monte-Carlo estimate for one absorbing set.
    Simulate(SimulateArgs),
    /// Exhaustive optimum over all k-subsets of the candidates.
    Opt(OptArgs),
    /// Print a generated query set, one label per line.
    Queries(QueryArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key = value experiment file; flags override its values.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Edge-list path, `karate`, `barbell:<clique>:<bridge>` or `random:<n>:<m>:<seed>`.
    #[arg(long)]
    dataset: Option<String>,
    /// Dataset name written to the CSV (default: file stem).
    #[arg(long)]
    name: Option<String>,
    /// Restart probability [default: 0.15].
    #[arg(long)]
    alpha: Option<f64>,
    /// Budget `k` or inclusive range `lo..hi` [default: 1..5].
    #[arg(long)]
    k: Option<String>,
    /// Candidate set: every node or only the query nodes [default: all].
    #[arg(long, value_parser = ["all", "query"])]
    candidates: Option<String>,
    /// Algorithm to run; repeat for several [default: all seven].
    #[arg(long = "algo")]
    algorithms: Vec<String>,
    /// Seed for query generation and k-means [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Series threshold recorded with the run [default: 1e-6].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Pool size for greedy's first pick, ranked by personalized PageRank [default: 20].
    #[arg(long)]
    prune_t: Option<usize>,
    /// Scan every candidate for greedy's first pick.
    #[arg(long)]
    exact_first: bool,
    /// Number of ball centers [default: 2].
    #[arg(long)]
    seeds: Option<usize>,
    /// Ball radius [default: 2].
    #[arg(long)]
    radius: Option<usize>,
    /// Query set size [default: 10].
    #[arg(long)]
    queries: Option<usize>,
    /// Spectral embedding dimension [default: k].
    #[arg(long)]
    embedding_dim: Option<usize>,
    /// Write 0 in the seconds column so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
    /// CSV destination [default: stdout].
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the selected node labels per row to this file.
    #[arg(long)]
    selections: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long, default_value = "karate")]
    dataset: String,
    /// Comma-separated query labels; generated from random balls when absent.
    #[arg(long)]
    query: Option<String>,
    #[arg(long, default_value_t = 2)]
    seeds: usize,
    #[arg(long, default_value_t = 2)]
    radius: usize,
    #[arg(long, default_value_t = 10)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    query: QueryArgs,
    /// Comma-separated labels of the absorbing nodes.
    #[arg(long)]
    absorbing: String,
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    #[arg(long, default_value_t = arw::walk::DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long)]
    absorbing: String,
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// RNG seed for the walks.
    #[arg(long, default_value_t = 0)]
    walk_seed: u64,
}

#[derive(Args)]
struct OptArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "all", value_parser = ["all", "query"])]
    candidates: String,
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    /// Refuse to enumerate more subsets than this.
    #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
    budget: u128,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Eval(args) => eval(args),
        Command::Simulate(args) => simulate_cmd(args),
        Command::Opt(args) => opt(args),
        Command::Queries(args) => queries(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_status(&e))
        }
    }
}

/// 1 for invalid input, 2 for numerical failure.
fn exit_status(e: &Error) -> u8 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

fn configure_threads() -> arw::Result<()> {
    let Ok(value) = std::env::var("ARW_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            Error::Argument(format!("ARW_THREADS={value:?} is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Argument(e.to_string()))
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Argument(format!("{}: {e}", path.display()))
}

fn run(args: RunArgs) -> arw::Result<()> {
    let mut spec = match &args.spec {
        Some(path) => {
            ExperimentSpec::parse(&fs::read_to_string(path).map_err(|e| io_error(path, e))?)?
        }
        None => ExperimentSpec::default(),
    };
    if let Some(v) = args.dataset {
        spec.dataset = v;
    }
    if let Some(v) = args.name {
        spec.name = Some(v);
    }
    if let Some(v) = args.alpha {
        spec.alpha = v;
    }
    if let Some(v) = &args.k {
        (spec.k_min, spec.k_max) = parse_k_range(v)?;
    }
    if let Some(v) = &args.candidates {
        spec.candidates = v.parse()?;
    }
    if !args.algorithms.is_empty() {
        spec.algorithms = args
            .algorithms
            .iter()
            .flat_map(|a| a.split(','))
            .map(str::parse::<Algorithm>)
            .collect::<arw::Result<_>>()?;
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    if let Some(v) = args.epsilon {
        spec.epsilon = v;
    }
    if let Some(v) = args.prune_t {
        spec.prune_t = Some(v);
    }
    if args.exact_first {
        spec.exact_first = true;
    }
    if let Some(v) = args.seeds {
        spec.seeds = v;
    }
    if let Some(v) = args.radius {
        spec.radius = v;
    }
    if let Some(v) = args.queries {
        spec.query_count = v;
    }
    if let Some(v) = args.embedding_dim {
        spec.embedding_dim = Some(v);
    }
    if args.no_timing {
        spec.record_timing = false;
    }
    spec.validate()?;

    let loaded = load_dataset(&spec.dataset)?;
    let outcome = run_experiment(&loaded.graph, &spec)?;
    log::info!("query set: {}", labels(&loaded, &outcome.queries));
    let csv = arw::experiment::emit_csv(&outcome.rows);
    match &args.output {
        Some(path) => fs::write(path, csv).map_err(|e| io_error(path, e))?,
        None => std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| Error::Argument(e.to_string()))?,
    }
    if let Some(path) = &args.selections {
        let mut text = String::from("dataset,algorithm,k,nodes\n");
        for row in &outcome.rows {
            text.push_str(&format!(
                "{},{},{},{}\n",
                row.dataset,
                row.algorithm,
                row.k,
                labels(&loaded, &row.chosen).replace(',', " ")
            ));
        }
        fs::write(path, text).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

fn labels(loaded: &LoadedGraph, set: &NodeSet) -> String {
    set.iter()
        .map(|v| loaded.label(v))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_labels(loaded: &LoadedGraph, list: &str) -> arw::Result<NodeSet> {
    let ids = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|label| {
            loaded
                .id_of(label)
                .ok_or_else(|| Error::Argument(format!("unknown node {label:?}")))
        })
        .collect::<arw::Result<Vec<_>>>()?;
    if ids.is_empty() {
        return Err(Error::Argument("empty node list".into()));
    }
    Ok(NodeSet::from_ids(ids))
}

/// Loads the dataset and resolves or generates the query set.
fn resolve(args: &QueryArgs) -> arw::Result<(LoadedGraph, NodeSet)> {
    let loaded = load_dataset(&args.dataset)?;
    let query = match &args.query {
        Some(list) => parse_labels(&loaded, list)?,
        None => generate_queries(
            &loaded.graph,
            args.seeds,
            args.radius,
            args.queries,
            args.seed,
        )?,
    };
    Ok((loaded, query))
}

fn eval(args: EvalArgs) -> arw::Result<()> {
    let (loaded, query) = resolve(&args.query)?;
    let absorbing = parse_labels(&loaded, &args.absorbing)?;
    let n = loaded.graph.node_count();
    let problem = CentralityProblem::uniform(
        &loaded.graph,
        query,
        NodeSet::all(n),
        args.alpha,
        absorbing.len(),
    )?;
    let exact = exact_ac(&problem, &absorbing)?;
    let ts = build_transition(&problem, &absorbing)?;
    let series = approximate_ac(&ts, problem.start(), args.epsilon, DEFAULT_MAX_ITERATIONS)?;
    println!("query={}", labels(&loaded, problem.query()));
    println!("absorbing={}", labels(&loaded, &absorbing));
    println!("exact_ac={exact}");
    println!(
        "series_ac={} iterations={}",
        series.value, series.iterations
    );
    Ok(())
}

fn simulate_cmd(args: SimulateArgs) -> arw::Result<()> {
    let (loaded, query) = resolve(&args.query)?;
    let absorbing = parse_labels(&loaded, &args.absorbing)?;
    let n = loaded.graph.node_count();
    let problem = CentralityProblem::uniform(
        &loaded.graph,
        query,
        NodeSet::all(n),
        args.alpha,
        absorbing.len(),
    )?;
    let stats = simulate(&problem, &absorbing, args.samples, args.walk_seed)?;
    println!("query={}", labels(&loaded, problem.query()));
    println!("samples={}", stats.samples);
    println!("mean={}", stats.mean);
    println!("std_dev={}", stats.std_dev);
    println!("ci99_half_width={}", stats.ci_half_width);
    if stats.capped > 0 {
        println!("capped={}", stats.capped);
    }
    for (v, count) in &stats.absorbed_at {
        println!("absorbed {}={count}", loaded.label(*v));
    }
    Ok(())
}

fn opt(args: OptArgs) -> arw::Result<()> {
    let (loaded, query) = resolve(&args.query)?;
    let candidates = match args.candidates.parse()? {
        CandidateMode::All => NodeSet::all(loaded.graph.node_count()),
        CandidateMode::Query => query.clone(),
    };
    let problem = CentralityProblem::uniform(&loaded.graph, query, candidates, args.alpha, args.k)?;
    let (best, value) = exhaustive_opt(&problem, args.budget)?;
    println!("query={}", labels(&loaded, problem.query()));
    println!("optimum={}", labels(&loaded, &best));
    println!("ac={value}");
    Ok(())
}

fn queries(args: QueryArgs) -> arw::Result<()> {
    let (loaded, query) = resolve(&args)?;
    for v in query.iter() {
        println!("{}", loaded.label(v));
    }
    Ok(())
}
