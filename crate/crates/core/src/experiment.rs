//! Experiment harness: query generation from random balls, the
//! algorithm-by-budget matrix, and CSV output.
//!
//! Experiment files are flat `key = value` text; `#` starts a comment.
//!
//! | key                | value                                           | default |
//! |--------------------|-------------------------------------------------|---------|
//! | `dataset`          | edge-list path or built-in name                 | `karate`|
//! | `name`             | dataset name written to the CSV                 | derived |
//! | `seeds`            | number of ball centers                          | 2       |
//! | `radius`           | ball radius in hops                             | 2       |
//! | `queries`          | query set size                                  | 10      |
//! | `alpha`            | restart probability                             | 0.15    |
//! | `candidates`       | `all` or `query`                                | `all`   |
//! | `k`                | budget `3` or range `1..5` (inclusive)          | `1..5`  |
//! | `algorithms`       | comma list, see [`Algorithm`]                   | all     |
//! | `seed`             | RNG seed                                        | 0       |
//! | `epsilon`          | series threshold for approximate evaluation     | 1e-6    |
//! | `prune_t`          | greedy first-pick pool, or `none`               | 20      |
//! | `exact_first`      | `true` disables first-pick pruning              | false   |
//! | `greedy_max_nodes` | skip greedy on larger graphs                    | 20000   |
//! | `embedding_dim`    | spectral dimension, or `k` to follow the budget | `k`     |
//! | `timing`           | `false` writes 0 in the seconds column          | true    |
//!
//! Built-in datasets: `karate`, `barbell:<clique>:<bridge>` and
//! `random:<n>:<m>:<seed>` (random connected graph).

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::generators::{barbell, karate, random_connected};
use crate::graph::{load_edge_list, Graph, LoadReport, LoadedGraph, NodeSet};
use crate::greedy::{best_singleton, greedy_with_reference, GreedyOptions, DEFAULT_PRUNE_T};
use crate::heuristics::{
    degree_select, distance_select, ppr_select, spectral_c, spectral_d, spectral_embed, spectral_q,
    SpectralEmbedding,
};
use crate::walk::{exact_ac, CentralityProblem, DEFAULT_EPSILON};

pub const CSV_HEADER: &str = "dataset,algorithm,k,candidate_mode,ac,gain,seconds,seed";
pub const DEFAULT_GREEDY_MAX_NODES: usize = 20_000;
/// Attempts at drawing seeds whose balls hold enough nodes.
pub const QUERY_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Greedy,
    SpectralQ,
    SpectralC,
    SpectralD,
    Ppr,
    Degree,
    Distance,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Greedy,
        Algorithm::SpectralQ,
        Algorithm::SpectralC,
        Algorithm::SpectralD,
        Algorithm::Ppr,
        Algorithm::Degree,
        Algorithm::Distance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::SpectralQ => "spectral_q",
            Algorithm::SpectralC => "spectral_c",
            Algorithm::SpectralD => "spectral_d",
            Algorithm::Ppr => "ppr",
            Algorithm::Degree => "degree",
            Algorithm::Distance => "distance",
        }
    }

    pub fn is_spectral(self) -> bool {
        matches!(
            self,
            Algorithm::SpectralQ | Algorithm::SpectralC | Algorithm::SpectralD
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == key || (key == "spectralq" && *a == Algorithm::SpectralQ))
            .or(match key.as_str() {
                "spectralc" => Some(Algorithm::SpectralC),
                "spectrald" => Some(Algorithm::SpectralD),
                "pagerank" => Some(Algorithm::Ppr),
                _ => None,
            })
            .ok_or_else(|| Error::Argument(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateMode {
    /// D = V
    All,
    /// D = Q
    Query,
}

impl CandidateMode {
    pub fn name(self) -> &'static str {
        match self {
            CandidateMode::All => "all",
            CandidateMode::Query => "query",
        }
    }
}

impl FromStr for CandidateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" | "V" => Ok(CandidateMode::All),
            "query" | "Q" => Ok(CandidateMode::Query),
            other => Err(Error::Argument(format!(
                "candidate mode must be `all` or `query`, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub dataset: String,
    pub name: Option<String>,
    pub seeds: usize,
    pub radius: usize,
    pub query_count: usize,
    pub alpha: f64,
    pub candidates: CandidateMode,
    pub k_min: usize,
    pub k_max: usize,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub epsilon: f64,
    pub prune_t: Option<usize>,
    pub exact_first: bool,
    pub greedy_max_nodes: usize,
    /// `None` uses `d = k` for each budget.
    pub embedding_dim: Option<usize>,
    pub record_timing: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            dataset: "karate".into(),
            name: None,
            seeds: 2,
            radius: 2,
            query_count: 10,
            alpha: 0.15,
            candidates: CandidateMode::All,
            k_min: 1,
            k_max: 5,
            algorithms: Algorithm::ALL.to_vec(),
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            prune_t: Some(DEFAULT_PRUNE_T),
            exact_first: false,
            greedy_max_nodes: DEFAULT_GREEDY_MAX_NODES,
            embedding_dim: None,
            record_timing: true,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Argument(format!("invalid value {value:?} for `{key}`")))
}

/// Parses `3`, `1..5`, `1..=5` or `1-5` into an inclusive range.
pub fn parse_k_range(value: &str) -> Result<(usize, usize)> {
    let value = value.trim();
    let split = ["..=", "..", "-"]
        .iter()
        .find_map(|sep| value.split_once(sep));
    let (lo, hi) = match split {
        Some((a, b)) => (parse_value("k", a.trim())?, parse_value("k", b.trim())?),
        None => {
            let k = parse_value("k", value)?;
            (k, k)
        }
    };
    if lo == 0 || lo > hi {
        return Err(Error::Argument(format!("invalid k range {value:?}")));
    }
    Ok((lo, hi))
}

impl ExperimentSpec {
    /// Reads a `key = value` experiment file over the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = ExperimentSpec::default();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: index + 1,
                message: format!("expected `key = value`, found {line:?}"),
            })?;
            spec.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse {
                    line: index + 1,
                    message: e.to_string(),
                })?;
        }
        Ok(spec)
    }

    /// Sets one field by its file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dataset" => self.dataset = value.to_string(),
            "name" => self.name = Some(value.to_string()),
            "seeds" => self.seeds = parse_value(key, value)?,
            "radius" => self.radius = parse_value(key, value)?,
            "queries" => self.query_count = parse_value(key, value)?,
            "alpha" => self.alpha = parse_value(key, value)?,
            "candidates" => self.candidates = value.parse()?,
            "k" => (self.k_min, self.k_max) = parse_k_range(value)?,
            "algorithms" => {
                self.algorithms = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "seed" => self.seed = parse_value(key, value)?,
            "epsilon" => self.epsilon = parse_value(key, value)?,
            "prune_t" => {
                self.prune_t = match value {
                    "none" | "off" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "exact_first" => self.exact_first = parse_value(key, value)?,
            "greedy_max_nodes" => self.greedy_max_nodes = parse_value(key, value)?,
            "embedding_dim" => {
                self.embedding_dim = match value {
                    "k" | "auto" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "timing" => self.record_timing = parse_value(key, value)?,
            other => return Err(Error::Argument(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// The dataset name used in output rows.
    pub fn dataset_name(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        Path::new(&self.dataset)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(&self.dataset)
            .to_string()
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return Err(Error::Argument("need at least one seed node".into()));
        }
        if self.query_count < self.seeds {
            return Err(Error::Argument(format!(
                "query count {} is smaller than seed count {}",
                self.query_count, self.seeds
            )));
        }
        if self.radius == 0 {
            return Err(Error::Argument("ball radius must be at least 1".into()));
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(Error::Argument(format!(
                "invalid k range {}..{}",
                self.k_min, self.k_max
            )));
        }
        if self.candidates == CandidateMode::Query && self.k_max > self.query_count {
            return Err(Error::Argument(format!(
                "k = {} exceeds the {} query nodes that are the only candidates",
                self.k_max, self.query_count
            )));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::Argument(format!(
                "alpha = {} outside [0, 1)",
                self.alpha
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Argument("epsilon must be positive".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Argument("no algorithms selected".into()));
        }
        Ok(())
    }
}

/// Loads an edge-list file or a built-in dataset, keeping only the largest
/// connected component.
pub fn load_dataset(dataset: &str) -> Result<LoadedGraph> {
    let path = Path::new(dataset);
    let loaded = if path.is_file() {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Argument(format!("cannot open {dataset}: {e}")))?;
        load_edge_list(std::io::BufReader::new(file))?
    } else {
        builtin_dataset(dataset)?
    };
    if loaded.graph.is_connected() {
        return Ok(loaded);
    }
    let before = loaded.graph.node_count();
    let lcc = loaded.into_largest_component();
    log::warn!(
        "{dataset} is disconnected; keeping the largest component ({} of {before} nodes)",
        lcc.graph.node_count()
    );
    Ok(lcc)
}

fn builtin_dataset(name: &str) -> Result<LoadedGraph> {
    let numbered = |g: Graph| LoadedGraph {
        labels: (0..g.node_count()).map(|v| v.to_string()).collect(),
        graph: g,
        report: LoadReport::default(),
    };
    let parts: Vec<&str> = name.split(':').collect();
    let num = |s: &str| -> Result<u64> { parse_value(name, s) };
    match parts.as_slice() {
        ["karate"] => Ok(karate()),
        ["barbell", clique, bridge] => {
            let clique = num(clique)? as usize;
            if clique < 2 {
                return Err(Error::Argument(
                    "barbell cliques need at least 2 nodes".into(),
                ));
            }
            Ok(numbered(barbell(clique, num(bridge)? as usize)))
        }
        ["random", n, m, seed] => Ok(numbered(random_connected(
            num(n)? as usize,
            num(m)? as usize,
            num(seed)?,
        )?)),
        _ => Err(Error::Argument(format!(
            "{name:?} is neither a file nor a built-in dataset"
        ))),
    }
}

/// Picks `seeds` uniform ball centers, takes the union of their radius
/// balls and samples `size` query nodes uniformly from it. Redraws the
/// centers when the union is too small.
pub fn generate_queries(
    g: &Graph,
    seeds: usize,
    radius: usize,
    size: usize,
    seed: u64,
) -> Result<NodeSet> {
    let n = g.node_count();
    if seeds == 0 || seeds > n {
        return Err(Error::Argument(format!(
            "cannot draw {seeds} seeds from {n} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut union_size = 0;
    for _ in 0..QUERY_ATTEMPTS {
        let mut in_union = vec![false; n];
        for center in sample(&mut rng, n, seeds) {
            for v in g.ball(center, radius).iter() {
                in_union[v] = true;
            }
        }
        let union: Vec<usize> = (0..n).filter(|&v| in_union[v]).collect();
        union_size = union.len();
        if union_size >= size {
            return Ok(NodeSet::from_ids(
                sample(&mut rng, union_size, size)
                    .into_iter()
                    .map(|i| union[i]),
            ));
        }
    }
    Err(Error::QueryGeneration {
        union_size,
        required: size,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub k: usize,
    pub candidate_mode: CandidateMode,
    pub ac: f64,
    /// `None` when the best-singleton reference was not computed.
    pub gain: Option<f64>,
    pub seconds: f64,
    pub seed: u64,
    /// Selected node ids (not written to the CSV).
    pub chosen: NodeSet,
}

/// Everything one run produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub queries: NodeSet,
    pub rows: Vec<ResultRow>,
}

/// Runs every selected algorithm for every budget on `graph`. All sets are
/// scored with [`exact_ac`].
pub fn run_experiment(graph: &Graph, spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let n = graph.node_count();
    let dataset = spec.dataset_name();
    let queries = generate_queries(graph, spec.seeds, spec.radius, spec.query_count, spec.seed)?;
    let candidates = match spec.candidates {
        CandidateMode::All => NodeSet::all(n),
        CandidateMode::Query => queries.clone(),
    };
    if spec.k_max > candidates.len() {
        return Err(Error::Argument(format!(
            "k = {} exceeds the {} candidates",
            spec.k_max,
            candidates.len()
        )));
    }
    let base =
        CentralityProblem::uniform(graph, queries.clone(), candidates, spec.alpha, spec.k_max)?;

    let run_greedy = spec.algorithms.contains(&Algorithm::Greedy);
    let greedy_fits = n <= spec.greedy_max_nodes;
    if run_greedy && !greedy_fits {
        log::warn!(
            "skipping greedy: {n} nodes exceed the limit of {}",
            spec.greedy_max_nodes
        );
    }
    // Rescored exactly so that a row holding the best singleton has zero gain.
    let m_q = if greedy_fits {
        let node = best_singleton(&base)?.0;
        Some(exact_ac(&base, &NodeSet::from_ids([node]))?)
    } else {
        None
    };

    let embedding = if spec.algorithms.iter().any(|a| a.is_spectral()) {
        let d = spec.embedding_dim.unwrap_or(spec.k_max).min(n - 1);
        Some(spectral_embed(graph, d)?)
    } else {
        None
    };

    let timed = |elapsed: Duration| {
        if spec.record_timing {
            elapsed.as_secs_f64()
        } else {
            0.0
        }
    };
    let row = |algorithm, k, chosen: NodeSet, elapsed| -> Result<ResultRow> {
        let ac = exact_ac(&base, &chosen)?;
        Ok(ResultRow {
            dataset: dataset.clone(),
            algorithm,
            k,
            candidate_mode: spec.candidates,
            ac,
            gain: m_q.map(|m| m - ac),
            seconds: timed(elapsed),
            seed: spec.seed,
            chosen,
        })
    };

    let mut rows = Vec::new();
    if run_greedy && greedy_fits {
        let options = GreedyOptions {
            prune_t: spec.prune_t,
            exact_first: spec.exact_first,
        };
        let result = greedy_with_reference(&base, &options, m_q)?;
        for k in spec.k_min..=spec.k_max {
            let prefix = NodeSet::from_ids(result.chosen[..k].iter().copied());
            rows.push(row(
                Algorithm::Greedy,
                k,
                prefix,
                result.step_elapsed[k - 1],
            )?);
        }
    }

    let cells: Vec<(Algorithm, usize)> = spec
        .algorithms
        .iter()
        .filter(|&&a| a != Algorithm::Greedy)
        .flat_map(|&a| (spec.k_min..=spec.k_max).map(move |k| (a, k)))
        .collect();
    let heuristic_rows: Vec<ResultRow> = cells
        .par_iter()
        .map(|&(algorithm, k)| {
            let problem = base.with_k(k)?;
            let started = Instant::now();
            let chosen = select(algorithm, &problem, embedding.as_ref(), spec)?;
            let elapsed = started.elapsed();
            row(algorithm, k, chosen, elapsed)
        })
        .collect::<Result<_>>()?;
    rows.extend(heuristic_rows);
    rows.sort_by(|a, b| {
        (a.dataset.as_str(), a.algorithm.name(), a.k).cmp(&(
            b.dataset.as_str(),
            b.algorithm.name(),
            b.k,
        ))
    });
    Ok(ExperimentOutcome { queries, rows })
}

fn select(
    algorithm: Algorithm,
    problem: &CentralityProblem<'_>,
    embedding: Option<&SpectralEmbedding>,
    spec: &ExperimentSpec,
) -> Result<NodeSet> {
    let spectral = |f: fn(&CentralityProblem<'_>, &SpectralEmbedding, u64) -> Result<NodeSet>| {
        let full = embedding.expect("embedding computed for spectral algorithms");
        let d = spec
            .embedding_dim
            .unwrap_or(problem.k())
            .min(full.dimension());
        f(problem, &full.truncated(d)?, spec.seed)
    };
    match algorithm {
        Algorithm::Greedy => unreachable!("greedy runs once for all budgets"),
        Algorithm::SpectralQ => spectral(spectral_q),
        Algorithm::SpectralC => spectral(spectral_c),
        Algorithm::SpectralD => spectral(spectral_d),
        Algorithm::Ppr => ppr_select(problem),
        Algorithm::Degree => Ok(degree_select(problem)),
        Algorithm::Distance => Ok(distance_select(problem)),
    }
}

/// Formats like C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').unwrap();
    let exponent: i32 = exponent.parse().unwrap();
    if exponent < -5 || exponent >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exponent);
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with [`CSV_HEADER`], rows sorted by (dataset, algorithm, k) and
/// numbers at 9 significant digits.
pub fn emit_csv(rows: &[ResultRow]) -> String {
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        (a.dataset.as_str(), a.algorithm.name(), a.k).cmp(&(
            b.dataset.as_str(),
            b.algorithm.name(),
            b.k,
        ))
    });
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&r.dataset),
            r.algorithm,
            r.k,
            r.candidate_mode.name(),
            format_significant(r.ac, 9),
            r.gain.map(|g| format_significant(g, 9)).unwrap_or_default(),
            format_significant(r.seconds, 9),
            r.seed
        );
    }
    out
}
