//! Fast selectors that do not evaluate the objective: spectral clustering
//! variants, personalized PageRank, degree and distance centrality.

pub mod kmeans;
pub mod spectral;

pub use kmeans::{kmeans, KMeansResult};
pub use spectral::{spectral_c, spectral_d, spectral_embed, spectral_q, SpectralEmbedding};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet, UNREACHABLE};
use crate::walk::CentralityProblem;

pub const PAGERANK_TOLERANCE: f64 = 1e-10;
pub const PAGERANK_MAX_ITERATIONS: usize = 10_000;

/// Personalized PageRank: the fixed point of
/// `pi = (1 - alpha) pi P + alpha s` with `P` the simple random walk.
/// Iterates from `s` until the L1 change is at most [`PAGERANK_TOLERANCE`].
///
/// Without restarts the iteration oscillates on bipartite graphs, so for
/// `alpha = 0` the fixed point `deg / 2m` of a connected graph is returned
/// directly.
pub fn pagerank_scores(g: &Graph, start: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let n = g.node_count();
    if alpha == 0.0 {
        if !g.is_connected() {
            return Err(Error::Validation(
                "PageRank without restarts needs a connected graph".into(),
            ));
        }
        let total = 2.0 * g.edge_count() as f64;
        return Ok((0..n).map(|v| g.degree(v) as f64 / total).collect());
    }
    let mut pi = start.to_vec();
    let mut next = vec![0.0; n];
    for _ in 0..PAGERANK_MAX_ITERATIONS {
        for (v, x) in next.iter_mut().enumerate() {
            *x = alpha * start[v];
        }
        for (u, &mass) in pi.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let share = (1.0 - alpha) * mass / g.degree(u) as f64;
            for &v in g.neighbors(u) {
                next[v] += share;
            }
        }
        let change: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if change <= PAGERANK_TOLERANCE {
            return Ok(pi);
        }
    }
    Err(Error::Numerical(format!(
        "personalized PageRank did not converge in {PAGERANK_MAX_ITERATIONS} iterations"
    )))
}

/// The `k` candidates with the highest personalized PageRank, using the
/// restart probability as teleport probability and `s` as personalization.
pub fn ppr_select(problem: &CentralityProblem<'_>) -> Result<NodeSet> {
    let scores = pagerank_scores(problem.graph(), problem.start(), problem.alpha())?;
    Ok(top_k(problem, |v| scores[v]))
}

/// The `k` highest-degree candidates.
pub fn degree_select(problem: &CentralityProblem<'_>) -> NodeSet {
    let g = problem.graph();
    top_k(problem, |v| g.degree(v) as f64)
}

/// Distance centrality `dc(u) = 1 / sum_{q in Q} d(u, q)`, infinite when
/// the sum is zero and zero when some query node is unreachable.
pub fn distance_centrality(g: &Graph, query: &NodeSet) -> Vec<f64> {
    let n = g.node_count();
    let mut totals = vec![0usize; n];
    let mut unreachable = vec![false; n];
    for q in query.iter() {
        for (v, d) in g.bfs_distances(q).into_iter().enumerate() {
            if d == UNREACHABLE {
                unreachable[v] = true;
            } else {
                totals[v] += d;
            }
        }
    }
    (0..n)
        .map(|v| match (unreachable[v], totals[v]) {
            (true, _) => 0.0,
            (false, 0) => f64::INFINITY,
            (false, t) => 1.0 / t as f64,
        })
        .collect()
}

/// The `k` candidates with the highest distance centrality.
pub fn distance_select(problem: &CentralityProblem<'_>) -> NodeSet {
    let dc = distance_centrality(problem.graph(), problem.query());
    top_k(problem, |v| dc[v])
}

/// Highest-scoring `k` candidates, ties by smallest id.
fn top_k(problem: &CentralityProblem<'_>, score: impl Fn(usize) -> f64) -> NodeSet {
    let mut ranked: Vec<(f64, usize)> =
        problem.candidates().iter().map(|v| (score(v), v)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    NodeSet::from_ids(ranked.into_iter().take(problem.k()).map(|(_, v)| v))
}
