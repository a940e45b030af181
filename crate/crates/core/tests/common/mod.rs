#![allow(dead_code)]

use arw::graph::generators::random_connected;
use arw::{CentralityProblem, Graph, NodeSet};
use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;

pub const ALPHAS: [f64; 3] = [0.0, 0.15, 0.5];

/// Connected graph with `n` drawn from `nodes` and between `n - 1` and
/// `3n` edges.
pub fn random_graph(rng: &mut impl Rng, nodes: std::ops::RangeInclusive<usize>) -> Graph {
    let n = rng.random_range(nodes);
    let max_edges = (n * (n - 1) / 2).min(3 * n);
    let m = rng.random_range(n - 1..=max_edges.max(n - 1));
    random_connected(n, m, rng.random()).unwrap()
}

/// Uniform random subset of `0..n` with a size drawn from `sizes`.
pub fn random_subset(
    rng: &mut impl Rng,
    n: usize,
    sizes: std::ops::RangeInclusive<usize>,
) -> NodeSet {
    let size = rng.random_range(sizes).clamp(1, n);
    NodeSet::from_ids(sample(rng, n, size))
}

pub struct Instance {
    pub graph: Graph,
    pub query: NodeSet,
    pub absorbing: NodeSet,
    pub alpha: f64,
}

impl Instance {
    /// A random instance with `|Q| <= n/3` and `|C| <= n/5`.
    pub fn random(rng: &mut impl Rng, nodes: std::ops::RangeInclusive<usize>, alpha: f64) -> Self {
        let graph = random_graph(rng, nodes);
        let n = graph.node_count();
        let query = random_subset(rng, n, 1..=(n / 3).max(1));
        let absorbing = random_subset(rng, n, 1..=(n / 5).max(1));
        Instance {
            graph,
            query,
            absorbing,
            alpha,
        }
    }

    pub fn problem(&self, k: usize) -> CentralityProblem<'_> {
        let n = self.graph.node_count();
        CentralityProblem::uniform(
            &self.graph,
            self.query.clone(),
            NodeSet::all(n),
            self.alpha,
            k,
        )
        .unwrap()
    }
}

/// `(I - P_TT)^-1` built entry by entry from the walk definition, with
/// transient nodes in ascending order.
pub fn direct_fundamental(problem: &CentralityProblem<'_>, absorbing: &NodeSet) -> DMatrix<f64> {
    let g = problem.graph();
    let n = g.node_count();
    let transient: Vec<usize> = (0..n).filter(|&v| !absorbing.contains(v)).collect();
    let index = |v: usize| transient.binary_search(&v).ok();
    let s = problem.start();
    let alpha = problem.alpha();
    let mut a = DMatrix::<f64>::identity(transient.len(), transient.len());
    for (r, &i) in transient.iter().enumerate() {
        for (j, &sj) in s.iter().enumerate() {
            let mut p = alpha * sj;
            if g.has_edge(i, j) {
                p += (1.0 - alpha) / g.degree(i) as f64;
            }
            if let Some(c) = index(j) {
                a[(r, c)] -= p;
            }
        }
    }
    a.try_inverse().expect("I - P_TT is invertible")
}

/// `s_T F 1` from a fundamental matrix over ascending transient nodes.
pub fn centrality_from(
    problem: &CentralityProblem<'_>,
    absorbing: &NodeSet,
    f: &DMatrix<f64>,
) -> f64 {
    let s = problem.start();
    let transient: Vec<usize> = (0..problem.node_count())
        .filter(|&v| !absorbing.contains(v))
        .collect();
    transient
        .iter()
        .enumerate()
        .map(|(r, &i)| s[i] * f.row(r).sum())
        .sum()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Adds, for every uncovered edge, the endpoint of higher remaining degree.
pub fn greedy_vertex_cover(g: &Graph) -> NodeSet {
    let n = g.node_count();
    let mut covered = vec![false; n];
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.sort_by_key(|&(u, v)| std::cmp::Reverse(g.degree(u).max(g.degree(v))));
    for (u, v) in edges {
        if !covered[u] && !covered[v] {
            let pick = if g.degree(u) >= g.degree(v) { u } else { v };
            covered[pick] = true;
        }
    }
    NodeSet::from_ids((0..n).filter(|&v| covered[v]))
}

pub fn is_vertex_cover(g: &Graph, c: &NodeSet) -> bool {
    g.edges().all(|(u, v)| c.contains(u) || c.contains(v))
}
