//! Small deterministic graph families used as fixtures and test instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{io::parse_edge_list, Graph, LoadedGraph};
use crate::error::{Error, Result};

const KARATE: &str = include_str!("../../data/karate.txt");

/// Zachary's karate club (34 nodes, 78 edges), labels `1..=34`.
pub fn karate() -> LoadedGraph {
    parse_edge_list(KARATE).expect("bundled karate edge list is valid")
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    assert!(n >= 2);
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Cycle over `n >= 3` nodes.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Star with center `0` and leaves `1..n`.
pub fn star(n: usize) -> Graph {
    assert!(n >= 2);
    let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn complete(n: usize) -> Graph {
    assert!(n >= 2);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Two cliques of `clique` nodes joined by a path with `bridge` interior
/// nodes. The first clique is `0..clique`, the second is the last `clique`
/// ids; the path runs from node `clique - 1` to node `clique + bridge`.
pub fn barbell(clique: usize, bridge: usize) -> Graph {
    assert!(clique >= 2);
    let n = 2 * clique + bridge;
    let mut edges = Vec::new();
    let second = clique + bridge;
    for u in 0..clique {
        for v in u + 1..clique {
            edges.push((u, v));
            edges.push((second + u, second + v));
        }
    }
    let mut prev = clique - 1;
    for next in clique..=second {
        edges.push((prev, next));
        prev = next;
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Uniformly shuffled random spanning tree plus uniformly random extra
/// edges, for a connected graph with exactly `m` edges.
pub fn random_connected(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let max_edges = n * n.saturating_sub(1) / 2;
    if n < 2 || m < n - 1 || m > max_edges {
        return Err(Error::Argument(format!(
            "cannot build a connected simple graph with n = {n}, m = {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut adjacency = vec![vec![false; n]; n];
    let mut edges = Vec::with_capacity(m);
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        let child = order[i];
        adjacency[parent][child] = true;
        adjacency[child][parent] = true;
        edges.push((parent, child));
    }
    if m > max_edges / 2 {
        // Dense: enumerate the complement and sample from it.
        let mut missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !adjacency[u][v])
            .collect();
        missing.shuffle(&mut rng);
        edges.extend(missing.into_iter().take(m - (n - 1)));
    } else {
        while edges.len() < m {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v && !adjacency[u][v] {
                adjacency[u][v] = true;
                adjacency[v][u] = true;
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}
