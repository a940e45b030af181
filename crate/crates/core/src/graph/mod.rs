//! Undirected simple graphs with dense node ids, plus the elementary
//! traversals (BFS distances, balls, connectivity) the rest of the crate
//! builds on.

pub mod generators;
mod io;

use std::collections::VecDeque;

pub use io::{load_edge_list, parse_edge_list, LoadReport, LoadedGraph};

use crate::error::{Error, Result};

/// Marker for nodes unreachable from a BFS source.
pub const UNREACHABLE: usize = usize::MAX;

/// Undirected simple graph over nodes `0..n`.
///
/// Every node has at least one neighbor; neighbor lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list, dropping self-loops and duplicate
    /// edges. Fails if any of the `n` nodes ends up isolated.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let (graph, _, _) = Self::from_edges_counted(n, edges)?;
        Ok(graph)
    }

    /// Like [`Graph::from_edges`], also returning how many duplicate edges
    /// and self-loops were dropped.
    pub(crate) fn from_edges_counted(
        n: usize,
        edges: &[(usize, usize)],
    ) -> Result<(Self, usize, usize)> {
        let mut adjacency = vec![Vec::new(); n];
        let mut self_loops = 0;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Argument(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut half_edges = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            half_edges += list.len();
        }
        let edge_count = half_edges / 2;
        let duplicates = edges.len() - self_loops - edge_count;
        if let Some(isolated) = adjacency.iter().position(Vec::is_empty) {
            return Err(Error::Validation(format!("node {isolated} is isolated")));
        }
        Ok((
            Graph {
                adjacency,
                edge_count,
            },
            duplicates,
            self_loops,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Iterates every edge once as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Hop distances from `source`; unreachable nodes hold [`UNREACHABLE`].
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        assert!(source < self.node_count(), "source {source} out of range");
        let mut dist = vec![UNREACHABLE; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &v in &self.adjacency[u] {
                if dist[v] == UNREACHABLE {
                    dist[v] = next;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All nodes within `radius` hops of `center`, center included.
    pub fn ball(&self, center: usize, radius: usize) -> NodeSet {
        let ids = self
            .bfs_distances(center)
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| d <= radius)
            .map(|(v, _)| v)
            .collect();
        NodeSet(ids)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || self.bfs_distances(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// Connected components, each as a sorted node list, ordered by their
    /// smallest node id.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut members = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < members.len() {
                let u = members[head];
                head += 1;
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        members.push(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// The largest connected component as a new graph, with the list mapping
    /// each new id back to its id in `self`. Ties go to the component with
    /// the smallest node id.
    pub fn largest_component(&self) -> (Graph, Vec<usize>) {
        let mut components = self.components();
        let mut best = 0;
        for (i, c) in components.iter().enumerate() {
            if c.len() > components[best].len() {
                best = i;
            }
        }
        let members = components.swap_remove(best);
        let mut new_id = vec![UNREACHABLE; self.node_count()];
        for (i, &v) in members.iter().enumerate() {
            new_id[v] = i;
        }
        let adjacency: Vec<Vec<usize>> = members
            .iter()
            .map(|&v| self.adjacency[v].iter().map(|&w| new_id[w]).collect())
            .collect();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        (
            Graph {
                adjacency,
                edge_count,
            },
            members,
        )
    }
}

/// Sorted, deduplicated set of node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    /// Sorts and deduplicates `ids`, checking every id is below `n`.
    pub fn new(ids: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let set = Self::from_ids(ids);
        if let Some(&bad) = set.0.last().filter(|&&last| last >= n) {
            return Err(Error::Argument(format!(
                "node {bad} is outside the graph (n = {n})"
            )));
        }
        Ok(set)
    }

    /// Sorts and deduplicates without a bound check.
    pub fn from_ids(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }

    pub fn all(n: usize) -> Self {
        NodeSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn with(&self, node: usize) -> NodeSet {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&node) {
            v.insert(pos, node);
        }
        NodeSet(v)
    }

    pub fn without(&self, node: usize) -> NodeSet {
        NodeSet(self.0.iter().copied().filter(|&v| v != node).collect())
    }

    /// Membership mask of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.0 {
            mask[v] = true;
        }
        mask
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
