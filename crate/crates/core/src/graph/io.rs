use std::collections::HashMap;
use std::io::BufRead;

use super::Graph;
use crate::error::{Error, Result};

/// What was dropped while loading an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

/// A graph together with the original node labels, indexed by dense id.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
    pub report: LoadReport,
}

impl LoadedGraph {
    pub fn id_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    /// Restricts to the largest connected component, keeping labels.
    pub fn into_largest_component(self) -> LoadedGraph {
        let (graph, members) = self.graph.largest_component();
        let labels = members.iter().map(|&v| self.labels[v].clone()).collect();
        LoadedGraph {
            graph,
            labels,
            report: self.report,
        }
    }
}

/// Reads a whitespace-separated edge list. Lines starting with `#` and
/// blank lines are skipped. Labels are arbitrary tokens, mapped to dense ids
/// in order of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();

    for (index, line) in reader.split(b'\n').enumerate() {
        let line_no = index + 1;
        let bytes = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::Parse {
            line: line_no,
            message: "invalid UTF-8".into(),
        })?;
        let text = text.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut tokens = text.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two node labels, found {text:?}"),
            });
        };
        let mut intern = |label: &str| -> usize {
            if let Some(&id) = ids.get(label) {
                return id;
            }
            let id = labels.len();
            labels.push(label.to_string());
            ids.insert(label.to_string(), id);
            id
        };
        let u = intern(a);
        let v = intern(b);
        edges.push((u, v));
    }

    let mut touched = vec![false; labels.len()];
    for &(u, v) in edges.iter().filter(|(u, v)| u != v) {
        touched[u] = true;
        touched[v] = true;
    }
    if let Some(isolated) = touched.iter().position(|&t| !t) {
        return Err(Error::Validation(format!(
            "node {:?} is isolated",
            labels[isolated]
        )));
    }
    let (graph, duplicate_edges, self_loops) = Graph::from_edges_counted(labels.len(), &edges)?;
    if duplicate_edges + self_loops > 0 {
        log::info!("dropped {duplicate_edges} duplicate edges and {self_loops} self-loops");
    }
    Ok(LoadedGraph {
        graph,
        labels,
        report: LoadReport {
            duplicate_edges,
            self_loops,
        },
    })
}

pub fn parse_edge_list(text: &str) -> Result<LoadedGraph> {
    load_edge_list(text.as_bytes())
}
