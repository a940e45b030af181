//! Spectral embedding from the random-walk Laplacian and the three
//! k-means based selectors built on it.

use nalgebra::{DMatrix, SymmetricEigen};

use super::kmeans::{apportion, kmeans, squared_distance};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::walk::CentralityProblem;

/// Rows are node coordinates; columns are right eigenvectors of
/// `L = I - D^-1 A` for the eigenvalues `lambda_2 <= ... <= lambda_{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    coordinates: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl SpectralEmbedding {
    pub fn dimension(&self) -> usize {
        self.coordinates.ncols()
    }

    pub fn coordinates(&self) -> &DMatrix<f64> {
        &self.coordinates
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn point(&self, node: usize) -> Vec<f64> {
        self.coordinates.row(node).iter().copied().collect()
    }

    /// The embedding restricted to its first `d` coordinates.
    pub fn truncated(&self, d: usize) -> Result<SpectralEmbedding> {
        if d == 0 || d > self.dimension() {
            return Err(Error::Argument(format!(
                "cannot truncate a {}-dimensional embedding to {d}",
                self.dimension()
            )));
        }
        Ok(SpectralEmbedding {
            coordinates: self.coordinates.columns(0, d).into_owned(),
            eigenvalues: self.eigenvalues[..d].to_vec(),
        })
    }
}

/// Embeds `g` into `d` dimensions.
///
/// Solves the symmetric problem for `I - D^-1/2 A D^-1/2` and maps each
/// eigenvector `v` to `D^-1/2 v`, a right eigenvector of `I - D^-1 A` with
/// the same eigenvalue. Signs are fixed so the largest-magnitude entry of
/// every column is positive.
pub fn spectral_embed(g: &Graph, d: usize) -> Result<SpectralEmbedding> {
    let n = g.node_count();
    if d == 0 || d >= n {
        return Err(Error::Argument(format!(
            "embedding dimension {d} must lie in 1..={}",
            n.saturating_sub(1)
        )));
    }
    if !g.is_connected() {
        return Err(Error::Validation(
            "spectral embedding needs a connected graph".into(),
        ));
    }
    let inv_sqrt: Vec<f64> = (0..n).map(|v| 1.0 / (g.degree(v) as f64).sqrt()).collect();
    let mut laplacian = DMatrix::<f64>::identity(n, n);
    for (u, v) in g.edges() {
        let w = inv_sqrt[u] * inv_sqrt[v];
        laplacian[(u, v)] -= w;
        laplacian[(v, u)] -= w;
    }
    let eigen = SymmetricEigen::new(laplacian);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .total_cmp(&eigen.eigenvalues[b])
            .then(a.cmp(&b))
    });

    let mut coordinates = DMatrix::zeros(n, d);
    let mut eigenvalues = Vec::with_capacity(d);
    for (col, &idx) in order[1..=d].iter().enumerate() {
        eigenvalues.push(eigen.eigenvalues[idx]);
        let v = eigen.eigenvectors.column(idx);
        let mut pivot = 0;
        for r in 0..n {
            if (v[r] * inv_sqrt[r]).abs() > (v[pivot] * inv_sqrt[pivot]).abs() + 1e-12 {
                pivot = r;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            coordinates[(r, col)] = sign * v[r] * inv_sqrt[r];
        }
    }
    Ok(SpectralEmbedding {
        coordinates,
        eigenvalues,
    })
}

/// Clusters the query embeddings, allots seats to clusters by size and
/// picks the candidates nearest each centroid.
pub fn spectral_q(
    problem: &CentralityProblem<'_>,
    embedding: &SpectralEmbedding,
    seed: u64,
) -> Result<NodeSet> {
    proportional_select(problem, embedding, problem.query(), seed)
}

/// As [`spectral_q`], clustering the candidate embeddings instead.
pub fn spectral_c(
    problem: &CentralityProblem<'_>,
    embedding: &SpectralEmbedding,
    seed: u64,
) -> Result<NodeSet> {
    proportional_select(problem, embedding, problem.candidates(), seed)
}

/// Clusters the query embeddings and picks the `k` candidates closest to
/// any centroid, regardless of cluster sizes.
pub fn spectral_d(
    problem: &CentralityProblem<'_>,
    embedding: &SpectralEmbedding,
    seed: u64,
) -> Result<NodeSet> {
    let k = problem.k();
    let clustering = cluster(embedding, problem.query(), k, seed)?;
    let mut scored: Vec<(f64, usize)> = problem
        .candidates()
        .iter()
        .map(|v| {
            let p = embedding.point(v);
            let d = clustering
                .centroids
                .iter()
                .map(|c| squared_distance(&p, c))
                .fold(f64::INFINITY, f64::min);
            (d, v)
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(NodeSet::from_ids(
        scored.into_iter().take(k).map(|(_, v)| v),
    ))
}

/// k-means over the embeddings of `nodes`, with at most `|nodes|` clusters.
fn cluster(
    embedding: &SpectralEmbedding,
    nodes: &NodeSet,
    k: usize,
    seed: u64,
) -> Result<super::kmeans::KMeansResult> {
    let points: Vec<Vec<f64>> = nodes.iter().map(|v| embedding.point(v)).collect();
    kmeans(&points, k.min(points.len()), seed)
}

fn proportional_select(
    problem: &CentralityProblem<'_>,
    embedding: &SpectralEmbedding,
    clustered: &NodeSet,
    seed: u64,
) -> Result<NodeSet> {
    let k = problem.k();
    let clustering = cluster(embedding, clustered, k, seed)?;
    let seats = apportion(&clustering.sizes, k);
    let candidates: Vec<(usize, Vec<f64>)> = problem
        .candidates()
        .iter()
        .map(|v| (v, embedding.point(v)))
        .collect();
    let mut taken = vec![false; candidates.len()];
    let mut picked = Vec::with_capacity(k);
    for (centroid, &count) in clustering.centroids.iter().zip(&seats) {
        let mut ranked: Vec<(f64, usize)> = candidates
            .iter()
            .enumerate()
            .filter(|&(i, _)| !taken[i])
            .map(|(i, (_, p))| (squared_distance(p, centroid), i))
            .collect();
        ranked.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(candidates[a.1].0.cmp(&candidates[b.1].0))
        });
        for &(_, i) in ranked.iter().take(count) {
            taken[i] = true;
            picked.push(candidates[i].0);
        }
    }
    Ok(NodeSet::from_ids(picked))
}
