//! Absorbing random walks with restarts.
//!
//! A walk starts at a query node drawn from the start distribution `s`. At
//! every step it restarts with probability `alpha` (jumping to a node drawn
//! from `s`) and otherwise moves to a uniformly random neighbor. It stops on
//! first entering the absorbing set `C`. For a transient node `i`:
//!
//! ```text
//! P(i, j) = alpha * s(j)                      j in Q, j not a neighbor of i
//! P(i, j) = (1 - alpha) / deg(i) + alpha * s(j)   j a neighbor of i
//! ```
//!
//! Absorbing rows are the identity and are never stored. The expected walk
//! length is `s^T (F 1)` with `F = (I - P_TT)^-1`, padded with zeros at the
//! absorbing coordinates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};

/// Absolute tolerance on the start distribution summing to one.
pub const START_SUM_TOLERANCE: f64 = 1e-12;
/// Default convergence threshold for [`approximate_ac`].
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Default iteration cap for [`approximate_ac`].
pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;

/// A full problem instance: graph, query nodes, candidates, start
/// distribution, restart probability and budget.
#[derive(Debug, Clone)]
pub struct CentralityProblem<'g> {
    graph: &'g Graph,
    query: NodeSet,
    candidates: NodeSet,
    start: Vec<f64>,
    alpha: f64,
    k: usize,
}

impl<'g> CentralityProblem<'g> {
    /// Instance with `s` uniform over `query`.
    pub fn uniform(
        graph: &'g Graph,
        query: NodeSet,
        candidates: NodeSet,
        alpha: f64,
        k: usize,
    ) -> Result<Self> {
        let mut start = vec![0.0; graph.node_count()];
        let weight = 1.0 / query.len().max(1) as f64;
        for q in query.iter() {
            if q < start.len() {
                start[q] = weight;
            }
        }
        Self::with_start(graph, query, candidates, start, alpha, k)
    }

    /// Instance with an explicit start distribution over all `n` nodes.
    pub fn with_start(
        graph: &'g Graph,
        query: NodeSet,
        candidates: NodeSet,
        start: Vec<f64>,
        alpha: f64,
        k: usize,
    ) -> Result<Self> {
        let n = graph.node_count();
        if query.is_empty() {
            return Err(Error::Argument("query set is empty".into()));
        }
        if candidates.is_empty() {
            return Err(Error::Argument("candidate set is empty".into()));
        }
        for set in [&query, &candidates] {
            if let Some(&bad) = set.as_slice().last().filter(|&&v| v >= n) {
                return Err(Error::Argument(format!(
                    "node {bad} outside graph (n = {n})"
                )));
            }
        }
        if k == 0 || k > candidates.len() {
            return Err(Error::Argument(format!(
                "budget k = {k} must lie in 1..={}",
                candidates.len()
            )));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Argument(format!("alpha = {alpha} outside [0, 1)")));
        }
        if start.len() != n {
            return Err(Error::Argument(format!(
                "start vector has length {}, expected {n}",
                start.len()
            )));
        }
        let mut total = 0.0;
        for (v, &p) in start.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Argument(format!(
                    "start probability of node {v} is {p}"
                )));
            }
            if p > 0.0 && !query.contains(v) {
                return Err(Error::Argument(format!(
                    "node {v} carries start mass but is not a query node"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > START_SUM_TOLERANCE {
            return Err(Error::Argument(format!(
                "start distribution sums to {total}"
            )));
        }
        if alpha == 0.0 && !graph.is_connected() {
            return Err(Error::Validation(
                "alpha = 0 requires a connected graph".into(),
            ));
        }
        Ok(CentralityProblem {
            graph,
            query,
            candidates,
            start,
            alpha,
            k,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn query(&self) -> &NodeSet {
        &self.query
    }

    pub fn candidates(&self) -> &NodeSet {
        &self.candidates
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Same instance with a different budget.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.candidates.len() {
            return Err(Error::Argument(format!(
                "budget k = {k} must lie in 1..={}",
                self.candidates.len()
            )));
        }
        Ok(CentralityProblem { k, ..self.clone() })
    }

    /// Same instance with a different candidate set.
    pub fn with_candidates(&self, candidates: NodeSet, k: usize) -> Result<Self> {
        Self::with_start(
            self.graph,
            self.query.clone(),
            candidates,
            self.start.clone(),
            self.alpha,
            k,
        )
    }

    /// The transition row of node `i` when it is transient, as sorted
    /// `(column, probability)` pairs. It does not depend on the absorbing set.
    pub fn walk_row(&self, i: usize) -> Vec<(usize, f64)> {
        let neighbors = self.graph.neighbors(i);
        let follow = (1.0 - self.alpha) / neighbors.len() as f64;
        let mut row = Vec::with_capacity(neighbors.len() + self.query.len());
        let (mut a, mut b) = (0, 0);
        let query = self.query.as_slice();
        while a < neighbors.len() || b < query.len() {
            let next_n = neighbors.get(a).copied().unwrap_or(usize::MAX);
            let next_q = query.get(b).copied().unwrap_or(usize::MAX);
            let j = next_n.min(next_q);
            let mut p = 0.0;
            if next_n == j {
                p += follow;
                a += 1;
            }
            if next_q == j {
                p += self.alpha * self.start[j];
                b += 1;
            }
            if p > 0.0 {
                row.push((j, p));
            }
        }
        row
    }

    /// Fails unless every transient node can reach `absorbing`, which is
    /// exactly when `I - P_TT` is invertible.
    pub fn check_absorbable(&self, absorbing: &NodeSet) -> Result<()> {
        self.check_absorbing(absorbing)?;
        let components = self.graph.components();
        let mut component_of = vec![0; self.node_count()];
        let mut has_absorber = vec![false; components.len()];
        for (c, members) in components.iter().enumerate() {
            for &v in members {
                component_of[v] = c;
                has_absorber[c] |= absorbing.contains(v);
            }
        }
        let restart_reaches = self.alpha > 0.0
            && self
                .query
                .iter()
                .any(|q| self.start[q] > 0.0 && has_absorber[component_of[q]]);
        if restart_reaches {
            return Ok(());
        }
        match (0..self.node_count()).find(|&v| !has_absorber[component_of[v]]) {
            None => Ok(()),
            Some(v) => Err(Error::Numerical(format!(
                "I - P_TT is singular for absorbing set {:?}: node {v} never reaches it",
                absorbing.as_slice()
            ))),
        }
    }

    fn check_absorbing(&self, absorbing: &NodeSet) -> Result<()> {
        if absorbing.is_empty() {
            return Err(Error::Argument("absorbing set is empty".into()));
        }
        if let Some(&bad) = absorbing
            .as_slice()
            .last()
            .filter(|&&v| v >= self.node_count())
        {
            return Err(Error::Argument(format!(
                "absorbing node {bad} outside graph (n = {})",
                self.node_count()
            )));
        }
        Ok(())
    }
}

/// The transient/absorbing block structure of the walk for a fixed
/// absorbing set. Transient nodes are ordered by increasing id.
#[derive(Debug, Clone)]
pub struct TransitionSystem {
    absorbing: NodeSet,
    transient: Vec<usize>,
    /// Node id -> transient index, `None` for absorbing nodes.
    transient_index: Vec<Option<usize>>,
    p_tt: DMatrix<f64>,
    p_tc: DMatrix<f64>,
}

impl TransitionSystem {
    pub fn absorbing(&self) -> &NodeSet {
        &self.absorbing
    }

    pub fn transient_order(&self) -> &[usize] {
        &self.transient
    }

    pub fn transient_index(&self, node: usize) -> Option<usize> {
        self.transient_index[node]
    }

    pub fn p_tt(&self) -> &DMatrix<f64> {
        &self.p_tt
    }

    pub fn p_tc(&self) -> &DMatrix<f64> {
        &self.p_tc
    }

    /// `s` restricted to the transient coordinates, in transient order.
    pub fn restrict(&self, start: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.transient.len(),
            self.transient.iter().map(|&v| start[v]),
        )
    }
}

/// Builds `P_TT` and `P_TC` for absorbing set `absorbing`.
pub fn build_transition(
    problem: &CentralityProblem<'_>,
    absorbing: &NodeSet,
) -> Result<TransitionSystem> {
    problem.check_absorbing(absorbing)?;
    let n = problem.node_count();
    let mut transient_index = vec![None; n];
    let mut absorbing_index = vec![None; n];
    let mut transient = Vec::with_capacity(n - absorbing.len());
    for v in 0..n {
        if absorbing.contains(v) {
            absorbing_index[v] = Some(absorbing.as_slice().binary_search(&v).unwrap());
        } else {
            transient_index[v] = Some(transient.len());
            transient.push(v);
        }
    }
    let mut p_tt = DMatrix::zeros(transient.len(), transient.len());
    let mut p_tc = DMatrix::zeros(transient.len(), absorbing.len());
    for (row, &i) in transient.iter().enumerate() {
        for (j, p) in problem.walk_row(i) {
            match transient_index[j] {
                Some(col) => p_tt[(row, col)] += p,
                None => p_tc[(row, absorbing_index[j].unwrap())] += p,
            }
        }
    }
    Ok(TransitionSystem {
        absorbing: absorbing.clone(),
        transient,
        transient_index,
        p_tt,
        p_tc,
    })
}

/// Expected absorption length `ac_Q(C)`, by solving `(I - P_TT) y = 1`.
pub fn exact_ac(problem: &CentralityProblem<'_>, absorbing: &NodeSet) -> Result<f64> {
    let lengths = absorption_lengths(problem, absorbing)?;
    Ok(problem
        .start()
        .iter()
        .zip(&lengths)
        .map(|(s, l)| s * l)
        .sum())
}

/// Expected absorption length from every node (zero at absorbing nodes).
pub fn absorption_lengths(
    problem: &CentralityProblem<'_>,
    absorbing: &NodeSet,
) -> Result<Vec<f64>> {
    problem.check_absorbable(absorbing)?;
    let ts = build_transition(problem, absorbing)?;
    let t = ts.transient.len();
    let mut lengths = vec![0.0; problem.node_count()];
    if t == 0 {
        return Ok(lengths);
    }
    let system = DMatrix::identity(t, t) - &ts.p_tt;
    let singular = || {
        Error::Numerical(format!(
            "I - P_TT is singular for absorbing set {:?}",
            absorbing.as_slice()
        ))
    };
    let y = system
        .lu()
        .solve(&DVector::from_element(t, 1.0))
        .ok_or_else(singular)?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(singular());
    }
    for (idx, &v) in ts.transient.iter().enumerate() {
        lengths[v] = y[idx];
    }
    Ok(lengths)
}

/// Result of the truncated power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEstimate {
    pub value: f64,
    /// The final term `x_l 1` that fell below the threshold.
    pub last_increment: f64,
    pub iterations: usize,
}

/// Sums `x_l 1` for `x_0 = s_T`, `x_{l+1} = x_l P_TT` until a term drops
/// below `epsilon`.
pub fn approximate_ac(
    ts: &TransitionSystem,
    start: &[f64],
    epsilon: f64,
    max_iterations: usize,
) -> Result<SeriesEstimate> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Argument(format!(
            "epsilon = {epsilon} must be positive"
        )));
    }
    let p_tt_t = ts.p_tt.transpose();
    let mut x = ts.restrict(start);
    let mut delta = x.sum();
    let mut value = delta;
    let mut iterations = 0;
    while delta >= epsilon {
        if iterations == max_iterations {
            return Err(Error::Divergence {
                iterations,
                last_increment: delta,
            });
        }
        x = &p_tt_t * x;
        delta = x.sum();
        value += delta;
        iterations += 1;
    }
    Ok(SeriesEstimate {
        value,
        last_increment: delta,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{path, random_connected, star};

    fn set(ids: &[usize]) -> NodeSet {
        NodeSet::from_ids(ids.iter().copied())
    }

    fn path_problem<'g>(g: &'g Graph, query: &[usize], alpha: f64) -> CentralityProblem<'g> {
        CentralityProblem::uniform(g, set(query), NodeSet::all(g.node_count()), alpha, 1).unwrap()
    }

    #[test]
    fn path_blocks_with_restart() {
        let g = path(3);
        let p = path_problem(&g, &[0], 0.15);
        let ts = build_transition(&p, &set(&[2])).unwrap();
        assert_eq!(ts.transient_order(), &[0, 1]);
        let expected_tt = [[0.15, 0.85], [0.575, 0.0]];
        for (r, row) in expected_tt.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                assert!((ts.p_tt()[(r, c)] - x).abs() < 1e-15);
            }
        }
        assert_eq!(ts.p_tc()[(0, 0)], 0.0);
        assert!((ts.p_tc()[(1, 0)] - 0.425).abs() < 1e-15);
    }

    #[test]
    fn path_blocks_without_restart() {
        let g = path(3);
        let p = path_problem(&g, &[0], 0.0);
        let ts = build_transition(&p, &set(&[2])).unwrap();
        assert_eq!(
            ts.p_tt().as_slice(),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]).as_slice()
        );
        assert_eq!(ts.p_tc().as_slice(), &[0.0, 0.5]);
    }

    #[test]
    fn single_transient_node() {
        let g = random_connected(9, 14, 1).unwrap();
        let p = path_problem(&g, &[0, 3], 0.3);
        let c = NodeSet::all(9).without(4);
        let ts = build_transition(&p, &c).unwrap();
        assert_eq!(ts.p_tt().shape(), (1, 1));
    }

    #[test]
    fn rows_are_stochastic() {
        for seed in 0..10 {
            let g = random_connected(25, 50, seed).unwrap();
            let p = path_problem(&g, &[1, 5, 7, 20], 0.15);
            let ts = build_transition(&p, &set(&[3, 5, 11])).unwrap();
            for r in 0..ts.p_tt().nrows() {
                let sum = ts.p_tt().row(r).sum() + ts.p_tc().row(r).sum();
                assert!((sum - 1.0).abs() <= 1e-12);
            }
            assert!(ts
                .p_tt()
                .iter()
                .chain(ts.p_tc().iter())
                .all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn empty_or_out_of_range_absorbing_rejected() {
        let g = path(3);
        let p = path_problem(&g, &[0], 0.0);
        assert!(matches!(
            build_transition(&p, &NodeSet::default()),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            build_transition(&p, &set(&[7])),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn exact_values_on_small_chains() {
        let g = path(3);
        let p = path_problem(&g, &[0], 0.0);
        assert!((exact_ac(&p, &set(&[2])).unwrap() - 4.0).abs() < 1e-12);

        let s = star(7);
        let leaves: Vec<usize> = (1..7).collect();
        let p = CentralityProblem::uniform(&s, set(&leaves), NodeSet::all(7), 0.0, 1).unwrap();
        assert!((exact_ac(&p, &set(&[0])).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(exact_ac(&p, &set(&[0, 1, 2, 3, 4, 5, 6])).unwrap(), 0.0);
        assert_eq!(exact_ac(&p, &set(&leaves)).unwrap(), 0.0);
    }

    #[test]
    fn series_matches_small_chains() {
        let g = path(3);
        let p = path_problem(&g, &[0], 0.0);
        let ts = build_transition(&p, &set(&[2])).unwrap();
        let est = approximate_ac(&ts, p.start(), 1e-9, DEFAULT_MAX_ITERATIONS).unwrap();
        assert!((est.value - 4.0).abs() < 1e-6);
        assert!(est.last_increment < 1e-9);

        let ts = build_transition(&p, &set(&[0])).unwrap();
        let est = approximate_ac(&ts, p.start(), 1e-3, DEFAULT_MAX_ITERATIONS).unwrap();
        assert_eq!((est.value, est.iterations), (0.0, 0));

        let s = star(5);
        let p =
            CentralityProblem::uniform(&s, set(&[1, 2, 3, 4]), NodeSet::all(5), 0.0, 1).unwrap();
        let ts = build_transition(&p, &set(&[0])).unwrap();
        let est = approximate_ac(&ts, p.start(), 1e-9, DEFAULT_MAX_ITERATIONS).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9);
        assert_eq!(est.iterations, 1);
    }

    #[test]
    fn series_reports_divergence_and_bad_epsilon() {
        let g = path(3);
        let p = path_problem(&g, &[0], 0.0);
        let ts = build_transition(&p, &set(&[2])).unwrap();
        assert!(matches!(
            approximate_ac(&ts, p.start(), 1e-12, 5),
            Err(Error::Divergence { iterations: 5, .. })
        ));
        assert!(approximate_ac(&ts, p.start(), 0.0, 5).is_err());
    }

    #[test]
    fn problem_validation() {
        let g = path(4);
        let all = NodeSet::all(4);
        assert!(CentralityProblem::uniform(&g, NodeSet::default(), all.clone(), 0.1, 1).is_err());
        assert!(CentralityProblem::uniform(&g, set(&[0]), all.clone(), 1.0, 1).is_err());
        assert!(CentralityProblem::uniform(&g, set(&[0]), all.clone(), 0.1, 5).is_err());
        assert!(CentralityProblem::uniform(&g, set(&[0]), all.clone(), 0.1, 0).is_err());
        let off_query = vec![0.5, 0.5, 0.0, 0.0];
        assert!(
            CentralityProblem::with_start(&g, set(&[0]), all.clone(), off_query, 0.1, 1).is_err()
        );
        let short = vec![0.9, 0.0, 0.0, 0.0];
        assert!(CentralityProblem::with_start(&g, set(&[0]), all.clone(), short, 0.1, 1).is_err());

        let split = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            CentralityProblem::uniform(&split, set(&[0]), NodeSet::all(4), 0.0, 1),
            Err(Error::Validation(_))
        ));
        assert!(CentralityProblem::uniform(&split, set(&[0]), NodeSet::all(4), 0.2, 1).is_ok());
    }

    #[test]
    fn unreachable_absorber_is_singular() {
        let split = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let p = CentralityProblem::uniform(&split, set(&[0]), NodeSet::all(4), 0.2, 1).unwrap();
        // Restarts land on 0, so walks from {0, 1} never reach 3.
        let err = exact_ac(&p, &set(&[3])).unwrap_err();
        assert!(matches!(err, Error::Numerical(ref m) if m.contains("[3]")));
    }
}
