//! Incremental maintenance of the fundamental matrix.
//!
//! The state keeps `M = A^-1` for the full `n x n` matrix `A = I - P~`,
//! where `P~` holds the walk row of every transient node and a zero row for
//! every absorbing node. Reordered transient-first,
//!
//! ```text
//! A = | I - P_TT   -P_TC |        A^-1 = | F   F P_TC |
//!     |    0         I   |               | 0     I    |
//! ```
//!
//! so the transient block of `M` is exactly `F = (I - P_TT)^-1`. Making a
//! transient node `u` absorbing replaces row `u` of `A` by `e_u`, i.e. adds
//! `e_u p_u^T` where `p_u` is the walk row of `u`. Releasing an absorbing
//! node `v` subtracts `e_v p_v^T`. Both are rank-one updates handled with
//! the Sherman-Morrison formula
//!
//! ```text
//! (A + a b^T)^-1 = M - (M a)(b^T M) / (1 + b^T M a)
//! ```
//!
//! in `O(n^2)`. When adding `u` the denominator equals `F(u, u) >= 1`; when
//! releasing `v` it equals the probability that a walk leaving `v` is
//! absorbed somewhere other than `v`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::NodeSet;
use crate::walk::CentralityProblem;

/// Rank-one updates applied before the inverse is recomputed from scratch.
pub const REFRESH_PERIOD: usize = 64;
/// Sherman-Morrison denominators below this magnitude trigger a fresh
/// inversion instead of the update.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Counters describing how a state was maintained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StateDiagnostics {
    /// Full `O(n^3)` inversions, including the initial one.
    pub inversions: usize,
    /// Rank-one updates applied.
    pub rank_one_updates: usize,
    /// Periodic refreshes.
    pub refreshes: usize,
    /// Updates abandoned because the denominator was too small.
    pub fallbacks: usize,
}

/// Fundamental matrix for one absorbing set, with its cached centrality.
#[derive(Debug, Clone)]
pub struct FundamentalState<'a, 'g> {
    problem: &'a CentralityProblem<'g>,
    inverse: DMatrix<f64>,
    absorbing: Vec<bool>,
    ac: f64,
    since_refresh: usize,
    diagnostics: StateDiagnostics,
}

impl<'a, 'g> FundamentalState<'a, 'g> {
    /// Inverts `I - P~` from scratch for `absorbing`.
    pub fn new(problem: &'a CentralityProblem<'g>, absorbing: &NodeSet) -> Result<Self> {
        problem.check_absorbable(absorbing)?;
        let mask = absorbing.mask(problem.node_count());
        let inverse = invert(problem, &mask)?;
        let mut state = FundamentalState {
            problem,
            inverse,
            absorbing: mask,
            ac: 0.0,
            since_refresh: 0,
            diagnostics: StateDiagnostics {
                inversions: 1,
                ..Default::default()
            },
        };
        state.ac = state.centrality_from_inverse();
        Ok(state)
    }

    pub fn problem(&self) -> &'a CentralityProblem<'g> {
        self.problem
    }

    /// Cached `ac_Q(C)`.
    pub fn ac(&self) -> f64 {
        self.ac
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        self.diagnostics
    }

    pub fn is_absorbing(&self, node: usize) -> bool {
        self.absorbing[node]
    }

    pub fn absorbing(&self) -> NodeSet {
        NodeSet::from_ids(self.absorbing_iter())
    }

    fn absorbing_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.absorbing
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(v, _)| v)
    }

    /// Transient nodes in increasing id order.
    pub fn transient_order(&self) -> Vec<usize> {
        (0..self.absorbing.len())
            .filter(|&v| !self.absorbing[v])
            .collect()
    }

    /// The `|T| x |T|` fundamental matrix `F`, in [`Self::transient_order`].
    pub fn fundamental(&self) -> DMatrix<f64> {
        let order = self.transient_order();
        DMatrix::from_fn(order.len(), order.len(), |r, c| {
            self.inverse[(order[r], order[c])]
        })
    }

    /// Frobenius norm of `F (I - P_TT) - I`.
    pub fn residual(&self) -> f64 {
        let order = self.transient_order();
        let t = order.len();
        let mut position = vec![None; self.absorbing.len()];
        for (idx, &v) in order.iter().enumerate() {
            position[v] = Some(idx);
        }
        let mut system = DMatrix::<f64>::identity(t, t);
        for (r, &i) in order.iter().enumerate() {
            for (j, p) in self.problem.walk_row(i) {
                if let Some(c) = position[j] {
                    system[(r, c)] -= p;
                }
            }
        }
        (self.fundamental() * system - DMatrix::identity(t, t)).norm()
    }

    /// Makes transient node `u` absorbing.
    pub fn extend(&mut self, u: usize) -> Result<()> {
        self.require_transient(u)?;
        let row = self.problem.walk_row(u);
        self.absorbing[u] = true;
        if !self.rank_one(u, &row, 1.0) {
            self.fallback()?;
        }
        self.after_update()
    }

    /// Replaces absorbing node `v` by transient node `u`: first adds `u`,
    /// then releases `v`, each as one rank-one update.
    pub fn swap(&mut self, v: usize, u: usize) -> Result<()> {
        if u == v {
            return Err(Error::Argument(format!("cannot swap node {v} with itself")));
        }
        if !self.absorbing.get(v).copied().unwrap_or(false) {
            return Err(Error::Argument(format!("node {v} is not absorbing")));
        }
        self.require_transient(u)?;
        let row_u = self.problem.walk_row(u);
        let row_v = self.problem.walk_row(v);
        self.absorbing[u] = true;
        let added = self.rank_one(u, &row_u, 1.0);
        self.absorbing[v] = false;
        if !(added && self.rank_one(v, &row_v, -1.0)) {
            self.fallback()?;
        }
        self.after_update()
    }

    /// `ac_Q(C + u)` from the current state without mutating it.
    ///
    /// `row_sums[i]` must hold `sum_{j in T} M(i, j)` (see
    /// [`Self::transient_row_sums`]). Projecting the Sherman-Morrison update
    /// onto `s` and `1` costs `O(|Q| + deg(u))`.
    pub fn score_extension(&self, u: usize, row_sums: &[f64]) -> f64 {
        debug_assert!(!self.absorbing[u]);
        let m = &self.inverse;
        let mut denom = 1.0;
        // Sum over the new transient set T - u of the updated row b^T M.
        let mut beta = 0.0;
        for (l, p) in self.problem.walk_row(u) {
            denom += p * m[(l, u)];
            beta += p * (row_sums[l] - m[(l, u)]);
        }
        let start = self.problem.start();
        let mut total = 0.0;
        for i in self.problem.query().iter() {
            if i == u || self.absorbing[i] || start[i] == 0.0 {
                continue;
            }
            total += start[i] * ((row_sums[i] - m[(i, u)]) - m[(i, u)] * beta / denom);
        }
        total
    }

    /// `sum_{j in T} M(i, j)` for every node `i`.
    pub fn transient_row_sums(&self) -> Vec<f64> {
        let transient = self.transient_order();
        let m = &self.inverse;
        (0..m.nrows())
            .map(|i| transient.iter().map(|&j| m[(i, j)]).sum())
            .collect()
    }

    /// Recomputes the inverse from scratch.
    pub fn refresh(&mut self) -> Result<()> {
        self.inverse = invert(self.problem, &self.absorbing)?;
        self.diagnostics.inversions += 1;
        self.since_refresh = 0;
        self.ac = self.centrality_from_inverse();
        Ok(())
    }

    fn require_transient(&self, u: usize) -> Result<()> {
        match self.absorbing.get(u) {
            Some(false) => Ok(()),
            Some(true) => Err(Error::Argument(format!("node {u} is already absorbing"))),
            None => Err(Error::Argument(format!("node {u} outside graph"))),
        }
    }

    /// Applies `A += sign * e_node row^T`. Returns false, leaving the
    /// inverse untouched, if the denominator is too small.
    fn rank_one(&mut self, node: usize, row: &[(usize, f64)], sign: f64) -> bool {
        let n = self.inverse.nrows();
        let column: DVector<f64> = self.inverse.column(node).into_owned();
        let mut row_times_m = DVector::<f64>::zeros(n);
        let mut denom = 1.0;
        for &(l, p) in row {
            let weight = sign * p;
            denom += weight * column[l];
            row_times_m.axpy(weight, &self.inverse.row(l).transpose(), 1.0);
        }
        if denom.abs() <= DENOMINATOR_FLOOR || !denom.is_finite() {
            return false;
        }
        self.inverse.ger(-1.0 / denom, &column, &row_times_m, 1.0);
        self.diagnostics.rank_one_updates += 1;
        self.since_refresh += 1;
        true
    }

    fn fallback(&mut self) -> Result<()> {
        log::debug!("rank-one denominator below floor, inverting from scratch");
        self.diagnostics.fallbacks += 1;
        self.refresh()
    }

    fn after_update(&mut self) -> Result<()> {
        if self.since_refresh >= REFRESH_PERIOD {
            self.diagnostics.refreshes += 1;
            return self.refresh();
        }
        self.ac = self.centrality_from_inverse();
        Ok(())
    }

    fn centrality_from_inverse(&self) -> f64 {
        let start = self.problem.start();
        let transient = self.transient_order();
        self.problem
            .query()
            .iter()
            .filter(|&i| !self.absorbing[i] && start[i] > 0.0)
            .map(|i| start[i] * transient.iter().map(|&j| self.inverse[(i, j)]).sum::<f64>())
            .sum()
    }
}

fn invert(problem: &CentralityProblem<'_>, absorbing: &[bool]) -> Result<DMatrix<f64>> {
    let n = problem.node_count();
    let mut a = DMatrix::<f64>::identity(n, n);
    for i in (0..n).filter(|&i| !absorbing[i]) {
        for (j, p) in problem.walk_row(i) {
            a[(i, j)] -= p;
        }
    }
    let inverse = a.lu().try_inverse().ok_or_else(|| {
        let set: Vec<usize> = (0..n).filter(|&v| absorbing[v]).collect();
        Error::Numerical(format!("I - P_TT is singular for absorbing set {set:?}"))
    })?;
    if inverse.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical(
            "fundamental matrix has non-finite entries".into(),
        ));
    }
    Ok(inverse)
}
