//! Greedy selection for k-absorbing centrality.
//!
//! `ac_Q` is monotone decreasing and supermodular in the absorbing set, so
//! the gain `acg_Q(C) = m_Q - ac_Q(C)`, with `m_Q` the best singleton value
//! over the candidates, is monotone submodular and greedy maximization of it
//! carries the usual `1 - 1/e` guarantee.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fundamental::FundamentalState;
use crate::graph::NodeSet;
use crate::heuristics::pagerank_scores;
use crate::walk::{exact_ac, CentralityProblem};

/// Default size of the PageRank-pruned pool for the first pick.
pub const DEFAULT_PRUNE_T: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Evaluate only the `t` candidates with highest personalized PageRank
    /// for the first pick. `None` means no pruning.
    pub prune_t: Option<usize>,
    /// Evaluate every candidate for the first pick, ignoring `prune_t`.
    pub exact_first: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            prune_t: Some(DEFAULT_PRUNE_T),
            exact_first: false,
        }
    }
}

impl GreedyOptions {
    pub fn exact() -> Self {
        GreedyOptions {
            prune_t: None,
            exact_first: true,
        }
    }
}

/// Work counters for one greedy run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyStats {
    /// Candidate sets whose centrality was evaluated.
    pub evaluations: usize,
    /// Full matrix inversions.
    pub inversions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Selected nodes in pick order.
    pub chosen: Vec<usize>,
    pub ac: f64,
    pub gain: f64,
    /// `(node, ac after adding it)` for every step.
    pub per_step: Vec<(usize, f64)>,
    /// Time from the start until each step finished.
    pub step_elapsed: Vec<Duration>,
    pub elapsed: Duration,
    pub stats: GreedyStats,
}

impl SelectionResult {
    pub fn chosen_set(&self) -> NodeSet {
        NodeSet::from_ids(self.chosen.iter().copied())
    }
}

/// `acg_Q(C) = m_Q - ac_Q(C)`.
pub fn gain(problem: &CentralityProblem<'_>, absorbing: &NodeSet, m_q: f64) -> Result<f64> {
    Ok(m_q - exact_ac(problem, absorbing)?)
}

/// The candidate with the smallest singleton centrality and that value,
/// `m_Q`. One inversion, then one swap per further candidate.
pub fn best_singleton(problem: &CentralityProblem<'_>) -> Result<(usize, f64)> {
    let (node, value, _, _) = scan_singletons(problem, problem.candidates().as_slice())?;
    Ok((node, value))
}

/// Returns the best node of `pool` (ascending ids), its value, the state
/// positioned on it and the number of evaluations.
fn scan_singletons<'a, 'g>(
    problem: &'a CentralityProblem<'g>,
    pool: &[usize],
) -> Result<(usize, f64, FundamentalState<'a, 'g>, usize)> {
    let (&first, rest) = pool
        .split_first()
        .ok_or_else(|| Error::Argument("no candidates to scan".into()))?;
    let mut state = FundamentalState::new(problem, &NodeSet::from_ids([first]))?;
    let (mut best, mut best_value) = (first, state.ac());
    let mut current = first;
    for &u in rest {
        state.swap(current, u)?;
        current = u;
        if state.ac() < best_value {
            best = u;
            best_value = state.ac();
        }
    }
    if current != best {
        state.swap(current, best)?;
    }
    Ok((best, best_value, state, pool.len()))
}

/// Greedy selection of `problem.k()` candidates.
pub fn greedy(problem: &CentralityProblem<'_>, options: &GreedyOptions) -> Result<SelectionResult> {
    greedy_with_reference(problem, options, None)
}

/// Like [`greedy`], reusing a precomputed `m_Q` for the reported gain.
pub fn greedy_with_reference(
    problem: &CentralityProblem<'_>,
    options: &GreedyOptions,
    m_q: Option<f64>,
) -> Result<SelectionResult> {
    let started = Instant::now();
    let k = problem.k();
    let candidates = problem.candidates();
    if k > candidates.len() {
        return Err(Error::Argument(format!(
            "k = {k} exceeds the {} candidates",
            candidates.len()
        )));
    }

    let pool = first_pick_pool(problem, options)?;
    let exhaustive_first = pool.len() == candidates.len();
    let (first, first_value, mut state, mut evaluations) = scan_singletons(problem, &pool)?;
    let mut chosen = vec![first];
    let mut per_step = vec![(first, first_value)];
    let mut step_elapsed = vec![started.elapsed()];

    for _ in 1..k {
        let row_sums = state.transient_row_sums();
        let remaining: Vec<usize> = candidates
            .iter()
            .filter(|&u| !state.is_absorbing(u))
            .collect();
        let scores: Vec<f64> = remaining
            .par_iter()
            .map(|&u| state.score_extension(u, &row_sums))
            .collect();
        evaluations += remaining.len();
        let (mut best, mut best_value) = (remaining[0], scores[0]);
        for (&u, &value) in remaining.iter().zip(&scores).skip(1) {
            if value < best_value {
                best = u;
                best_value = value;
            }
        }
        state.extend(best)?;
        chosen.push(best);
        per_step.push((best, state.ac()));
        step_elapsed.push(started.elapsed());
    }

    let ac = state.ac();
    let mut inversions = state.diagnostics().inversions;
    let m_q = match m_q {
        Some(m) => m,
        None if exhaustive_first => first_value,
        None => {
            let scan = scan_singletons(problem, candidates.as_slice())?;
            inversions += scan.2.diagnostics().inversions;
            scan.1
        }
    };
    Ok(SelectionResult {
        chosen,
        ac,
        gain: m_q - ac,
        per_step,
        step_elapsed,
        elapsed: started.elapsed(),
        stats: GreedyStats {
            evaluations,
            inversions,
        },
    })
}

/// Candidates considered for the first pick, in ascending id order.
fn first_pick_pool(problem: &CentralityProblem<'_>, options: &GreedyOptions) -> Result<Vec<usize>> {
    let candidates = problem.candidates();
    let t = match options.prune_t {
        Some(t) if !options.exact_first && t < candidates.len() => t.max(1),
        _ => return Ok(candidates.as_slice().to_vec()),
    };
    let scores = first_pick_scores(problem)?;
    let mut ranked: Vec<usize> = candidates.as_slice().to_vec();
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    ranked.truncate(t);
    ranked.sort_unstable();
    Ok(ranked)
}

/// Personalized PageRank, or the degree-proportional stationary
/// distribution when there is no restart (power iteration need not
/// converge there).
fn first_pick_scores(problem: &CentralityProblem<'_>) -> Result<Vec<f64>> {
    pagerank_scores(problem.graph(), problem.start(), problem.alpha())
}
