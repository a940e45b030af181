//! Ground truth that shares no code path with the linear-algebra
//! evaluators: direct simulation of the walk and brute-force search.
//!
//! Sample `i` of a simulation with seed `seed` draws from a ChaCha8 stream
//! seeded with `seed` and stream number `i`, so results do not depend on how
//! samples are split across threads.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::NodeSet;
use crate::walk::{exact_ac, CentralityProblem};

/// Per-sample step cap.
pub const STEP_CAP: u64 = 10_000_000;
/// Default number of subsets [`exhaustive_opt`] may enumerate.
pub const DEFAULT_SUBSET_BUDGET: u128 = 1_000_000;
/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.576;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkStats {
    /// Samples that finished under the step cap.
    pub samples: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// `Z_99 * std_dev / sqrt(samples)`.
    pub ci_half_width: f64,
    /// `(absorbing node, walks absorbed there)`; walks that start inside the
    /// absorbing set count for their start node.
    pub absorbed_at: Vec<(usize, u64)>,
    /// Samples dropped for hitting [`STEP_CAP`].
    pub capped: usize,
}

struct Sampler<'a> {
    neighbors: Vec<&'a [usize]>,
    absorbing: Vec<bool>,
    /// Cumulative start distribution over `support`.
    cumulative: Vec<f64>,
    support: Vec<usize>,
    alpha: f64,
}

impl Sampler<'_> {
    fn draw_start(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cumulative.last().unwrap();
        let x = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= x);
        self.support[idx.min(self.support.len() - 1)]
    }

    /// Returns `(length, absorbing node)`, or `None` past the cap.
    fn walk(&self, rng: &mut ChaCha8Rng) -> Option<(u64, usize)> {
        let mut node = self.draw_start(rng);
        let mut steps = 0;
        while !self.absorbing[node] {
            if steps == STEP_CAP {
                return None;
            }
            node = if self.alpha > 0.0 && rng.random_bool(self.alpha) {
                self.draw_start(rng)
            } else {
                let nbrs = self.neighbors[node];
                nbrs[rng.random_range(0..nbrs.len())]
            };
            steps += 1;
        }
        Some((steps, node))
    }
}

#[derive(Default)]
struct Tally {
    count: u64,
    sum: u128,
    sum_sq: u128,
    capped: usize,
    absorbed: Vec<u64>,
}

/// Estimates `ac_Q(C)` by simulating `samples` walks.
pub fn simulate(
    problem: &CentralityProblem<'_>,
    absorbing: &NodeSet,
    samples: usize,
    seed: u64,
) -> Result<WalkStats> {
    if samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    if absorbing.is_empty() {
        return Err(Error::Argument("absorbing set is empty".into()));
    }
    let g = problem.graph();
    let n = g.node_count();
    if absorbing.as_slice().last().is_some_and(|&v| v >= n) {
        return Err(Error::Argument("absorbing node outside graph".into()));
    }
    let start = problem.start();
    let support: Vec<usize> = (0..n).filter(|&v| start[v] > 0.0).collect();
    let mut acc = 0.0;
    let cumulative = support
        .iter()
        .map(|&v| {
            acc += start[v];
            acc
        })
        .collect();
    let sampler = Sampler {
        neighbors: (0..n).map(|v| g.neighbors(v)).collect(),
        absorbing: absorbing.mask(n),
        cumulative,
        support,
        alpha: problem.alpha(),
    };

    let chunks = samples.div_ceil(CHUNK);
    let tallies: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut tally = Tally {
                absorbed: vec![0; n],
                ..Default::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(samples) {
                rng.set_stream(i as u64);
                rng.set_word_pos(0);
                match sampler.walk(&mut rng) {
                    Some((len, node)) => {
                        tally.count += 1;
                        tally.sum += len as u128;
                        tally.sum_sq += (len as u128) * (len as u128);
                        tally.absorbed[node] += 1;
                    }
                    None => tally.capped += 1,
                }
            }
            tally
        })
        .collect();

    let mut total = Tally {
        absorbed: vec![0; n],
        ..Default::default()
    };
    for t in tallies {
        total.count += t.count;
        total.sum += t.sum;
        total.sum_sq += t.sum_sq;
        total.capped += t.capped;
        for (a, b) in total.absorbed.iter_mut().zip(&t.absorbed) {
            *a += b;
        }
    }
    if total.capped > 0 {
        log::warn!(
            "{} of {samples} walks hit the {STEP_CAP}-step cap",
            total.capped
        );
    }
    if total.count == 0 {
        return Err(Error::Numerical(
            "every simulated walk hit the step cap".into(),
        ));
    }
    let count = total.count as f64;
    let mean = total.sum as f64 / count;
    let std_dev = if total.count > 1 {
        // Integer sums keep the variance exact up to the final division.
        let c = total.count as u128;
        let numerator = c * total.sum_sq - total.sum * total.sum;
        (numerator as f64 / (count * (count - 1.0))).sqrt()
    } else {
        0.0
    };
    Ok(WalkStats {
        samples: total.count as usize,
        mean,
        std_dev,
        ci_half_width: Z_99 * std_dev / count.sqrt(),
        absorbed_at: absorbing.iter().map(|v| (v, total.absorbed[v])).collect(),
        capped: total.capped,
    })
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The size-`k` subset of the candidates minimizing `ac_Q`, by enumeration.
/// Ties go to the lexicographically first subset.
pub fn exhaustive_opt(problem: &CentralityProblem<'_>, budget: u128) -> Result<(NodeSet, f64)> {
    let candidates = problem.candidates();
    let count = binomial(candidates.len(), problem.k());
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let subsets: Vec<Vec<usize>> = candidates.iter().combinations(problem.k()).collect();
    let values: Vec<f64> = subsets
        .par_iter()
        .map(|s| exact_ac(problem, &NodeSet::from_ids(s.iter().copied())))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    Ok((
        NodeSet::from_ids(subsets[best].iter().copied()),
        values[best],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{path, random_connected, star};
    use crate::graph::Graph;

    fn problem<'g>(g: &'g Graph, q: &[usize], alpha: f64, k: usize) -> CentralityProblem<'g> {
        CentralityProblem::uniform(
            g,
            NodeSet::from_ids(q.iter().copied()),
            NodeSet::all(g.node_count()),
            alpha,
            k,
        )
        .unwrap()
    }

    #[test]
    fn star_absorbs_in_one_step() {
        let g = star(9);
        let leaves: Vec<usize> = (1..9).collect();
        let p = problem(&g, &leaves, 0.0, 1);
        let stats = simulate(&p, &NodeSet::from_ids([0]), 5000, 1).unwrap();
        assert_eq!(stats.mean, 1.0);
        assert_eq!(stats.std_dev, 0.0);
        assert_eq!(stats.absorbed_at, vec![(0, 5000)]);
    }

    #[test]
    fn query_inside_absorbing_set() {
        let g = random_connected(10, 20, 0).unwrap();
        let p = problem(&g, &[2, 3], 0.15, 1);
        let stats = simulate(&p, &NodeSet::from_ids([2, 3, 7]), 1000, 5).unwrap();
        assert_eq!(stats.mean, 0.0);
        let at: u64 = stats
            .absorbed_at
            .iter()
            .filter(|(v, _)| *v != 7)
            .map(|(_, c)| c)
            .sum();
        assert_eq!(at, 1000);
    }

    #[test]
    fn path_mean_within_interval() {
        let g = path(3);
        let p = problem(&g, &[0], 0.0, 1);
        let stats = simulate(&p, &NodeSet::from_ids([2]), 1_000_000, 42).unwrap();
        assert!((stats.mean - 4.0).abs() <= stats.ci_half_width, "{stats:?}");
        assert!((stats.ci_half_width - Z_99 * stats.std_dev / 1000.0).abs() < 1e-15);
        // Walk lengths are even on this bipartite path.
        assert_eq!(stats.absorbed_at, vec![(2, 1_000_000)]);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = random_connected(20, 35, 3).unwrap();
        let p = problem(&g, &[0, 5, 9], 0.15, 1);
        let c = NodeSet::from_ids([12]);
        let a = simulate(&p, &c, 10_000, 77).unwrap();
        let b = simulate(&p, &c, 10_000, 77).unwrap();
        assert_eq!(a, b);
        let other = simulate(&p, &c, 10_000, 78).unwrap();
        assert_ne!(a.mean, other.mean);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let g = random_connected(20, 35, 4).unwrap();
        let p = problem(&g, &[1, 2], 0.3, 1);
        let c = NodeSet::from_ids([15, 16]);
        let reference = simulate(&p, &c, 20_000, 9).unwrap();
        for threads in [1, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let stats = pool.install(|| simulate(&p, &c, 20_000, 9).unwrap());
            assert_eq!(stats, reference);
        }
    }

    #[test]
    fn argument_checks() {
        let g = path(3);
        let p = problem(&g, &[0], 0.0, 1);
        assert!(simulate(&p, &NodeSet::from_ids([2]), 0, 0).is_err());
        assert!(simulate(&p, &NodeSet::default(), 10, 0).is_err());
    }

    #[test]
    fn exhaustive_on_path() {
        let g = path(3);
        let p = problem(&g, &[0, 2], 0.0, 1);
        let (best, value) = exhaustive_opt(&p, DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(best.as_slice(), &[1]);
        assert!((value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_forced_and_budget() {
        let g = random_connected(10, 18, 2).unwrap();
        let q = NodeSet::from_ids([0, 1, 2]);
        let d = NodeSet::from_ids([3, 6, 9]);
        let p = CentralityProblem::uniform(&g, q, d.clone(), 0.15, 3).unwrap();
        let (best, value) = exhaustive_opt(&p, DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(best, d);
        assert!((value - exact_ac(&p, &d).unwrap()).abs() < 1e-15);

        let p = problem(&g, &[0], 0.15, 5);
        assert_eq!(
            exhaustive_opt(&p, 100),
            Err(Error::BudgetExceeded {
                count: 252,
                budget: 100
            })
        );
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }
}
