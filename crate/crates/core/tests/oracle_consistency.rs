mod common;

use arw::exact_ac;
use arw::oracle::simulate;
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// 50 instance draws, each compared against its own 99% interval. Under a
/// correct simulator the number of misses is Binomial(50, 0.01); four or
/// more happen with probability 0.0016, so that is where the test rejects.
#[test]
fn simulator_is_consistent_with_exact_evaluator() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut misses = Vec::new();
    for draw in 0..50u64 {
        let case = Instance::random(&mut rng, 4..=25, ALPHAS[draw as usize % 3]);
        let problem = case.problem(1);
        let exact = exact_ac(&problem, &case.absorbing).unwrap();
        let stats = simulate(&problem, &case.absorbing, 20_000, draw).unwrap();
        assert!(stats.mean >= 0.0);
        assert!((stats.ci_half_width - 2.576 * stats.std_dev / (20_000f64).sqrt()).abs() < 1e-12);
        if (stats.mean - exact).abs() > stats.ci_half_width + 1e-9 {
            misses.push((draw, exact, stats.mean, stats.ci_half_width));
        }
    }
    assert!(
        misses.len() <= 3,
        "{} of 50 outside the 99% interval: {misses:?}",
        misses.len()
    );
}

#[test]
fn absorption_counts_cover_every_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let case = Instance::random(&mut rng, 20..=20, 0.15);
    let stats = simulate(&case.problem(1), &case.absorbing, 5_000, 9).unwrap();
    let total: u64 = stats.absorbed_at.iter().map(|&(_, c)| c).sum();
    assert_eq!(total, 5_000);
    assert!(stats
        .absorbed_at
        .iter()
        .all(|&(v, _)| case.absorbing.contains(v)));
}
