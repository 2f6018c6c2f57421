use std::collections::HashMap;

use rlcomm::agent::{improve_modularity_policy, QTable, State};
use rlcomm::detectors::ActionSpace;
use rlcomm::seed;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square_p(counts: &HashMap<String, usize>, cells: usize, draws: usize) -> f64 {
    let expected = draws as f64 / cells as f64;
    let stat: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum::<f64>()
        + (cells - counts.len()) as f64 * expected;
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn full_exploration_is_uniform() {
    let space = ActionSpace::default();
    let mut rng = seed::rng(11);
    let mut q = QTable::new();
    let allowed = space.allowed_actions(100);
    q.set(State::INITIAL, allowed[3], 5.0);
    let mut counts = HashMap::new();
    for _ in 0..10_000 {
        let a = improve_modularity_policy(State::INITIAL, 0.0, 1.0, &q, &space, &allowed, &mut rng).unwrap();
        *counts.entry(space.encode(a)).or_insert(0) += 1;
    }
    let p = chi_square_p(&counts, allowed.len(), 10_000);
    assert!(p > 0.01, "chi-square p = {p}");
}

#[test]
fn full_exploration_is_uniform_over_masked_set() {
    let space = ActionSpace::new(Default::default(), 50).unwrap();
    let allowed = space.allowed_actions(100);
    assert_eq!(allowed.len(), space.len() - 7);
    let mut rng = seed::rng(12);
    let q = QTable::new();
    let mut counts = HashMap::new();
    for _ in 0..10_000 {
        let a = improve_modularity_policy(State::INITIAL, 0.0, 1.0, &q, &space, &allowed, &mut rng).unwrap();
        assert!(allowed.contains(&a));
        *counts.entry(space.encode(a)).or_insert(0) += 1;
    }
    assert!(chi_square_p(&counts, allowed.len(), 10_000) > 0.01);
}
