use proptest::prelude::*;
use reactive_chain::kitchen;
use reactive_chain::logic::LogicalState;
use reactive_chain::perception::{filtered_error, observe, EstimatorWindow, NoiseModel, Pipeline};
use reactive_chain::rng::{stream, Stream};

/// Probability that at least `k` of `n` independent flips happen.
fn binomial_tail(n: u32, k: u32, p: f64) -> f64 {
    let choose = |n: u32, r: u32| (0..r).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1));
    (k..=n)
        .map(|j| choose(n, j) * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32))
        .sum()
}

#[test]
fn closed_form_matches_binomial_tail() {
    for p in [0.0, 0.01, 0.05, 0.1, 0.2, 0.3, 0.49] {
        assert!((filtered_error(p) - binomial_tail(3, 2, p)).abs() < 1e-12);
    }
    assert!((filtered_error(0.1) - 0.028).abs() < 1e-12);
}

#[test]
fn mean_hamming_distance_of_raw_observations() {
    let (_, p, g) = kitchen::grounded();
    let truth = g.init_state(&p).unwrap();
    let flip = vec![0.1; g.vocab_len()];
    let mut rng = stream(5, Stream::Perception);
    let n = 10_000;
    let total: usize = (0..n).map(|_| observe(&truth, &flip, &mut rng).hamming(&truth)).sum();
    let mean = total as f64 / n as f64;
    assert!((mean - 4.2).abs() <= 0.5, "{mean}");
}

#[test]
fn noiseless_filter_lags_at_most_two_ticks() {
    let (_, p, g) = kitchen::grounded();
    let a = g.init_state(&p).unwrap();
    let mut b = a.clone();
    b.insert(g.vocab.find("drawer_is_open").unwrap());
    b.remove(g.vocab.find("drawer_is_closed").unwrap());
    let noise = NoiseModel::uniform(0.0).unwrap();
    let mut pipe = Pipeline::noisy(&noise, &g.vocab, 3, stream(0, Stream::Perception)).unwrap();
    for _ in 0..5 {
        assert_eq!(pipe.estimate(&a), a);
    }
    assert_eq!(pipe.estimate(&b), a);
    assert_eq!(pipe.estimate(&b), b);
}

#[test]
fn oracle_pipeline_is_exact() {
    let (_, p, g) = kitchen::grounded();
    let truth = g.init_state(&p).unwrap();
    let mut pipe = Pipeline::oracle(stream(0, Stream::Perception));
    assert_eq!(pipe.estimate(&truth), truth);
}

proptest! {
    #[test]
    fn majority_of_identical_observations_is_that_observation(bits in proptest::collection::vec(any::<bool>(), 1..64)) {
        let s = LogicalState::from_ids(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i));
        let mut w = EstimatorWindow::new(3).unwrap();
        for _ in 0..3 {
            w.push(s.clone());
        }
        prop_assert_eq!(w.filter().unwrap(), s);
    }

    #[test]
    fn filtering_reduces_error(p in 0.001f64..0.499) {
        prop_assert!(filtered_error(p) < p);
    }
}
