//! The stump trainer, Pareto filter, selection rule and AUC against
//! brute-force oracles. All comparisons are exact.

mod common;

use mfpb_core::eval::auc;
use mfpb_core::pareto::{pareto_front, select, PreferenceVector};
use mfpb_core::stump::train_stump;
use mfpb_core::Label;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_same_stump(seed: u64, n: usize, d: usize, levels: u32) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds = common::random_dataset(&mut rng, n, d, 1, levels);
    let w = common::random_distribution(&mut rng, n);
    let got = train_stump(&ds, &w).unwrap();
    let want = common::brute_force_stump(&ds, &w);
    assert_eq!(got.feature, want.feature, "seed {seed}");
    assert_eq!(got.threshold.to_bits(), want.threshold.to_bits(), "seed {seed}");
    assert_eq!(got.polarity, want.polarity, "seed {seed}");
    assert_eq!(got.weighted_error.to_bits(), want.weighted_error.to_bits(), "seed {seed}");
}

#[test]
fn stump_matches_exhaustive_search() {
    for seed in 0..300 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let n = rng.gen_range(2..=50);
        let d = rng.gen_range(1..=5);
        let levels = rng.gen_range(1..=12);
        assert_same_stump(seed, n, d, levels);
    }
}

#[test]
fn stump_on_uniform_weights_with_heavy_ties() {
    // uniform weights make many candidates tie exactly
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=50);
        let ds = common::random_dataset(&mut rng, n, 3, 1, 3);
        let w = vec![1.0 / n as f64; n];
        let got = train_stump(&ds, &w).unwrap();
        let want = common::brute_force_stump(&ds, &w);
        assert_eq!(
            (got.feature, got.threshold.to_bits(), got.polarity),
            (want.feature, want.threshold.to_bits(), want.polarity)
        );
    }
}

#[test]
fn front_matches_pairwise_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..60 {
        let n = if case < 5 { 1000 } else { rng.gen_range(1..=300) };
        let grid = rng.gen_range(2..=30);
        let sols = common::random_solutions(&mut rng, n, grid);
        let front = pareto_front(&sols).unwrap();
        assert_eq!(front.rounds().collect::<Vec<_>>(), common::brute_force_front(&sols), "case {case}");
        let on_front: Vec<_> = front.entries.iter().map(|e| e.solution).collect();
        let want = common::brute_force_pseudo_weights(&on_front);
        for (e, w) in front.entries.iter().zip(&want) {
            assert_eq!(&e.pseudo_weight, w);
        }
    }
}

#[test]
fn selection_matches_brute_force_l1() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.gen_range(1..=200);
        let sols = common::random_solutions(&mut rng, n, 10);
        let front = pareto_front(&sols).unwrap();
        let raw = if rng.gen_bool(0.3) {
            // grid preferences hit exact distance ties
            [0, 1, 2].map(|_| f64::from(rng.gen_range(0..=4u8)))
        } else {
            [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()]
        };
        let pref = PreferenceVector::new(raw).unwrap();
        let got = select(&front, &pref).unwrap().solution.round;
        assert_eq!(got, common::brute_force_select(&front.entries, pref.components()));
    }
}

proptest! {
    #[test]
    fn auc_matches_pairwise_count(seed in any::<u64>(), n in 2usize..=500, levels in 1u32..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels: Vec<Label> = (0..n).map(|_| if rng.gen_bool(0.3) { Label::Positive } else { Label::Negative }).collect();
        labels[0] = Label::Positive;
        labels[1] = Label::Negative;
        let scores: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..levels)) / f64::from(levels)).collect();
        prop_assert_eq!(auc(&scores, &labels).unwrap(), common::pairwise_auc(&scores, &labels));
    }

    #[test]
    fn stump_matches_exhaustive_search_prop(seed in any::<u64>(), n in 2usize..=50, d in 1usize..=5, levels in 1u32..20) {
        assert_same_stump(seed, n, d, levels);
    }
}
