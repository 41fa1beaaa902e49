mod common;

use mfpb_core::metrics::{
    cdm, class_biased, dm, evaluate_fairness, group_rates, mmm, objective_vector, CLASS_BIAS_TOL,
};
use mfpb_core::{GroupRates, Label};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn cdm_never_exceeds_dm_on_10k_quadruples() {
    let out = common::cdm_within_dm_suite(&mut ChaCha8Rng::seed_from_u64(1), 10_000);
    assert_eq!(out.violations, 0);
}

#[test]
fn both_measures_bounded_by_twice_mmm() {
    let out = common::twice_mmm_bound_suite(&mut ChaCha8Rng::seed_from_u64(2), 10_000);
    assert_eq!(out.violations, 0);
}

#[test]
fn equal_cdm_and_dm_means_unequal_class_gaps() {
    let out = common::unequal_gap_suite(&mut ChaCha8Rng::seed_from_u64(3), 10_000);
    assert!(out.checked > 1_000, "only {} qualifying quadruples", out.checked);
    assert_eq!(out.violations, 0);
}

fn rate() -> impl Strategy<Value = f64> {
    prop_oneof![(0u8..=8).prop_map(|k| f64::from(k) / 8.0), 0.0..=1.0f64]
}

fn quadruple() -> impl Strategy<Value = [f64; 4]> {
    [rate(), rate(), rate(), rate()]
}

proptest! {
    #[test]
    fn measure_ranges(q in quadruple()) {
        let r = GroupRates::from_rates(q[0], q[1], q[2], q[3]);
        prop_assert!((0.0..=2.0).contains(&dm(&r)));
        prop_assert!((0.0..=1.0).contains(&cdm(&r)));
        prop_assert!((0.0..=1.0).contains(&mmm(&[r]).unwrap()));
        prop_assert!(r.delta_fpr.abs() <= 1.0 && r.delta_fnr.abs() <= 1.0);
    }

    #[test]
    fn measures_match_direct_formulas(q in quadruple()) {
        let r = GroupRates::from_rates(q[0], q[1], q[2], q[3]);
        prop_assert_eq!(dm(&r), common::dm_of(q));
        prop_assert_eq!(cdm(&r), common::cdm_of(q));
    }

    #[test]
    fn swapping_groups_preserves_measures(q in quadruple()) {
        let r = GroupRates::from_rates(q[0], q[1], q[2], q[3]);
        let s = GroupRates::from_rates(q[2], q[3], q[0], q[1]);
        prop_assert_eq!(dm(&r), dm(&s));
        prop_assert_eq!(cdm(&r), cdm(&s));
        prop_assert_eq!(class_biased(&r, CLASS_BIAS_TOL), class_biased(&s, CLASS_BIAS_TOL));
    }

    #[test]
    fn single_attribute_mmm_is_larger_gap(q in quadruple()) {
        let r = GroupRates::from_rates(q[0], q[1], q[2], q[3]);
        prop_assert_eq!(mmm(&[r]).unwrap(), (q[0] - q[2]).abs().max((q[1] - q[3]).abs()));
    }

    #[test]
    fn mmm_is_max_over_attributes(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rates: Vec<GroupRates> = (0..k).map(|_| common::random_group_rates(&mut rng)).collect();
        let m = mmm(&rates).unwrap();
        for r in &rates {
            prop_assert!(mmm(&[*r]).unwrap() <= m);
        }
        prop_assert!(rates.iter().any(|r| mmm(&[*r]).unwrap() == m));
    }

    #[test]
    fn fairness_objective_equals_mmm(seed in any::<u64>(), n in 4usize..120, k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = common::random_dataset(&mut rng, n, 1, k, 3);
        let preds: Vec<Label> = (0..n)
            .map(|_| if rand::Rng::gen_bool(&mut rng, 0.5) { Label::Positive } else { Label::Negative })
            .collect();
        let sv = objective_vector(&preds, &ds, 1).unwrap();
        let report = evaluate_fairness(&preds, &ds).unwrap();
        prop_assert!((sv.o3 - report.mmm).abs() <= 1e-12, "o3 {} vs mmm {}", sv.o3, report.mmm);
        for v in sv.objectives() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn rates_recount(seed in any::<u64>(), n in 1usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lab = |rng: &mut ChaCha8Rng| if rand::Rng::gen_bool(rng, 0.5) { Label::Positive } else { Label::Negative };
        let labels: Vec<Label> = (0..n).map(|_| lab(&mut rng)).collect();
        let preds: Vec<Label> = (0..n).map(|_| lab(&mut rng)).collect();
        let mask: Vec<bool> = (0..n).map(|_| rand::Rng::gen_bool(&mut rng, 0.5)).collect();
        let r = group_rates(&preds, &labels, &mask).unwrap();
        let rate = |g: bool, y: Label| {
            let idx: Vec<usize> = (0..n).filter(|&i| mask[i] == g && labels[i] == y).collect();
            (!idx.is_empty()).then(|| idx.iter().filter(|&&i| preds[i] != y).count() as f64 / idx.len() as f64)
        };
        prop_assert_eq!(r.fpr_s, rate(true, Label::Negative));
        prop_assert_eq!(r.fnr_s, rate(true, Label::Positive));
        prop_assert_eq!(r.fpr_ns, rate(false, Label::Negative));
        prop_assert_eq!(r.fnr_ns, rate(false, Label::Positive));
        prop_assert_eq!(r.has_undefined(), [r.fpr_s, r.fnr_s, r.fpr_ns, r.fnr_ns].iter().any(Option::is_none));
    }
}
