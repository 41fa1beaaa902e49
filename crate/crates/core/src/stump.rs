//! Weighted decision stumps.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{bail, Result};

/// Candidates whose sweep error is within this distance of the best are
/// re-scored exactly before the winner is picked.
const RESCORE_BAND: f64 = 1e-9;

/// Depth-one decision tree: predicts `polarity` when
/// `x[feature] > threshold` and the opposite label otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    #[serde(with = "threshold_serde")]
    pub threshold: f64,
    pub polarity: Label,
    /// Weighted 0-1 error on the distribution the stump was trained on.
    pub weighted_error: f64,
}

impl Stump {
    /// Prediction for a row known to have more than `feature` entries.
    #[inline]
    pub fn predict_row(&self, row: &[f64]) -> Label {
        if row[self.feature] > self.threshold {
            self.polarity
        } else {
            self.polarity.flip()
        }
    }

    /// Predictions for every instance of `dataset`.
    pub fn predict_all(&self, dataset: &Dataset) -> Vec<Label> {
        let col = dataset.column(self.feature);
        col.iter().map(|&x| if x > self.threshold { self.polarity } else { self.polarity.flip() }).collect()
    }

    fn cmp_key(&self, other: &Stump) -> Ordering {
        self.feature
            .cmp(&other.feature)
            .then(self.threshold.total_cmp(&other.threshold))
            .then(polarity_rank(self.polarity).cmp(&polarity_rank(other.polarity)))
    }
}

fn polarity_rank(p: Label) -> u8 {
    match p {
        Label::Positive => 0,
        Label::Negative => 1,
    }
}

/// Checked prediction for a single feature vector.
pub fn predict_stump(stump: &Stump, features: &[f64]) -> Result<Label> {
    if stump.feature >= features.len() {
        bail!(Argument, "stump feature {} out of range for a {}-feature vector", stump.feature, features.len());
    }
    Ok(stump.predict_row(features))
}

/// Weighted 0-1 error of `stump`, summed in instance order.
pub fn weighted_error(stump: &Stump, dataset: &Dataset, weights: &[f64]) -> f64 {
    let col = dataset.column(stump.feature);
    let mut err = 0.0;
    for ((&x, &y), &w) in col.iter().zip(dataset.labels()).zip(weights) {
        let pred = if x > stump.threshold { stump.polarity } else { stump.polarity.flip() };
        if pred != y {
            err += w;
        }
    }
    err
}

pub(crate) fn check_distribution(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        bail!(Argument, "{} weights for {n} instances", weights.len());
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        bail!(Argument, "weights must be finite and non-negative");
    }
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        bail!(Argument, "all instance weights are zero");
    }
    if (total - 1.0).abs() > 1e-9 {
        bail!(Argument, "weights sum to {total}, expected 1");
    }
    Ok(())
}

#[derive(Clone, Copy)]
struct Candidate {
    threshold: f64,
    polarity: Label,
    approx_error: f64,
}

/// Sweeps every threshold of feature `f`: `-inf`, midpoints between
/// consecutive distinct values, `+inf`; both polarities each.
fn sweep_feature(dataset: &Dataset, weights: &[f64], f: usize) -> Vec<Candidate> {
    let col = dataset.column(f);
    let labels = dataset.labels();
    let order = dataset.sorted_order(f);

    let (mut total_pos, mut total_neg) = (0.0, 0.0);
    for (&y, &w) in labels.iter().zip(weights) {
        if y.is_positive() {
            total_pos += w;
        } else {
            total_neg += w;
        }
    }

    let mut out = Vec::with_capacity(2 * order.len() + 4);
    // weight at or below the threshold, by class
    let (mut below_pos, mut below_neg) = (0.0, 0.0);
    let mut push = |threshold: f64, below_pos: f64, below_neg: f64| {
        // polarity +1: above -> +1, so errors are positives below and negatives above
        out.push(Candidate { threshold, polarity: Label::Positive, approx_error: below_pos + (total_neg - below_neg) });
        out.push(Candidate { threshold, polarity: Label::Negative, approx_error: below_neg + (total_pos - below_pos) });
    };
    push(f64::NEG_INFINITY, 0.0, 0.0);

    let mut k = 0;
    while k < order.len() {
        let v = col[order[k] as usize];
        while k < order.len() && col[order[k] as usize] == v {
            let i = order[k] as usize;
            if labels[i].is_positive() {
                below_pos += weights[i];
            } else {
                below_neg += weights[i];
            }
            k += 1;
        }
        if k < order.len() {
            let next = col[order[k] as usize];
            push(0.5 * (v + next), below_pos, below_neg);
        }
    }
    push(f64::INFINITY, total_pos, total_neg);
    out
}

#[cfg(feature = "parallel")]
fn sweep_all(dataset: &Dataset, weights: &[f64]) -> Vec<Vec<Candidate>> {
    use rayon::prelude::*;
    (0..dataset.n_features()).into_par_iter().map(|f| sweep_feature(dataset, weights, f)).collect()
}

#[cfg(not(feature = "parallel"))]
fn sweep_all(dataset: &Dataset, weights: &[f64]) -> Vec<Vec<Candidate>> {
    (0..dataset.n_features()).map(|f| sweep_feature(dataset, weights, f)).collect()
}

/// Trains the stump with minimum weighted 0-1 error under `weights`.
///
/// Ties are broken by lowest feature index, then lowest threshold, then
/// polarity +1, so the result does not depend on evaluation order. When every
/// feature is constant the winner is the `-inf` stump predicting the class
/// with the larger total weight.
pub fn train_stump(dataset: &Dataset, weights: &[f64]) -> Result<Stump> {
    check_distribution(weights, dataset.len())?;
    let per_feature = sweep_all(dataset, weights);

    let best_approx = per_feature.iter().flatten().map(|c| c.approx_error).fold(f64::INFINITY, f64::min);

    // Sweep sums accumulate in sorted order; re-score the near-best ones in
    // instance order so the final choice is exact.
    let mut best: Option<Stump> = None;
    for (feature, cands) in per_feature.iter().enumerate() {
        for c in cands.iter().filter(|c| c.approx_error <= best_approx + RESCORE_BAND) {
            let mut s = Stump { feature, threshold: c.threshold, polarity: c.polarity, weighted_error: 0.0 };
            s.weighted_error = weighted_error(&s, dataset, weights);
            best = match best {
                Some(b) if b.weighted_error < s.weighted_error => Some(b),
                Some(b) if b.weighted_error == s.weighted_error && b.cmp_key(&s) != Ordering::Greater => Some(b),
                _ => Some(s),
            };
        }
    }
    match best {
        Some(s) => Ok(s),
        None => bail!(Internal, "no stump candidate produced"),
    }
}

/// Serde adapter for thresholds: JSON has no infinities, so `±inf` are
/// written as the strings `"inf"` and `"-inf"`.
pub mod threshold_serde {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else if *v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    struct ThresholdVisitor;

    impl Visitor<'_> for ThresholdVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut core::fmt::Formatter) -> core::fmt::Result {
            f.write_str("a finite number, \"inf\" or \"-inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(ThresholdVisitor)
    }
}
