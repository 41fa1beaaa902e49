//! Independent reference implementations used as test oracles, plus the
//! random fixture builders shared by the property suites.
//!
//! Nothing here calls into the code under test except to build inputs or
//! read plain fields.

#![allow(dead_code, clippy::needless_range_loop)]

use mfpb_core::pareto::FrontEntry;
use mfpb_core::{Dataset, GroupRates, Label, ProtectedAttribute, SolutionVector, Stump};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------- rates

/// A rate in [0, 1]. Half the draws land on a coarse grid so that equalities
/// (and hence boundary cases of the inequalities) actually occur.
pub fn random_rate(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(0..=8) as f64 / 8.0
    } else {
        rng.gen::<f64>()
    }
}

/// (fpr_s, fnr_s, fpr_ns, fnr_ns)
pub fn random_quadruple(rng: &mut ChaCha8Rng) -> [f64; 4] {
    [random_rate(rng), random_rate(rng), random_rate(rng), random_rate(rng)]
}

/// Occasionally leaves a rate undefined, as an empty group-by-class cell would.
pub fn random_group_rates(rng: &mut ChaCha8Rng) -> GroupRates {
    let mut r = || {
        let v = random_rate(rng);
        if rng.gen_bool(0.05) {
            None
        } else {
            Some(v)
        }
    };
    GroupRates::new(r(), r(), r(), r())
}

pub fn dm_of(q: [f64; 4]) -> f64 {
    let [a, b, abar, bbar] = q;
    (a - abar).abs() + (b - bbar).abs()
}

pub fn cdm_of(q: [f64; 4]) -> f64 {
    let [a, b, abar, bbar] = q;
    ((a - b).abs() - (abar - bbar).abs()).abs()
}

/// Quadruples with one of the two gaps forced to zero, where `cdm == dm`
/// is common. Uniform sampling alone rarely lands on the equality.
pub fn class_biased_quadruple(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let [a, b, abar, bbar] = random_quadruple(rng);
    if rng.gen_bool(0.5) {
        [abar, b, abar, bbar]
    } else {
        [a, bbar, abar, bbar]
    }
}

pub struct SuiteOutcome {
    pub checked: usize,
    pub violations: usize,
}

/// `cdm <= dm + 1e-12` on `n` random quadruples.
pub fn cdm_within_dm_suite(rng: &mut ChaCha8Rng, n: usize) -> SuiteOutcome {
    let mut violations = 0;
    for _ in 0..n {
        let [a, b, abar, bbar] = random_quadruple(rng);
        let r = GroupRates::from_rates(a, b, abar, bbar);
        if mfpb_core::metrics::cdm(&r) > mfpb_core::metrics::dm(&r) + 1e-12 {
            violations += 1;
        }
    }
    SuiteOutcome { checked: n, violations }
}

/// `dm_j, cdm_j <= 2 mmm + 1e-12` for every attribute of `n` random rate sets.
pub fn twice_mmm_bound_suite(rng: &mut ChaCha8Rng, n: usize) -> SuiteOutcome {
    use mfpb_core::metrics::{cdm, dm, mmm};
    let mut violations = 0;
    for _ in 0..n {
        let k = rng.gen_range(1..=4);
        let rates: Vec<GroupRates> = (0..k).map(|_| random_group_rates(rng)).collect();
        let bound = 2.0 * mmm(&rates).unwrap() + 1e-12;
        if rates.iter().any(|r| dm(r) > bound || cdm(r) > bound) {
            violations += 1;
        }
    }
    SuiteOutcome { checked: n, violations }
}

/// Among quadruples with `|cdm - dm| <= 1e-12` and `dm > 1e-6`, the two
/// gaps `a - abar` and `b - bbar` differ by more than 1e-9. `checked` counts
/// the qualifying quadruples only.
pub fn unequal_gap_suite(rng: &mut ChaCha8Rng, n: usize) -> SuiteOutcome {
    use mfpb_core::metrics::{cdm, dm};
    let mut out = SuiteOutcome { checked: 0, violations: 0 };
    for i in 0..n {
        let q = if i % 2 == 0 { random_quadruple(rng) } else { class_biased_quadruple(rng) };
        let [a, b, abar, bbar] = q;
        let r = GroupRates::from_rates(a, b, abar, bbar);
        let (d, c) = (dm(&r), cdm(&r));
        if (c - d).abs() <= 1e-12 && d > 1e-6 {
            out.checked += 1;
            if ((a - abar) - (b - bbar)).abs() <= 1e-9 {
                out.violations += 1;
            }
        }
    }
    out
}

// ---------------------------------------------------------------- datasets

/// Random dataset with values drawn from `levels` distinct integers per
/// feature (so thresholds tie) and one protected attribute per `k`.
/// Both classes are always present.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize, k: usize, levels: u32) -> Dataset {
    assert!(n >= 2);
    let rows: Vec<Vec<f64>> =
        (0..n).map(|_| (0..d).map(|_| f64::from(rng.gen_range(0..levels)) * 0.5 - 1.0).collect()).collect();
    let mut labels: Vec<Label> =
        (0..n).map(|_| if rng.gen_bool(0.4) { Label::Positive } else { Label::Negative }).collect();
    labels[0] = Label::Positive;
    labels[1] = Label::Negative;
    let attrs = (0..k)
        .map(|j| ProtectedAttribute { name: format!("g{j}"), mask: (0..n).map(|_| rng.gen_bool(0.4)).collect() })
        .collect();
    Dataset::new((0..d).map(|f| format!("x{f}")).collect(), rows, labels, attrs).unwrap()
}

/// Random probability vector over `n` entries (strictly positive).
pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

// ---------------------------------------------------------------- stumps

fn stump_predicts(x: f64, threshold: f64, polarity: Label) -> Label {
    if x > threshold {
        polarity
    } else if polarity == Label::Positive {
        Label::Negative
    } else {
        Label::Positive
    }
}

fn brute_error(rows: &[Vec<f64>], labels: &[Label], w: &[f64], f: usize, thr: f64, pol: Label) -> f64 {
    let mut err = 0.0;
    for i in 0..rows.len() {
        if stump_predicts(rows[i][f], thr, pol) != labels[i] {
            err += w[i];
        }
    }
    err
}

/// Exhaustive split search: every feature, every threshold (`-inf`, each
/// midpoint of consecutive distinct values, `+inf`), both polarities, each
/// scored from scratch. Ties: lowest feature, lowest threshold, polarity +1.
pub fn brute_force_stump(ds: &Dataset, w: &[f64]) -> Stump {
    let n = ds.len();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| ds.row(i).to_vec()).collect();
    let labels = ds.labels();
    let mut best: Option<Stump> = None;
    for f in 0..ds.n_features() {
        let mut values: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let mut thresholds = vec![f64::NEG_INFINITY];
        thresholds.extend(values.windows(2).map(|p| (p[0] + p[1]) / 2.0));
        thresholds.push(f64::INFINITY);
        for &thr in &thresholds {
            for pol in [Label::Positive, Label::Negative] {
                let e = brute_error(&rows, labels, w, f, thr, pol);
                // strict improvement only: iteration already runs in tie-break order
                if best.is_none_or(|b| e < b.weighted_error) {
                    best = Some(Stump { feature: f, threshold: thr, polarity: pol, weighted_error: e });
                }
            }
        }
    }
    best.unwrap()
}

// ---------------------------------------------------------------- AdaBoost

pub struct ReferenceTrace {
    pub stumps: Vec<Stump>,
    pub alphas: Vec<f64>,
    /// Distribution each round's stump was trained on, then the final one.
    pub distributions: Vec<Vec<f64>>,
}

/// Textbook discrete AdaBoost with the same numeric conventions as the
/// library: clamped error, capped alpha, index-order normalizer, early stop
/// at chance level.
pub fn reference_adaboost(ds: &Dataset, rounds: usize) -> ReferenceTrace {
    let n = ds.len();
    let floor = 1e-10;
    let cap = 0.5 * libm::log(1e10);
    let labels = ds.labels();
    let mut w = vec![1.0 / n as f64; n];
    let mut out = ReferenceTrace { stumps: vec![], alphas: vec![], distributions: vec![w.clone()] };
    for _ in 0..rounds {
        let s = brute_force_stump(ds, &w);
        if s.weighted_error >= 0.5 - floor {
            break;
        }
        let e = s.weighted_error.clamp(floor, 0.5 - floor);
        let alpha = (0.5 * libm::log((1.0 - e) / e)).min(cap);
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let correct = stump_predicts(ds.row(i)[s.feature], s.threshold, s.polarity) == labels[i];
            next.push(w[i] * libm::exp(if correct { -alpha } else { alpha }));
        }
        let z: f64 = next.iter().sum();
        w = next.into_iter().map(|v| v / z).collect();
        out.stumps.push(s);
        out.alphas.push(alpha);
        out.distributions.push(w.clone());
    }
    out
}

// ---------------------------------------------------------------- Pareto

fn dominates(a: &[f64; 3], b: &[f64; 3]) -> bool {
    (0..3).all(|i| a[i] <= b[i]) && (0..3).any(|i| a[i] < b[i])
}

/// Rounds of the non-dominated solutions by pairwise comparison; among
/// identical objective vectors only the smallest round is kept.
pub fn brute_force_front(solutions: &[SolutionVector]) -> Vec<usize> {
    let mut rounds = Vec::new();
    for s in solutions {
        let o = [s.o1, s.o2, s.o3];
        let beaten = solutions.iter().any(|t| {
            let p = [t.o1, t.o2, t.o3];
            dominates(&p, &o) || (p == o && t.round < s.round)
        });
        if !beaten {
            rounds.push(s.round);
        }
    }
    rounds.sort_unstable();
    rounds
}

/// Pseudo-weights recomputed from the front's objective vectors.
pub fn brute_force_pseudo_weights(front: &[SolutionVector]) -> Vec<[f64; 3]> {
    let obj = |s: &SolutionVector| [s.o1, s.o2, s.o3];
    let mut out = Vec::new();
    for s in front {
        let mut terms = [0.0; 3];
        for i in 0..3 {
            let hi = front.iter().map(|t| obj(t)[i]).fold(f64::NEG_INFINITY, f64::max);
            let lo = front.iter().map(|t| obj(t)[i]).fold(f64::INFINITY, f64::min);
            if hi > lo {
                terms[i] = (hi - obj(s)[i]) / (hi - lo);
            }
        }
        let total = terms[0] + terms[1] + terms[2];
        out.push(if total > 0.0 { [terms[0] / total, terms[1] / total, terms[2] / total] } else { [1.0 / 3.0; 3] });
    }
    out
}

/// Round of the entry with the smallest L1 distance to `u`, smallest round on ties.
pub fn brute_force_select(entries: &[FrontEntry], u: [f64; 3]) -> usize {
    let dist = |e: &FrontEntry| (0..3).map(|i| (e.pseudo_weight[i] - u[i]).abs()).sum::<f64>();
    let best = entries.iter().map(dist).fold(f64::INFINITY, f64::min);
    entries.iter().filter(|e| dist(e) == best).map(|e| e.solution.round).min().unwrap()
}

/// Random solution vectors on a coarse grid (so duplicates and ties occur),
/// rounds 1..=n in shuffled order.
pub fn random_solutions(rng: &mut ChaCha8Rng, n: usize, grid: u32) -> Vec<SolutionVector> {
    let mut v: Vec<SolutionVector> = (1..=n)
        .map(|round| {
            let mut g = || f64::from(rng.gen_range(0..=grid)) / f64::from(grid);
            SolutionVector { round, o1: g(), o2: g(), o3: g() }
        })
        .collect();
    for i in (1..v.len()).rev() {
        let j = rng.gen_range(0..=i);
        v.swap(i, j);
    }
    v
}

// ---------------------------------------------------------------- AUC

/// Concordant pairs plus half the tied pairs, over all positive/negative pairs.
pub fn pairwise_auc(scores: &[f64], labels: &[Label]) -> f64 {
    let mut credit = 0.0;
    let mut pairs = 0usize;
    for i in 0..scores.len() {
        if !labels[i].is_positive() {
            continue;
        }
        for j in 0..scores.len() {
            if labels[j].is_positive() {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                credit += 1.0;
            } else if scores[i] == scores[j] {
                credit += 0.5;
            }
        }
    }
    credit / pairs as f64
}
