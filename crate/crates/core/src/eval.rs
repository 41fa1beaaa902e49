//! Predictive-performance metrics, the four-classifier toy table, and a
//! seeded generator of group-biased data.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boost::{margins, Member};
use crate::dataset::{Dataset, Label, ProtectedAttribute};
use crate::error::{bail, Result};
use crate::math;
use crate::metrics::{evaluate_fairness, AttributeFairness, FairnessReport, GroupRates};

/// Performance and fairness of one classifier on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub acc: f64,
    /// `min(tpr, tnr)`.
    pub wc_acc: f64,
    pub auc: f64,
    /// `sqrt(tpr * tnr)`.
    pub gm: f64,
    pub tpr: f64,
    pub tnr: f64,
    pub fairness: FairnessReport,
}

/// Area under the ROC curve from the Mann-Whitney rank statistic, ties credited 0.5.
pub fn auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        bail!(Argument, "{} scores for {} labels", scores.len(), labels.len());
    }
    let n_pos = labels.iter().filter(|l| l.is_positive()).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        bail!(DegenerateData, "AUC needs both classes ({n_pos} positive, {n_neg} negative)");
    }
    if scores.iter().any(|s| s.is_nan()) {
        bail!(Argument, "scores contain NaN");
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Ranks are 1-based; a tie block spanning ranks lo..=hi gets (lo + hi) / 2.
    let mut pos_rank_sum = 0.0;
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        while end + 1 < order.len() && scores[order[end + 1]] == scores[order[k]] {
            end += 1;
        }
        let avg = (k + 1 + end + 1) as f64 / 2.0;
        let pos_in_block = order[k..=end].iter().filter(|&&i| labels[i].is_positive()).count();
        pos_rank_sum += avg * pos_in_block as f64;
        k = end + 1;
    }
    let u = pos_rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Evaluates hard predictions and continuous scores against `dataset`.
pub fn evaluate_predictions(predictions: &[Label], scores: &[f64], dataset: &Dataset) -> Result<EvalReport> {
    dataset.require_both_classes()?;
    let labels = dataset.labels();
    if predictions.len() != labels.len() {
        bail!(Argument, "{} predictions for {} instances", predictions.len(), labels.len());
    }
    let (mut tp, mut tn, mut pos, mut neg) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &y) in predictions.iter().zip(labels) {
        if y.is_positive() {
            pos += 1;
            tp += usize::from(p == y);
        } else {
            neg += 1;
            tn += usize::from(p == y);
        }
    }
    let tpr = tp as f64 / pos as f64;
    let tnr = tn as f64 / neg as f64;
    Ok(EvalReport {
        acc: (tp + tn) as f64 / labels.len() as f64,
        wc_acc: tpr.min(tnr),
        auc: auc(scores, labels)?,
        gm: math::sqrt(tpr * tnr),
        tpr,
        tnr,
        fairness: evaluate_fairness(predictions, dataset)?,
    })
}

/// Evaluates the partial ensemble `members` on `dataset`. Scores are the
/// normalized margins.
pub fn evaluate(members: &[Member], dataset: &Dataset) -> Result<EvalReport> {
    if members.is_empty() {
        bail!(Argument, "cannot evaluate an empty ensemble");
    }
    let m = margins(members, dataset);
    let preds: Vec<Label> = m.iter().map(|&v| Label::from_margin(v)).collect();
    let total: f64 = members.iter().map(|m| m.alpha).sum();
    let scores: Vec<f64> = m.iter().map(|v| v / total).collect();
    evaluate_predictions(&preds, &scores, dataset)
}

/// Evaluates several prefixes `H_t` in one pass over the members.
///
/// `rounds` must be strictly ascending and within `1..=members.len()`.
/// Each report is bit-identical to `evaluate(&members[..t], dataset)`.
pub fn evaluate_prefixes(members: &[Member], dataset: &Dataset, rounds: &[usize]) -> Result<Vec<EvalReport>> {
    if rounds.windows(2).any(|w| w[0] >= w[1]) {
        bail!(Argument, "prefix rounds must be strictly ascending");
    }
    if let Some(&t) = rounds.iter().find(|&&t| t == 0 || t > members.len()) {
        bail!(Argument, "prefix round {t} out of range for {} members", members.len());
    }
    let mut out = Vec::with_capacity(rounds.len());
    let mut m = vec![0.0; dataset.len()];
    let mut total = 0.0;
    let mut next = rounds.iter().peekable();
    for (t, member) in members.iter().enumerate() {
        let Some(&&want) = next.peek() else { break };
        for (v, pred) in m.iter_mut().zip(member.stump.predict_all(dataset)) {
            if pred == Label::Positive {
                *v += member.alpha;
            } else {
                *v -= member.alpha;
            }
        }
        total += member.alpha;
        if t + 1 == want {
            next.next();
            let preds: Vec<Label> = m.iter().map(|&v| Label::from_margin(v)).collect();
            let scores: Vec<f64> = m.iter().map(|v| v / total).collect();
            out.push(evaluate_predictions(&preds, &scores, dataset)?);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Toy example: four hypothetical classifiers over Sex (F protected) and
// Race (B protected).

/// Names of the toy groups, in fixture order.
pub const TOY_GROUPS: [&str; 4] = ["M", "F", "W", "B"];

/// `(name, fnr per group, fpr per group)` for the four toy classifiers.
pub const TOY_CLASSIFIERS: [(&str, [f64; 4], [f64; 4]); 4] = [
    ("Cf1", [0.6, 0.6, 0.4, 1.0], [0.1, 0.1, 0.3, 0.0]),
    ("Cf2", [0.8, 0.8, 0.8, 0.8], [0.1, 0.1, 0.1, 0.1]),
    ("Cf3", [0.2, 0.4, 0.2, 0.4], [0.2, 0.2, 0.2, 0.2]),
    ("Cf4", [0.3, 0.2, 0.3, 0.2], [0.3, 0.2, 0.2, 0.3]),
];

/// Expected MMM of the toy classifiers.
pub const TOY_MMM: [f64; 4] = [0.6, 0.0, 0.2, 0.1];

const TOY_TOL: f64 = 1e-12;

/// `[sex, race]` group rates of a toy classifier.
pub fn toy_rates(fnr: [f64; 4], fpr: [f64; 4]) -> [(&'static str, GroupRates); 2] {
    [
        ("sex", GroupRates::from_rates(fpr[1], fnr[1], fpr[0], fnr[0])),
        ("race", GroupRates::from_rates(fpr[3], fnr[3], fpr[2], fnr[2])),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyRow {
    pub classifier: String,
    pub per_attribute: Vec<AttributeFairness>,
    pub mmm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyReport {
    pub rows: Vec<ToyRow>,
    pub checks: Vec<ToyCheck>,
}

impl ToyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Evaluates DM, CDM and MMM for the toy classifiers and checks the expected
/// orderings between them.
pub fn toy_report() -> ToyReport {
    let rows: Vec<ToyRow> = TOY_CLASSIFIERS
        .iter()
        .map(|(name, fnr, fpr)| {
            let report = FairnessReport::from_rates(toy_rates(*fnr, *fpr)).expect("two attributes");
            ToyRow { classifier: String::from(*name), per_attribute: report.per_attribute, mmm: report.mmm }
        })
        .collect();
    let checks = toy_checks(&rows);
    ToyReport { rows, checks }
}

fn toy_checks(rows: &[ToyRow]) -> Vec<ToyCheck> {
    let mut checks = Vec::new();
    let mut check = |name: String, passed: bool| checks.push(ToyCheck { name, passed });

    for (row, expected) in rows.iter().zip(TOY_MMM) {
        check(format!("MMM({}) = {expected}", row.classifier), (row.mmm - expected).abs() <= TOY_TOL);
    }

    let (cf1, cf2, cf3, cf4) = (&rows[0], &rows[1], &rows[2], &rows[3]);
    let cf2_fairest = rows.iter().all(|r| {
        cf2.mmm <= r.mmm + TOY_TOL
            && cf2
                .per_attribute
                .iter()
                .zip(&r.per_attribute)
                .all(|(a, b)| a.dm <= b.dm + TOY_TOL && a.cdm <= b.cdm + TOY_TOL)
    });
    check(String::from("Cf2 fairest on DM, CDM and MMM"), cf2_fairest);

    for (a3, a4) in cf3.per_attribute.iter().zip(&cf4.per_attribute) {
        check(format!("DM({0}) equal for Cf3 and Cf4", a3.attribute), (a3.dm - a4.dm).abs() <= TOY_TOL);
        check(format!("CDM({0}): Cf4 < Cf3", a3.attribute), a4.cdm + TOY_TOL < a3.cdm);
    }
    check(String::from("MMM: Cf4 < Cf1"), cf4.mmm + TOY_TOL < cf1.mmm);
    check(String::from("MMM: Cf4 < Cf3"), cf4.mmm + TOY_TOL < cf3.mmm);
    checks
}

// ---------------------------------------------------------------------------
// Synthetic biased data.

/// Parameters of [`synth_biased`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n: usize,
    /// Minority (+) to majority (-) class size ratio, in (0, 1].
    pub imbalance_ratio: f64,
    /// How far protected-group positives of the first attribute are pulled
    /// toward the negative cluster: 0 leaves them alone, 0.5 makes them
    /// indistinguishable from negatives, 1 mirrors them onto the negative
    /// centre. Later attributes use half of it.
    pub bias_strength: f64,
    pub k_attrs: usize,
    pub seed: u64,
}

const INFORMATIVE: usize = 4;
const CLUSTER_CENTRE: f64 = 1.2;
const P_MEMBER_POS: f64 = 0.35;
const P_MEMBER_NEG: f64 = 0.50;
const MAX_ATTEMPTS: u64 = 16;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(core::f64::consts::TAU * u2)
}

/// Generates a dataset whose plain classifiers discriminate against the
/// protected group's positives.
///
/// Features are `INFORMATIVE` unit-variance Gaussian dimensions centred at
/// `+1.2` for positives and `-1.2` for negatives, followed by one 0/1
/// indicator per protected attribute. Protected membership of attribute `j`
/// has probability `0.35 + 0.05 j` among positives and `0.50 + 0.05 j` among
/// negatives. For each attribute a positive belongs to, its centre is scaled
/// by `1 - 2 b_j`, with `b_0 = bias_strength` and `b_j = bias_strength / 2`
/// otherwise. Protected positives therefore drift toward (or, past 0.5, into)
/// the negative cluster and plain classifiers miss them more often.
///
/// Draws that leave a group-by-class cell empty are regenerated from a derived
/// seed, up to 16 attempts.
pub fn synth_biased(params: SynthParams) -> Result<Dataset> {
    let SynthParams { n, imbalance_ratio, bias_strength, k_attrs, seed } = params;
    if n < 100 {
        bail!(Argument, "synthetic datasets need n >= 100, got {n}");
    }
    if !(1..=4).contains(&k_attrs) {
        bail!(Argument, "k_attrs must be in 1..=4, got {k_attrs}");
    }
    if !(imbalance_ratio > 0.0 && imbalance_ratio <= 1.0) {
        bail!(Argument, "imbalance ratio must lie in (0, 1], got {imbalance_ratio}");
    }
    if !(0.0..=1.0).contains(&bias_strength) {
        bail!(Argument, "bias strength must lie in [0, 1], got {bias_strength}");
    }

    let mut last_empty = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        match generate(&mut rng, params)? {
            Ok(ds) => return Ok(ds),
            Err(cell) => last_empty = cell,
        }
    }
    bail!(
        DegenerateData,
        "synthetic generator left cell {last_empty} empty after {MAX_ATTEMPTS} attempts (n={n}, ir={imbalance_ratio}, k={k_attrs})"
    )
}

fn generate(rng: &mut ChaCha8Rng, params: SynthParams) -> Result<core::result::Result<Dataset, String>> {
    let SynthParams { n, imbalance_ratio, bias_strength, k_attrs, .. } = params;
    let n_pos = (math::round(n as f64 * imbalance_ratio / (1.0 + imbalance_ratio)) as usize).clamp(1, n - 1);

    let d = INFORMATIVE + k_attrs;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut masks = vec![Vec::with_capacity(n); k_attrs];

    for i in 0..n {
        let label = if i < n_pos { Label::Positive } else { Label::Negative };
        let mut member = [false; 4];
        for (j, m) in member.iter_mut().enumerate().take(k_attrs) {
            let p = match label {
                Label::Positive => P_MEMBER_POS + 0.05 * j as f64,
                Label::Negative => P_MEMBER_NEG + 0.05 * j as f64,
            };
            *m = rng.gen::<f64>() < p;
        }
        let mut centre = if label.is_positive() { CLUSTER_CENTRE } else { -CLUSTER_CENTRE };
        if label.is_positive() {
            for (j, &m) in member.iter().enumerate().take(k_attrs) {
                let strength = if j == 0 { bias_strength } else { bias_strength / 2.0 };
                if m {
                    centre *= 1.0 - 2.0 * strength;
                }
            }
        }
        let mut row = Vec::with_capacity(d);
        for _ in 0..INFORMATIVE {
            row.push(centre + gaussian(rng));
        }
        for (j, mask) in masks.iter_mut().enumerate() {
            row.push(if member[j] { 1.0 } else { 0.0 });
            mask.push(member[j]);
        }
        rows.push(row);
        labels.push(label);
    }

    let attributes: Vec<ProtectedAttribute> =
        masks.into_iter().enumerate().map(|(j, mask)| ProtectedAttribute { name: format!("s{j}"), mask }).collect();
    for a in &attributes {
        let c = crate::dataset::GroupCounts::tally(&a.mask, &labels);
        for (cell, count) in [
            ("protected/+", c.protected_pos),
            ("unprotected/+", c.unprotected_pos),
            ("protected/-", c.protected_neg),
            ("unprotected/-", c.unprotected_neg),
        ] {
            if count == 0 {
                return Ok(Err(format!("{}:{cell}", a.name)));
            }
        }
    }

    let mut names: Vec<String> = (0..INFORMATIVE).map(|f| format!("x{f}")).collect();
    names.extend((0..k_attrs).map(|j| format!("s{j}_member")));
    Dataset::new(names, rows, labels, attributes).map(Ok)
}
