//! The fairness-boosted AdaBoost loop.
//!
//! Each round trains a stump on the current distribution, appends it to the
//! partial ensemble `H_t`, measures the signed group rate gaps of `H_t` on the
//! training set, and multiplies the usual exponential reweighting by a
//! per-instance fairness cost in `[1, 2]`. Instances misclassified by `H_t`
//! that belong to the group currently disadvantaged in their class receive
//! `1 + |gap|`; everything else receives 1. Every partial ensemble's
//! objective vector is recorded for post-training Pareto selection.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{split, Dataset, Label};
use crate::error::{bail, Error, Result};
use crate::math;
use crate::metrics::{attribute_deltas, objective_vector, SolutionVector};
use crate::stump::{train_stump, Stump};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Distribution update boosted by fairness costs.
    MultiFair,
    /// Plain AdaBoost (every fairness cost is 1).
    Vanilla,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::MultiFair => "multi_fair",
            Mode::Vanilla => "vanilla",
        }
    }
}

impl core::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multi_fair" | "multi-fair" => Ok(Mode::MultiFair),
            "vanilla" => Ok(Mode::Vanilla),
            other => bail!(Argument, "unknown mode '{other}' (expected multi_fair or vanilla)"),
        }
    }
}

/// Which instances the per-round objective vectors are measured on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveSplit {
    /// The training instances themselves.
    Train,
    /// A stratified holdout carved out of the training data; stumps never see it.
    Holdout { fraction: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub rounds: usize,
    pub mode: Mode,
    pub objective_split: ObjectiveSplit,
    pub alpha_cap: f64,
    pub epsilon_floor: f64,
    pub seed: u64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            rounds: 500,
            mode: Mode::MultiFair,
            objective_split: ObjectiveSplit::Train,
            alpha_cap: 0.5 * math::ln(1e10),
            epsilon_floor: 1e-10,
            seed: 0,
        }
    }
}

impl BoostConfig {
    pub fn new(rounds: usize, mode: Mode) -> Self {
        BoostConfig { rounds, mode, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            bail!(Argument, "rounds must be at least 1");
        }
        if !(self.epsilon_floor > 0.0 && self.epsilon_floor < 0.5) {
            bail!(Argument, "epsilon_floor must lie in (0, 0.5), got {}", self.epsilon_floor);
        }
        if self.alpha_cap.is_nan() || self.alpha_cap <= 0.0 {
            bail!(Argument, "alpha_cap must be positive, got {}", self.alpha_cap);
        }
        if let ObjectiveSplit::Holdout { fraction, .. } = self.objective_split {
            if !(fraction > 0.0 && fraction < 1.0) {
                bail!(Argument, "holdout fraction must lie in (0, 1), got {fraction}");
            }
        }
        Ok(())
    }

    pub fn alpha(&self, weighted_error: f64) -> f64 {
        alpha(weighted_error, self.epsilon_floor, self.alpha_cap)
    }
}

/// Learner weight `0.5 * ln((1 - e) / e)` with `e` clamped into
/// `[floor, 0.5 - floor]` and the result capped at `cap`.
pub fn alpha(weighted_error: f64, epsilon_floor: f64, alpha_cap: f64) -> f64 {
    let e = weighted_error.clamp(epsilon_floor, 0.5 - epsilon_floor);
    (0.5 * math::ln((1.0 - e) / e)).min(alpha_cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub stump: Stump,
    pub alpha: f64,
}

/// Ordered weak learners; a prefix of length `t` is the partial ensemble `H_t`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub members: Vec<Member>,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The first `t` members.
    pub fn prefix(&self, t: usize) -> &[Member] {
        &self.members[..t.min(self.members.len())]
    }
}

/// Unnormalized margin `sum_l alpha_l * h_l(x)`, accumulated in member order.
#[inline]
pub fn margin(members: &[Member], row: &[f64]) -> f64 {
    let mut m = 0.0;
    for member in members {
        if member.stump.predict_row(row) == Label::Positive {
            m += member.alpha;
        } else {
            m -= member.alpha;
        }
    }
    m
}

/// Margins of every instance of `dataset`.
pub fn margins(members: &[Member], dataset: &Dataset) -> Vec<f64> {
    let mut out = vec![0.0; dataset.len()];
    for member in members {
        let col = dataset.column(member.stump.feature);
        for (m, &x) in out.iter_mut().zip(col) {
            let pred = if x > member.stump.threshold { member.stump.polarity } else { member.stump.polarity.flip() };
            if pred == Label::Positive {
                *m += member.alpha;
            } else {
                *m -= member.alpha;
            }
        }
    }
    out
}

/// Hard labels of the partial ensemble (`sign(0) = +1`).
pub fn predict_labels(members: &[Member], dataset: &Dataset) -> Vec<Label> {
    margins(members, dataset).into_iter().map(Label::from_margin).collect()
}

/// Margins normalized by `sum alpha`, in `[-1, 1]`.
pub fn scores(members: &[Member], dataset: &Dataset) -> Result<Vec<f64>> {
    let total = alpha_sum(members)?;
    Ok(margins(members, dataset).into_iter().map(|m| m / total).collect())
}

fn alpha_sum(members: &[Member]) -> Result<f64> {
    if members.is_empty() {
        bail!(Argument, "ensemble prefix is empty");
    }
    Ok(members.iter().map(|m| m.alpha).sum())
}

/// Label and normalized score of one feature vector.
pub fn predict(members: &[Member], features: &[f64]) -> Result<(Label, f64)> {
    let total = alpha_sum(members)?;
    if let Some(m) = members.iter().find(|m| m.stump.feature >= features.len()) {
        bail!(Argument, "stump feature {} out of range for a {}-feature vector", m.stump.feature, features.len());
    }
    let raw = margin(members, features);
    Ok((Label::from_margin(raw), raw / total))
}

/// Signed group rate gaps of one attribute for a partial ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeDelta {
    pub delta_fnr: f64,
    pub delta_fpr: f64,
}

impl AttributeDelta {
    /// `max(|delta_fnr|, |delta_fpr|)`.
    pub fn magnitude(&self) -> f64 {
        self.delta_fnr.abs().max(self.delta_fpr.abs())
    }
}

/// Cumulative gaps of `H_t` (its hard predictions on `dataset`), one per attribute.
pub fn cumulative_deltas(members: &[Member], dataset: &Dataset) -> Result<Vec<AttributeDelta>> {
    if members.is_empty() {
        bail!(Argument, "ensemble prefix is empty");
    }
    deltas_of(&predict_labels(members, dataset), dataset)
}

fn deltas_of(predictions: &[Label], dataset: &Dataset) -> Result<Vec<AttributeDelta>> {
    Ok(attribute_deltas(predictions, dataset)?
        .into_iter()
        .map(|(delta_fnr, delta_fpr)| AttributeDelta { delta_fnr, delta_fpr })
        .collect())
}

/// Discrimination cost of one instance for one attribute.
///
/// A positive (negative) instance in the group whose false negative (false
/// positive) rate is at least the other group's gets `1 + |gap|`; otherwise 1.
#[inline]
pub fn discrimination_cost(label: Label, protected: bool, delta: &AttributeDelta) -> f64 {
    let gap = match label {
        Label::Positive => delta.delta_fnr,
        Label::Negative => delta.delta_fpr,
    };
    if (gap >= 0.0 && protected) || (gap <= 0.0 && !protected) {
        1.0 + gap.abs()
    } else {
        1.0
    }
}

/// Discrimination costs of instance `i` for every attribute.
pub fn discrimination_costs(dataset: &Dataset, i: usize, deltas: &[AttributeDelta]) -> Vec<f64> {
    let y = dataset.labels()[i];
    dataset.attributes().iter().zip(deltas).map(|(a, d)| discrimination_cost(y, a.mask[i], d)).collect()
}

/// Fairness cost: the largest discrimination cost if `H_t` misclassifies the
/// instance, 1 otherwise.
pub fn fairness_cost(label: Label, ensemble_prediction: Label, memberships: &[bool], deltas: &[AttributeDelta]) -> f64 {
    if ensemble_prediction == label {
        return 1.0;
    }
    memberships.iter().zip(deltas).map(|(&m, d)| discrimination_cost(label, m, d)).fold(1.0, f64::max)
}

/// `D_t(i) = D_{t-1}(i) * fc(i) * exp(-alpha * s_i) / Z_t`, `s_i = +1` iff the
/// stump is correct on `i`.
pub fn update_distribution(
    prev: &[f64],
    fairness_costs: &[f64],
    alpha: f64,
    stump_predictions: &[Label],
    labels: &[Label],
) -> Result<Vec<f64>> {
    let n = prev.len();
    if fairness_costs.len() != n || stump_predictions.len() != n || labels.len() != n {
        bail!(Argument, "distribution update inputs have mismatched lengths");
    }
    let mut next: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        let s = if stump_predictions[i] == labels[i] { 1.0 } else { -1.0 };
        next.push(prev[i] * fairness_costs[i] * math::exp(-alpha * s));
    }
    let z: f64 = next.iter().sum();
    if !(z.is_finite() && z > 0.0) {
        bail!(Internal, "normalizer Z_t = {z}");
    }
    for w in &mut next {
        *w /= z;
    }
    Ok(next)
}

/// Why the boosting loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    /// The stump of `round` was no better than chance and was discarded.
    ChanceLevel {
        round: usize,
        weighted_error: f64,
    },
}

/// Everything recorded by [`train`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub config: BoostConfig,
    pub attribute_names: Vec<String>,
    pub ensemble: Ensemble,
    /// `solutions[t - 1]` belongs to `H_t`.
    pub solutions: Vec<SolutionVector>,
    /// `fairness_deltas[t - 1][j]`: cumulative gaps of `H_t` for attribute `j`.
    pub fairness_deltas: Vec<Vec<AttributeDelta>>,
    pub final_weights: Vec<f64>,
    pub stop: StopReason,
}

impl TrainingTrace {
    pub fn rounds(&self) -> usize {
        self.solutions.len()
    }

    /// Partial ensemble `H_t` (1-based).
    pub fn prefix(&self, t: usize) -> &[Member] {
        self.ensemble.prefix(t)
    }
}

/// Per-round snapshot handed to [`train_with_observer`].
pub struct RoundRecord<'a> {
    pub round: usize,
    pub member: &'a Member,
    /// Fairness cost applied to each training instance this round.
    pub fairness_costs: &'a [f64],
    /// Labels of `H_t` on the training instances.
    pub ensemble_predictions: &'a [Label],
    pub deltas: &'a [AttributeDelta],
    /// Distribution the stump was trained on.
    pub previous_distribution: &'a [f64],
    pub distribution: &'a [f64],
    pub solution: &'a SolutionVector,
}

/// Runs the boosting loop. See [`train_with_observer`].
pub fn train(dataset: &Dataset, config: &BoostConfig) -> Result<TrainingTrace> {
    train_with_observer(dataset, config, |_| {})
}

/// Runs up to `config.rounds` rounds, calling `observe` after each one.
///
/// Training ends early when a stump's weighted error reaches
/// `0.5 - epsilon_floor`; that stump is discarded. If this happens in the
/// first round no ensemble exists and a training error is returned.
pub fn train_with_observer<F>(dataset: &Dataset, config: &BoostConfig, mut observe: F) -> Result<TrainingTrace>
where
    F: FnMut(&RoundRecord<'_>),
{
    config.validate()?;
    dataset.require_both_classes()?;

    let holdout;
    let (fit, objective_set) = match config.objective_split {
        ObjectiveSplit::Train => (dataset, dataset),
        ObjectiveSplit::Holdout { fraction, seed } => {
            holdout = split(dataset, fraction, seed)?;
            holdout.train.require_both_classes()?;
            holdout.test.require_both_classes()?;
            (&holdout.train, &holdout.test)
        }
    };
    let separate_objective_set = !core::ptr::eq(fit, objective_set);

    let n = fit.len();
    let labels = fit.labels();
    let memberships: Vec<Vec<bool>> = (0..n).map(|i| fit.attributes().iter().map(|a| a.mask[i]).collect()).collect();

    let mut distribution = vec![1.0 / n as f64; n];
    let mut fit_margins = vec![0.0; n];
    let mut objective_margins = vec![0.0; objective_set.len()];
    let mut ensemble = Ensemble::default();
    let mut solutions = Vec::with_capacity(config.rounds);
    let mut fairness_deltas = Vec::with_capacity(config.rounds);
    let mut fcs = vec![1.0; n];
    let mut stop = StopReason::Completed;

    for round in 1..=config.rounds {
        let stump = train_stump(fit, &distribution)?;
        let error = stump.weighted_error;
        if error >= 0.5 - config.epsilon_floor {
            if round == 1 {
                bail!(
                    Training,
                    "first weak learner is no better than chance (weighted error {error}, feature {}, {} instances)",
                    stump.feature,
                    n
                );
            }
            stop = StopReason::ChanceLevel { round, weighted_error: error };
            break;
        }
        let member = Member { stump, alpha: config.alpha(error) };
        ensemble.members.push(member);

        let stump_preds = stump.predict_all(fit);
        accumulate(&mut fit_margins, &stump_preds, member.alpha);
        let ensemble_preds: Vec<Label> = fit_margins.iter().map(|&m| Label::from_margin(m)).collect();
        let deltas = deltas_of(&ensemble_preds, fit)?;

        match config.mode {
            Mode::Vanilla => fcs.iter_mut().for_each(|c| *c = 1.0),
            Mode::MultiFair => {
                for i in 0..n {
                    fcs[i] = fairness_cost(labels[i], ensemble_preds[i], &memberships[i], &deltas);
                }
            }
        }
        let next = update_distribution(&distribution, &fcs, member.alpha, &stump_preds, labels)?;

        let solution = if separate_objective_set {
            accumulate(&mut objective_margins, &stump.predict_all(objective_set), member.alpha);
            let preds: Vec<Label> = objective_margins.iter().map(|&m| Label::from_margin(m)).collect();
            objective_vector(&preds, objective_set, round)?
        } else {
            objective_vector(&ensemble_preds, objective_set, round)?
        };

        observe(&RoundRecord {
            round,
            member: &member,
            fairness_costs: &fcs,
            ensemble_predictions: &ensemble_preds,
            deltas: &deltas,
            previous_distribution: &distribution,
            distribution: &next,
            solution: &solution,
        });

        distribution = next;
        solutions.push(solution);
        fairness_deltas.push(deltas);
    }

    Ok(TrainingTrace {
        config: config.clone(),
        attribute_names: dataset.attributes().iter().map(|a| a.name.clone()).collect(),
        ensemble,
        solutions,
        fairness_deltas,
        final_weights: distribution,
        stop,
    })
}

fn accumulate(margins: &mut [f64], preds: &[Label], alpha: f64) {
    for (m, &p) in margins.iter_mut().zip(preds) {
        if p == Label::Positive {
            *m += alpha;
        } else {
            *m -= alpha;
        }
    }
}

/// Re-evaluates the objective vector of `H_t` on `dataset`.
pub fn prefix_solution(members: &[Member], dataset: &Dataset) -> Result<SolutionVector> {
    if members.is_empty() {
        bail!(Argument, "ensemble prefix is empty");
    }
    objective_vector(&predict_labels(members, dataset), dataset, members.len())
}

/// Human-readable reason string for a stop condition.
pub fn describe_stop(stop: &StopReason) -> String {
    match stop {
        StopReason::Completed => String::from("completed all rounds"),
        StopReason::ChanceLevel { round, weighted_error } => {
            format!("stopped at round {round}: weak learner error {weighted_error:.6} is at chance level")
        }
    }
}
