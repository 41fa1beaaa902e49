//! Group error rates and the disparate-mistreatment family of fairness measures.
//!
//! For one protected attribute with protected group `s` and its complement
//! `ns`:
//!
//! * `dm  = |fpr_s - fpr_ns| + |fnr_s - fnr_ns|`
//! * `cdm = | |fpr_s - fnr_s| - |fpr_ns - fnr_ns| |`
//! * `mmm = max_j max(|delta_fnr_j|, |delta_fpr_j|)` over all attributes.
//!
//! A rate whose group-and-class cell is empty is undefined. It is carried as
//! `None`, counts as 0 in every aggregate, and sets the `undefined_rates` flag.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{bail, Result};

/// Default tolerance for the class-bias test (`|cdm - dm| <= tol`).
pub const CLASS_BIAS_TOL: f64 = 1e-9;

/// False positive / false negative rates of one attribute's two groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupRates {
    pub fpr_s: Option<f64>,
    pub fnr_s: Option<f64>,
    pub fpr_ns: Option<f64>,
    pub fnr_ns: Option<f64>,
    /// `fpr_s - fpr_ns`, undefined rates read as 0.
    pub delta_fpr: f64,
    /// `fnr_s - fnr_ns`, undefined rates read as 0.
    pub delta_fnr: f64,
}

impl GroupRates {
    pub fn new(fpr_s: Option<f64>, fnr_s: Option<f64>, fpr_ns: Option<f64>, fnr_ns: Option<f64>) -> Self {
        let z = |r: Option<f64>| r.unwrap_or(0.0);
        GroupRates { fpr_s, fnr_s, fpr_ns, fnr_ns, delta_fpr: z(fpr_s) - z(fpr_ns), delta_fnr: z(fnr_s) - z(fnr_ns) }
    }

    /// All four rates defined.
    pub fn from_rates(fpr_s: f64, fnr_s: f64, fpr_ns: f64, fnr_ns: f64) -> Self {
        Self::new(Some(fpr_s), Some(fnr_s), Some(fpr_ns), Some(fnr_ns))
    }

    pub fn has_undefined(&self) -> bool {
        self.fpr_s.is_none() || self.fnr_s.is_none() || self.fpr_ns.is_none() || self.fnr_ns.is_none()
    }

    /// `(fpr_s, fnr_s, fpr_ns, fnr_ns)` with undefined rates as 0.
    fn filled(&self) -> (f64, f64, f64, f64) {
        let z = |r: Option<f64>| r.unwrap_or(0.0);
        (z(self.fpr_s), z(self.fnr_s), z(self.fpr_ns), z(self.fnr_ns))
    }

    /// Larger of the two absolute deltas; this attribute's contribution to MMM.
    pub fn max_abs_delta(&self) -> f64 {
        self.delta_fnr.abs().max(self.delta_fpr.abs())
    }
}

fn check_lengths(predictions: &[Label], labels: &[Label], mask: Option<&[bool]>) -> Result<()> {
    if predictions.len() != labels.len() {
        bail!(Argument, "{} predictions for {} labels", predictions.len(), labels.len());
    }
    if let Some(mask) = mask {
        if mask.len() != labels.len() {
            bail!(Argument, "mask has length {}, expected {}", mask.len(), labels.len());
        }
    }
    Ok(())
}

/// Group-conditional error rates of `predictions` for the split given by `mask`.
///
/// `fnr = P(pred = -1 | group, y = +1)`, `fpr = P(pred = +1 | group, y = -1)`.
pub fn group_rates(predictions: &[Label], labels: &[Label], mask: &[bool]) -> Result<GroupRates> {
    check_lengths(predictions, labels, Some(mask))?;
    // [group][class] -> (errors, total); group 0 = protected, class 0 = positive
    let mut cells = [[(0usize, 0usize); 2]; 2];
    for ((&p, &y), &m) in predictions.iter().zip(labels).zip(mask) {
        let g = usize::from(!m);
        let c = usize::from(!y.is_positive());
        cells[g][c].1 += 1;
        if p != y {
            cells[g][c].0 += 1;
        }
    }
    let rate = |(err, total): (usize, usize)| (total > 0).then(|| err as f64 / total as f64);
    Ok(GroupRates::new(rate(cells[0][1]), rate(cells[0][0]), rate(cells[1][1]), rate(cells[1][0])))
}

/// Disparate mistreatment: `|delta_fpr| + |delta_fnr|`, in `[0, 2]`.
pub fn dm(rates: &GroupRates) -> f64 {
    rates.delta_fpr.abs() + rates.delta_fnr.abs()
}

/// Class-aware disparate mistreatment, in `[0, 1]`. Never exceeds [`dm`].
pub fn cdm(rates: &GroupRates) -> f64 {
    let (fpr_s, fnr_s, fpr_ns, fnr_ns) = rates.filled();
    ((fpr_s - fnr_s).abs() - (fpr_ns - fnr_ns).abs()).abs()
}

/// True when `cdm == dm > 0` (within `tol`): the mistreatment falls on one class only.
pub fn class_biased(rates: &GroupRates, tol: f64) -> bool {
    let d = dm(rates);
    (cdm(rates) - d).abs() <= tol && d > tol
}

/// Multi-max mistreatment over all protected attributes, in `[0, 1]`.
pub fn mmm(all_rates: &[GroupRates]) -> Result<f64> {
    if all_rates.is_empty() {
        bail!(Argument, "mmm needs at least one attribute");
    }
    Ok(all_rates.iter().map(GroupRates::max_abs_delta).fold(0.0, f64::max))
}

/// Objective triple of one partial ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionVector {
    /// 1-based boosting round.
    pub round: usize,
    /// Mean 0-1 loss.
    pub o1: f64,
    /// Absolute gap between the per-class 0-1 losses.
    pub o2: f64,
    /// Multi-max mistreatment loss.
    pub o3: f64,
}

impl SolutionVector {
    pub fn objectives(&self) -> [f64; 3] {
        [self.o1, self.o2, self.o3]
    }

    /// True iff `self` is no worse on every objective and strictly better on one.
    pub fn dominates(&self, other: &SolutionVector) -> bool {
        let (a, b) = (self.objectives(), other.objectives());
        a.iter().zip(&b).all(|(x, y)| x <= y) && a.iter().zip(&b).any(|(x, y)| x < y)
    }
}

/// Evaluates the three objectives for `predictions` on `dataset`.
///
/// The fairness loss weighs each misclassified instance of class `c` by
/// `1 / #(s, c)` inside the protected group and `-1 / #(ns, c)` outside, so
/// the per-class sum is the signed rate gap of that class.
pub fn objective_vector(predictions: &[Label], dataset: &Dataset, round: usize) -> Result<SolutionVector> {
    let labels = dataset.labels();
    check_lengths(predictions, labels, None)?;

    let mut errors = [0usize; 2];
    let mut totals = [0usize; 2];
    for (&p, &y) in predictions.iter().zip(labels) {
        let c = usize::from(!y.is_positive());
        totals[c] += 1;
        if p != y {
            errors[c] += 1;
        }
    }
    if totals[0] == 0 || totals[1] == 0 {
        bail!(
            DegenerateData,
            "objective evaluation needs both classes ({} positive, {} negative)",
            totals[0],
            totals[1]
        );
    }
    let n = labels.len() as f64;
    let o1 = (errors[0] + errors[1]) as f64 / n;
    let o2 = (errors[0] as f64 / totals[0] as f64 - errors[1] as f64 / totals[1] as f64).abs();

    let mut o3: f64 = 0.0;
    for (attr, counts) in dataset.attributes().iter().zip(dataset.counts()) {
        let mut per_class = [0.0f64; 2];
        for ((&p, &y), &m) in predictions.iter().zip(labels).zip(&attr.mask) {
            if p == y {
                continue;
            }
            let card = counts.get(m, y) as f64;
            let signed = if m { card } else { -card };
            per_class[usize::from(!y.is_positive())] += 1.0 / signed;
        }
        o3 = o3.max(per_class[0].abs()).max(per_class[1].abs());
    }

    Ok(SolutionVector { round, o1, o2, o3 })
}

/// Fairness of one attribute, as serialized in reports and bundles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeFairness {
    pub attribute: String,
    pub fpr_s: Option<f64>,
    pub fnr_s: Option<f64>,
    pub fpr_ns: Option<f64>,
    pub fnr_ns: Option<f64>,
    pub delta_fpr: f64,
    pub delta_fnr: f64,
    pub dm: f64,
    pub cdm: f64,
    pub class_biased: bool,
    pub undefined_rates: bool,
}

impl AttributeFairness {
    pub fn from_rates(attribute: impl Into<String>, rates: &GroupRates) -> Self {
        AttributeFairness {
            attribute: attribute.into(),
            fpr_s: rates.fpr_s,
            fnr_s: rates.fnr_s,
            fpr_ns: rates.fpr_ns,
            fnr_ns: rates.fnr_ns,
            delta_fpr: rates.delta_fpr,
            delta_fnr: rates.delta_fnr,
            dm: dm(rates),
            cdm: cdm(rates),
            class_biased: class_biased(rates, CLASS_BIAS_TOL),
            undefined_rates: rates.has_undefined(),
        }
    }

    pub fn rates(&self) -> GroupRates {
        GroupRates::new(self.fpr_s, self.fnr_s, self.fpr_ns, self.fnr_ns)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub per_attribute: Vec<AttributeFairness>,
    pub mmm: f64,
}

impl FairnessReport {
    /// Builds a report from already computed rates, one `(name, rates)` per attribute.
    pub fn from_rates<'a, I>(rates: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, GroupRates)>,
    {
        let per_attribute: Vec<_> =
            rates.into_iter().map(|(name, r)| AttributeFairness::from_rates(name, &r)).collect();
        let all: Vec<GroupRates> = per_attribute.iter().map(AttributeFairness::rates).collect();
        Ok(FairnessReport { mmm: mmm(&all)?, per_attribute })
    }

    /// `mmm <= mu`.
    pub fn is_mmm_fair(&self, mu: f64) -> bool {
        self.mmm <= mu
    }

    pub fn has_undefined_rates(&self) -> bool {
        self.per_attribute.iter().any(|a| a.undefined_rates)
    }
}

/// Per-attribute rates and measures of `predictions` on `dataset`.
pub fn evaluate_fairness(predictions: &[Label], dataset: &Dataset) -> Result<FairnessReport> {
    let mut rates = Vec::with_capacity(dataset.attributes().len());
    for attr in dataset.attributes() {
        rates.push((attr.name.as_str(), group_rates(predictions, dataset.labels(), &attr.mask)?));
    }
    FairnessReport::from_rates(rates)
}

/// Signed `(delta_fnr, delta_fpr)` per attribute.
pub fn attribute_deltas(predictions: &[Label], dataset: &Dataset) -> Result<Vec<(f64, f64)>> {
    dataset
        .attributes()
        .iter()
        .map(|a| group_rates(predictions, dataset.labels(), &a.mask).map(|r| (r.delta_fnr, r.delta_fpr)))
        .collect()
}
