//! In-memory labelled data with binary protected-group masks.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::math;

/// Binary class label. `Positive` is +1 and, by convention, the minority class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// +1.0 or -1.0.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    /// Sign of a real-valued margin with `sign(0) = +1`.
    #[inline]
    pub fn from_margin(margin: f64) -> Self {
        if margin >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    #[inline]
    pub fn flip(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        match l {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = crate::Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => bail!(Argument, "label must be +1 or -1, got {other}"),
        }
    }
}

/// One protected attribute: `mask[i]` is true iff instance `i` is in the protected group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtectedAttribute {
    pub name: String,
    pub mask: Vec<bool>,
}

/// Group-by-class cardinalities for one protected attribute.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub protected_pos: usize,
    pub unprotected_pos: usize,
    pub protected_neg: usize,
    pub unprotected_neg: usize,
}

impl GroupCounts {
    pub fn tally(mask: &[bool], labels: &[Label]) -> Self {
        let mut c = GroupCounts::default();
        for (&m, &y) in mask.iter().zip(labels) {
            match (m, y) {
                (true, Label::Positive) => c.protected_pos += 1,
                (false, Label::Positive) => c.unprotected_pos += 1,
                (true, Label::Negative) => c.protected_neg += 1,
                (false, Label::Negative) => c.unprotected_neg += 1,
            }
        }
        c
    }

    /// Cardinality of (group, class).
    pub fn get(&self, protected: bool, label: Label) -> usize {
        match (protected, label) {
            (true, Label::Positive) => self.protected_pos,
            (false, Label::Positive) => self.unprotected_pos,
            (true, Label::Negative) => self.protected_neg,
            (false, Label::Negative) => self.unprotected_neg,
        }
    }
}

/// Feature matrix, ±1 labels and protected-group masks.
///
/// Immutable once built. Columns are stored alongside their ascending sort
/// order so weak learners can sweep thresholds without re-sorting every round.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    rows: Vec<f64>,
    columns: Vec<Vec<f64>>,
    sorted: Vec<Vec<u32>>,
    labels: Vec<Label>,
    attributes: Vec<ProtectedAttribute>,
    counts: Vec<GroupCounts>,
}

impl Dataset {
    /// Builds a dataset from row-major features.
    ///
    /// Fails on shape mismatches, non-finite features, missing or duplicate
    /// protected attributes, or when either class is empty.
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<Label>,
        attributes: Vec<ProtectedAttribute>,
    ) -> Result<Self> {
        let d = feature_names.len();
        let mut flat = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                bail!(Argument, "row {i} has {} features, expected {d}", row.len());
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(feature_names, flat, labels, attributes, true)
    }

    pub(crate) fn from_flat(
        feature_names: Vec<String>,
        rows: Vec<f64>,
        labels: Vec<Label>,
        attributes: Vec<ProtectedAttribute>,
        require_both_classes: bool,
    ) -> Result<Self> {
        let n = labels.len();
        let d = feature_names.len();
        if n == 0 {
            bail!(DegenerateData, "dataset has no instances");
        }
        if d == 0 {
            bail!(Argument, "dataset has no features");
        }
        if rows.len() != n * d {
            bail!(Argument, "feature matrix has {} values, expected {n}x{d}", rows.len());
        }
        if let Some(pos) = rows.iter().position(|v| !v.is_finite()) {
            bail!(Argument, "non-finite feature value at row {}, column {}", pos / d, pos % d);
        }
        if attributes.is_empty() {
            bail!(Argument, "at least one protected attribute is required");
        }
        for (j, a) in attributes.iter().enumerate() {
            if a.mask.len() != n {
                bail!(Argument, "mask '{}' has length {}, expected {n}", a.name, a.mask.len());
            }
            if attributes[..j].iter().any(|b| b.name == a.name) {
                bail!(Argument, "duplicate protected attribute '{}'", a.name);
            }
        }
        if require_both_classes {
            let pos = labels.iter().filter(|l| l.is_positive()).count();
            if pos == 0 || pos == n {
                bail!(DegenerateData, "both classes must be present ({pos} positive of {n})");
            }
        }

        let columns: Vec<Vec<f64>> = (0..d).map(|f| (0..n).map(|i| rows[i * d + f]).collect()).collect();
        let sorted = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..n as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
                idx
            })
            .collect();
        let counts = attributes.iter().map(|a| GroupCounts::tally(&a.mask, &labels)).collect();

        Ok(Dataset { feature_names, rows, columns, sorted, labels, attributes, counts })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.rows[i * d..(i + 1) * d]
    }

    pub fn column(&self, f: usize) -> &[f64] {
        &self.columns[f]
    }

    /// Instance indices ordered by ascending value of feature `f` (ties by index).
    pub fn sorted_order(&self, f: usize) -> &[u32] {
        &self.sorted[f]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn attributes(&self) -> &[ProtectedAttribute] {
        &self.attributes
    }

    pub fn counts(&self) -> &[GroupCounts] {
        &self.counts
    }

    pub fn class_count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Minority-to-majority class size ratio.
    pub fn imbalance_ratio(&self) -> f64 {
        let pos = self.class_count(Label::Positive) as f64;
        let neg = self.class_count(Label::Negative) as f64;
        let (lo, hi) = if pos < neg { (pos, neg) } else { (neg, pos) };
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    /// Fails with `DegenerateData` unless both classes are present.
    pub fn require_both_classes(&self) -> Result<()> {
        let pos = self.class_count(Label::Positive);
        if pos == 0 || pos == self.len() {
            bail!(DegenerateData, "both classes must be present ({pos} positive of {})", self.len());
        }
        Ok(())
    }

    /// Copy of the instances at `indices`, in the given order.
    ///
    /// The result may contain a single class; operations that need both
    /// classes check for it themselves.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let d = self.n_features();
        let mut rows = Vec::with_capacity(indices.len() * d);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                bail!(Argument, "index {i} out of range for {} instances", self.len());
            }
            rows.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        let attributes = self
            .attributes
            .iter()
            .map(|a| ProtectedAttribute { name: a.name.clone(), mask: indices.iter().map(|&i| a.mask[i]).collect() })
            .collect();
        Dataset::from_flat(self.feature_names.clone(), rows, labels, attributes, false)
    }
}

/// Result of [`split`].
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// False when a class had fewer than two instances and the split fell back
    /// to a plain shuffle.
    pub stratified: bool,
}

fn test_size(n: usize, fraction: f64) -> usize {
    (math::round(fraction * n as f64) as usize).clamp(1, n - 1)
}

/// Seeded, class-stratified train/test partition.
///
/// Each class contributes `round(fraction * n_c)` instances to the test part,
/// clamped so both parts receive at least one. If a class has fewer than two
/// instances the whole index set is shuffled instead and `stratified` is false.
/// Both parts keep the original instance order.
pub fn split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        bail!(Argument, "test fraction must lie in (0, 1), got {test_fraction}");
    }
    let n = dataset.len();
    if n < 2 {
        bail!(Argument, "cannot split {n} instance(s) into two non-empty parts");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..n).filter(|&i| dataset.labels[i].is_positive()).collect();
    let mut neg: Vec<usize> = (0..n).filter(|&i| !dataset.labels[i].is_positive()).collect();

    let stratified = pos.len() >= 2 && neg.len() >= 2;
    let (mut train_idx, mut test_idx) = (Vec::new(), Vec::new());
    if stratified {
        for class in [&mut pos, &mut neg] {
            class.shuffle(&mut rng);
            let k = test_size(class.len(), test_fraction);
            test_idx.extend_from_slice(&class[..k]);
            train_idx.extend_from_slice(&class[k..]);
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        let k = test_size(n, test_fraction);
        test_idx.extend_from_slice(&all[..k]);
        train_idx.extend_from_slice(&all[k..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    Ok(Split {
        train: dataset.subset(&train_idx)?,
        test: dataset.subset(&test_idx)?,
        train_indices: train_idx,
        test_indices: test_idx,
        stratified,
    })
}
