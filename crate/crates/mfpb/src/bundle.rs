//! `bundle.json`: the training run's solutions, Pareto front, selection and
//! per-front-member evaluation. The explorer reads exactly these fields.

use std::path::Path;

use mfpb_core::pareto::{self, FrontEntry, ParetoFront, PreferenceVector};
use mfpb_core::{AttributeFairness, EvalReport, SolutionVector};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CoreContext, Result};
use crate::json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleMeta {
    pub dataset: String,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub mode: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selected {
    pub round: usize,
    pub preference: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalEntry {
    pub round: usize,
    pub acc: f64,
    pub wc_acc: f64,
    pub auc: f64,
    pub gm: f64,
    pub mmm: f64,
    pub per_attribute: Vec<AttributeFairness>,
}

impl EvalEntry {
    pub fn new(round: usize, r: &EvalReport) -> Self {
        EvalEntry {
            round,
            acc: r.acc,
            wc_acc: r.wc_acc,
            auc: r.auc,
            gm: r.gm,
            mmm: r.fairness.mmm,
            per_attribute: r.fairness.per_attribute.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParetoBundle {
    pub meta: BundleMeta,
    /// Every round's objective vector, `solutions[t - 1]` for round `t`.
    pub solutions: Vec<SolutionVector>,
    /// Indices into `solutions` of the front members, ascending.
    pub front_indices: Vec<usize>,
    /// Aligned with `front_indices`.
    pub pseudo_weights: Vec<[f64; 3]>,
    pub selected: Selected,
    /// Aligned with `front_indices`; measured on the test split.
    pub eval: Vec<EvalEntry>,
}

impl ParetoBundle {
    pub fn load(path: &Path) -> Result<Self> {
        let b: ParetoBundle = json::read(path)?;
        b.validate().map_err(|message| CliError::Schema { path: path.to_path_buf(), message })?;
        Ok(b)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        json::write(path, self)
    }

    /// Cross-field consistency beyond what the JSON types enforce.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.solutions.len();
        if n == 0 {
            return Err("solutions: empty".into());
        }
        for (i, s) in self.solutions.iter().enumerate() {
            if s.round != i + 1 {
                return Err(format!("solutions[{i}].round: expected {}, found {}", i + 1, s.round));
            }
        }
        let k = self.front_indices.len();
        if k == 0 {
            return Err("front_indices: empty".into());
        }
        if let Some(i) = self.front_indices.iter().position(|&i| i >= n) {
            return Err(format!("front_indices[{i}]: {} out of range for {n} solutions", self.front_indices[i]));
        }
        if self.front_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err("front_indices: not strictly ascending".into());
        }
        if self.pseudo_weights.len() != k {
            return Err(format!("pseudo_weights: {} entries for {k} front members", self.pseudo_weights.len()));
        }
        if self.eval.len() != k {
            return Err(format!("eval: {} entries for {k} front members", self.eval.len()));
        }
        for (j, (&i, e)) in self.front_indices.iter().zip(&self.eval).enumerate() {
            if e.round != i + 1 {
                return Err(format!("eval[{j}].round: expected {}, found {}", i + 1, e.round));
            }
        }
        if !self.front_indices.iter().any(|&i| i + 1 == self.selected.round) {
            return Err(format!("selected.round: {} is not a front member", self.selected.round));
        }
        Ok(())
    }

    /// The stored front with its stored pseudo-weights.
    pub fn front(&self) -> ParetoFront {
        ParetoFront {
            entries: self
                .front_indices
                .iter()
                .zip(&self.pseudo_weights)
                .map(|(&i, &w)| FrontEntry { solution: self.solutions[i], pseudo_weight: w })
                .collect(),
            source_count: self.solutions.len(),
        }
    }

    /// Re-runs selection on the stored front.
    pub fn select(&self, preference: &PreferenceVector) -> Result<usize> {
        let front = self.front();
        Ok(pareto::select(&front, preference).ctx("pareto")?.solution.round)
    }

    pub fn eval_for(&self, round: usize) -> Option<&EvalEntry> {
        self.eval.iter().find(|e| e.round == round)
    }
}

/// Golden selection vectors for the explorer's parity tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenFile {
    pub cases: Vec<GoldenCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenCase {
    pub preference: [f64; 3],
    pub expected_round: usize,
}
