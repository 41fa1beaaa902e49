//! `model.json`: the trained ensemble and its training trace.

use std::path::Path;

use mfpb_core::boost::{describe_stop, AttributeDelta};
use mfpb_core::stump::threshold_serde;
use mfpb_core::{BoostConfig, Label, Member, SolutionVector, Stump, TrainingTrace};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelStump {
    pub feature: usize,
    pub feature_name: String,
    #[serde(with = "threshold_serde")]
    pub threshold: f64,
    pub polarity: Label,
    pub alpha: f64,
}

/// Settings of the run that produced the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEcho {
    pub boost: BoostConfig,
    pub test_fraction: f64,
    pub burn_in: usize,
    pub preference: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub config: RunEcho,
    pub feature_names: Vec<String>,
    pub attribute_names: Vec<String>,
    pub stumps: Vec<ModelStump>,
    /// Rounds are 1-based.
    pub solutions: Vec<SolutionVector>,
    /// Per round, one entry per protected attribute.
    pub fairness_deltas: Vec<Vec<AttributeDelta>>,
    pub selected_round: usize,
    pub stop: String,
}

impl ModelFile {
    pub fn new(run: RunEcho, feature_names: &[String], trace: &TrainingTrace, selected_round: usize) -> Self {
        let stumps = trace
            .ensemble
            .members
            .iter()
            .map(|m| ModelStump {
                feature: m.stump.feature,
                feature_name: feature_names[m.stump.feature].clone(),
                threshold: m.stump.threshold,
                polarity: m.stump.polarity,
                alpha: m.alpha,
            })
            .collect();
        ModelFile {
            config: run,
            feature_names: feature_names.to_vec(),
            attribute_names: trace.attribute_names.clone(),
            stumps,
            solutions: trace.solutions.clone(),
            fairness_deltas: trace.fairness_deltas.clone(),
            selected_round,
            stop: describe_stop(&trace.stop),
        }
    }

    /// The first `rounds` members, ready for prediction. Weighted errors are
    /// not stored and come back as 0.
    pub fn members(&self, rounds: usize) -> Vec<Member> {
        self.stumps
            .iter()
            .take(rounds)
            .map(|s| Member {
                stump: Stump { feature: s.feature, threshold: s.threshold, polarity: s.polarity, weighted_error: 0.0 },
                alpha: s.alpha,
            })
            .collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        json::read(path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        json::write(path, self)
    }
}
