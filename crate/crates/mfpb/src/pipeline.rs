//! Split, train, extract the front, select, evaluate: everything `train`
//! does short of touching the file system.

use mfpb_core::dataset::split;
use mfpb_core::eval::evaluate_prefixes;
use mfpb_core::pareto::{after_burn_in, pareto_front, select, ParetoFront, PreferenceVector};
use mfpb_core::{BoostConfig, Dataset, EvalReport, Split, TrainingTrace};

use crate::bundle::{BundleMeta, EvalEntry, ParetoBundle, Selected};
use crate::error::{CoreContext, Result};
use crate::model::{ModelFile, RunEcho};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub boost: BoostConfig,
    pub test_fraction: f64,
    /// Rounds dropped before front extraction.
    pub burn_in: usize,
    pub preference: PreferenceVector,
}

pub struct PipelineOutput {
    pub split: Split,
    pub trace: TrainingTrace,
    pub front: ParetoFront,
    pub selected_round: usize,
    /// Test-split report of the selected ensemble.
    pub selected_eval: EvalReport,
    pub bundle: ParetoBundle,
    pub model: ModelFile,
}

/// Runs the full pipeline on `dataset`. The split and training both use
/// `config.boost.seed`.
pub fn run(dataset: &Dataset, dataset_name: &str, config: &PipelineConfig) -> Result<PipelineOutput> {
    let seed = config.boost.seed;
    let parts = split(dataset, config.test_fraction, seed).ctx("data")?;
    parts.train.require_both_classes().ctx("data")?;
    parts.test.require_both_classes().ctx("data")?;

    let trace = mfpb_core::boost::train(&parts.train, &config.boost).ctx("boost")?;
    let candidates = after_burn_in(&trace.solutions, config.burn_in).ctx("pareto")?;
    let front = pareto_front(&candidates).ctx("pareto")?;
    let selected_round = select(&front, &config.preference).ctx("pareto")?.solution.round;

    let rounds: Vec<usize> = front.rounds().collect();
    let reports = evaluate_prefixes(&trace.ensemble.members, &parts.test, &rounds).ctx("eval")?;
    let selected_eval =
        reports[rounds.iter().position(|&r| r == selected_round).expect("selection comes from the front")].clone();

    let bundle = ParetoBundle {
        meta: BundleMeta {
            dataset: dataset_name.to_string(),
            rounds: config.boost.rounds,
            mode: config.boost.mode.as_str().to_string(),
            seed,
        },
        solutions: trace.solutions.clone(),
        front_indices: rounds.iter().map(|r| r - 1).collect(),
        pseudo_weights: front.entries.iter().map(|e| e.pseudo_weight).collect(),
        selected: Selected { round: selected_round, preference: config.preference.components() },
        eval: rounds.iter().zip(&reports).map(|(&r, rep)| EvalEntry::new(r, rep)).collect(),
    };
    let echo = RunEcho {
        boost: config.boost.clone(),
        test_fraction: config.test_fraction,
        burn_in: config.burn_in,
        preference: config.preference.components(),
    };
    let model = ModelFile::new(echo, dataset.feature_names(), &trace, selected_round);

    Ok(PipelineOutput { split: parts, trace, front, selected_round, selected_eval, bundle, model })
}
