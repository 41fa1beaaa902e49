//! Subcommand implementations. Each writes its human-readable output to
//! `out` and returns an error carrying the exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mfpb_core::eval::{evaluate_predictions, synth_biased, toy_report, SynthParams, ToyReport};
use mfpb_core::pareto::PreferenceVector;
use mfpb_core::{BoostConfig, EvalReport, Label, Mode, ObjectiveSplit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::{GoldenCase, GoldenFile, ParetoBundle};
use crate::data::{load_csv, write_csv, LoadedData};
use crate::error::{CliError, CoreContext, Result};
use crate::json;
use crate::pipeline::{self, PipelineConfig, PipelineOutput};
use crate::schema::DatasetSchema;

/// Parses `"u1,u2,u3"` into a normalized preference.
pub fn parse_preference(s: &str) -> Result<PreferenceVector> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("preference '{s}' must have three comma-separated components")));
    }
    let mut raw = [0.0; 3];
    for (r, p) in raw.iter_mut().zip(&parts) {
        *r = p.parse().map_err(|_| CliError::Usage(format!("preference component '{p}' is not a number")))?;
    }
    PreferenceVector::new(raw).ctx("pareto")
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub schema: PathBuf,
    pub data: PathBuf,
    pub rounds: usize,
    pub mode: Mode,
    pub preference: PreferenceVector,
    pub test_fraction: f64,
    pub seed: u64,
    pub burn_in: usize,
    /// Measure the objectives on this fraction of the training part instead
    /// of on the instances the stumps are fit to.
    pub objective_holdout: Option<f64>,
    pub output_dir: PathBuf,
}

pub fn train(args: &TrainArgs, out: &mut dyn Write) -> Result<PipelineOutput> {
    let schema = DatasetSchema::load(&args.schema)?;
    let LoadedData { dataset, dropped_lines, .. } = load_csv(&args.data, &schema)?;
    let objective_split = match args.objective_holdout {
        None => ObjectiveSplit::Train,
        Some(fraction) => ObjectiveSplit::Holdout { fraction, seed: args.seed },
    };
    let config = PipelineConfig {
        boost: BoostConfig { seed: args.seed, objective_split, ..BoostConfig::new(args.rounds, args.mode) },
        test_fraction: args.test_fraction,
        burn_in: args.burn_in,
        preference: args.preference,
    };
    let name =
        args.data.file_name().map_or_else(|| args.data.display().to_string(), |n| n.to_string_lossy().into_owned());
    let result = pipeline::run(&dataset, &name, &config)?;

    create_dir(&args.output_dir)?;
    let model_path = args.output_dir.join("model.json");
    let bundle_path = args.output_dir.join("bundle.json");
    result.model.save(&model_path)?;
    result.bundle.save(&bundle_path)?;

    let mut text = String::new();
    if !dropped_lines.is_empty() {
        text += &format!("dropped {} rows with missing or invalid values\n", dropped_lines.len());
    }
    text += &summary(&result);
    text += &format!("wrote {} and {}\n", model_path.display(), bundle_path.display());
    write_out(out, &text)?;
    Ok(result)
}

fn summary(r: &PipelineOutput) -> String {
    let s = r.trace.solutions[r.selected_round - 1];
    let e = &r.selected_eval;
    let mut t = format!(
        "trained {} rounds on {} instances ({}), front of {}\n",
        r.trace.rounds(),
        r.split.train.len(),
        mfpb_core::boost::describe_stop(&r.trace.stop),
        r.front.entries.len()
    );
    t += &format!("selected round {}: o1 {:.4}  o2 {:.4}  o3 {:.4}\n", s.round, s.o1, s.o2, s.o3);
    t += &report_table(e);
    t
}

fn report_table(e: &EvalReport) -> String {
    let mut t = format!("{:<10} {:>7} {:>7} {:>7} {:>7} {:>7}\n", "", "acc", "wc_acc", "auc", "gm", "mmm");
    t += &format!(
        "{:<10} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4}\n",
        "test", e.acc, e.wc_acc, e.auc, e.gm, e.fairness.mmm
    );
    for a in &e.fairness.per_attribute {
        t += &format!(
            "  {:<14} dfnr {:+.4}  dfpr {:+.4}  dm {:.4}  cdm {:.4}{}{}\n",
            a.attribute,
            a.delta_fnr,
            a.delta_fpr,
            a.dm,
            a.cdm,
            if a.class_biased { "  class-biased" } else { "" },
            if a.undefined_rates { "  (undefined rates)" } else { "" },
        );
    }
    t
}

/// Re-selects on a stored bundle and writes the new selection back.
pub fn select(bundle_path: &Path, preference: &PreferenceVector, out: &mut dyn Write) -> Result<usize> {
    let mut bundle = ParetoBundle::load(bundle_path)?;
    let round = bundle.select(preference)?;
    bundle.selected.round = round;
    bundle.selected.preference = preference.components();
    bundle.save(bundle_path)?;

    let s = bundle.solutions[round - 1];
    let mut text = format!("selected round {round}: o1 {:.4}  o2 {:.4}  o3 {:.4}\n", s.o1, s.o2, s.o3);
    if let Some(e) = bundle.eval_for(round) {
        text += &format!(
            "test acc {:.4}  wc_acc {:.4}  auc {:.4}  gm {:.4}  mmm {:.4}\n",
            e.acc, e.wc_acc, e.auc, e.gm, e.mmm
        );
    }
    write_out(out, &text)?;
    Ok(round)
}

/// Fairness and performance report for externally produced predictions.
///
/// The predictions CSV needs a header. Labels come from the `prediction`
/// column (else the first column) and may be `1`/`+1`/`-1` or the data's raw
/// label values; an optional `score` column is used for AUC, otherwise the
/// hard labels are.
pub fn audit(predictions: &Path, schema: &Path, data: &Path, out: &mut dyn Write) -> Result<EvalReport> {
    let schema_doc = DatasetSchema::load(schema)?;
    let loaded = load_csv(data, &schema_doc)?;
    let (all_preds, all_scores) = read_predictions(predictions, &schema_doc.positive_label, &loaded.negative_label)?;
    let total_records = loaded.kept_records.len() + loaded.dropped_lines.len();
    if all_preds.len() != total_records {
        return Err(CliError::Usage(format!(
            "{} has {} predictions but {} has {} data rows",
            predictions.display(),
            all_preds.len(),
            data.display(),
            total_records
        )));
    }
    let preds: Vec<Label> = loaded.kept_records.iter().map(|&i| all_preds[i]).collect();
    let scores: Vec<f64> = loaded.kept_records.iter().map(|&i| all_scores[i]).collect();
    let report = evaluate_predictions(&preds, &scores, &loaded.dataset).ctx("eval")?;
    write_out(out, &json::to_string(&report))?;
    Ok(report)
}

fn read_predictions(path: &Path, positive: &str, negative: &str) -> Result<(Vec<Label>, Vec<f64>)> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = rdr.headers().map_err(|e| CliError::Csv { path: path.to_path_buf(), source: e })?.clone();
    let pred_col = headers.iter().position(|h| h == "prediction").unwrap_or(0);
    let score_col = headers.iter().position(|h| h == "score");

    let (mut preds, mut scores) = (Vec::new(), Vec::new());
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::Csv { path: path.to_path_buf(), source: e })?;
        let line = record.position().map_or(0, |p| p.line());
        let row_err = |message: String| CliError::Row { path: path.to_path_buf(), line, message };
        let v = record.get(pred_col).unwrap_or("");
        let label = match v {
            "1" | "+1" => Label::Positive,
            "-1" => Label::Negative,
            _ if v == positive => Label::Positive,
            _ if v == negative => Label::Negative,
            _ => return Err(row_err(format!("prediction '{v}' is not 1, -1, '{positive}' or '{negative}'"))),
        };
        let score = match score_col {
            None => label.sign(),
            Some(c) => {
                let s = record.get(c).unwrap_or("");
                match s.parse::<f64>() {
                    Ok(x) if x.is_finite() => x,
                    _ => return Err(row_err(format!("score '{s}' is not a finite number"))),
                }
            }
        };
        preds.push(label);
        scores.push(score);
    }
    Ok((preds, scores))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyFormat {
    Table,
    Json,
}

pub fn toy(format: ToyFormat, out: &mut dyn Write) -> Result<ToyReport> {
    let report = toy_report();
    render_toy(&report, format, out)?;
    Ok(report)
}

/// Prints `report` and fails with an assertion error if any check failed.
pub fn render_toy(report: &ToyReport, format: ToyFormat, out: &mut dyn Write) -> Result<()> {
    let text = match format {
        ToyFormat::Json => json::to_string(report),
        ToyFormat::Table => {
            let mut t =
                format!("{:<5} {:>8} {:>8} {:>9} {:>9} {:>6}\n", "", "DM sex", "CDM sex", "DM race", "CDM race", "MMM");
            for r in &report.rows {
                let (s, c) = (&r.per_attribute[0], &r.per_attribute[1]);
                t += &format!(
                    "{:<5} {:>8.2} {:>8.2} {:>9.2} {:>9.2} {:>6.2}\n",
                    r.classifier, s.dm, s.cdm, c.dm, c.cdm, r.mmm
                );
            }
            t += "\n";
            for c in &report.checks {
                t += &format!("[{}] {}\n", if c.passed { "pass" } else { "FAIL" }, c.name);
            }
            t
        }
    };
    write_out(out, &text)?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failed.join("; ")))
    }
}

/// Writes `data.csv` and `schema.json` for a synthetic biased dataset.
pub fn synth(params: SynthParams, output_dir: &Path, out: &mut dyn Write) -> Result<()> {
    let ds = synth_biased(params).ctx("eval")?;
    create_dir(output_dir)?;
    let data_path = output_dir.join("data.csv");
    let file = fs::File::create(&data_path).map_err(|e| CliError::io(&data_path, e))?;
    let schema = write_csv(&ds, std::io::BufWriter::new(file))
        .map_err(|source| CliError::Csv { path: data_path.clone(), source })?;
    let schema_path = output_dir.join("schema.json");
    json::write(&schema_path, &schema)?;
    write_out(out, &format!("wrote {} ({} rows) and {}\n", data_path.display(), ds.len(), schema_path.display()))
}

/// Selection test vectors for a bundle: the three corners, the uniform
/// preference, every front member's own pseudo-weight, then seeded random
/// preferences until `count` cases exist.
pub fn golden_cases(bundle: &ParetoBundle, count: usize, seed: u64) -> Result<GoldenFile> {
    let mut prefs: Vec<[f64; 3]> = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 1.0]];
    prefs.extend(bundle.pseudo_weights.iter().copied());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while prefs.len() < count {
        prefs.push([rng.gen(), rng.gen(), rng.gen()]);
    }
    prefs.truncate(count);
    let cases = prefs
        .into_iter()
        .map(|raw| {
            let p = PreferenceVector::new(raw).ctx("pareto")?;
            Ok(GoldenCase { preference: p.components(), expected_round: bundle.select(&p)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GoldenFile { cases })
}

pub fn golden(bundle_path: &Path, count: usize, seed: u64, output: &Path, out: &mut dyn Write) -> Result<GoldenFile> {
    let bundle = ParetoBundle::load(bundle_path)?;
    let file = golden_cases(&bundle, count, seed)?;
    json::write(output, &file)?;
    write_out(out, &format!("wrote {} cases to {}\n", file.cases.len(), output.display()))?;
    Ok(file)
}
