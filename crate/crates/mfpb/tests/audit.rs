//! Audits a dataset whose group-by-class error counts realize the four toy
//! classifiers exactly, then compares against the closed-form toy table.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mfpb::commands::audit;
use mfpb::schema::{DatasetSchema, FeatureKind, FeatureSpec, MissingPolicy, ProtectedSpec};
use mfpb_core::eval::{toy_report, TOY_CLASSIFIERS};

/// Cells in (sex, race) order: MW, MB, FW, FB.
const CELLS: [(&str, &str); 4] = [("M", "W"), ("M", "B"), ("F", "W"), ("F", "B")];

fn as_count(rate: f64, total: usize) -> Option<usize> {
    let e = rate * total as f64;
    let r = e.round();
    ((e - r).abs() < 1e-9 && r as usize as f64 / total as f64 == rate).then_some(r as usize)
}

/// Per-cell error counts giving marginal rates `[M, F, W, B]`, if any exist.
fn realize(sizes: [usize; 4], rates: [f64; 4]) -> Option<[usize; 4]> {
    let [mw, mb, fw, fb] = sizes;
    let em = as_count(rates[0], mw + mb)?;
    let ef = as_count(rates[1], fw + fb)?;
    let ew = as_count(rates[2], mw + fw)?;
    let eb = as_count(rates[3], mb + fb)?;
    if em + ef != ew + eb {
        return None;
    }
    (0..=mw.min(em).min(ew)).find_map(|e_mw| {
        let e_mb = em - e_mw;
        let e_fw = ew - e_mw;
        let e_fb = ef.checked_sub(e_fw)?;
        (e_mb <= mb && e_fw <= fw && e_fb <= fb).then_some([e_mw, e_mb, e_fw, e_fb])
    })
}

/// Smallest cell sizes (by total) under which every classifier's rates are
/// realizable, with the error counts per classifier.
fn search(rates: impl Fn(usize) -> [f64; 4]) -> ([usize; 4], Vec<[usize; 4]>) {
    let mut best: Option<([usize; 4], Vec<[usize; 4]>)> = None;
    for a in 1..=20 {
        for b in 1..=20 {
            for c in 1..=20 {
                for d in 1..=20 {
                    let sizes = [a, b, c, d];
                    if best.as_ref().is_some_and(|(s, _)| s.iter().sum::<usize>() <= a + b + c + d) {
                        continue;
                    }
                    let errs: Option<Vec<_>> = (0..4).map(|k| realize(sizes, rates(k))).collect();
                    if let Some(errs) = errs {
                        best = Some((sizes, errs));
                    }
                }
            }
        }
    }
    best.expect("a realizable cell layout within 20 per cell")
}

struct Fixture {
    rows: Vec<(usize, bool)>,
    /// Per classifier, whether each row is predicted positive.
    predictions: Vec<Vec<bool>>,
}

fn fixture() -> Fixture {
    let (pos_sizes, pos_errs) = search(|k| TOY_CLASSIFIERS[k].1);
    let (neg_sizes, neg_errs) = search(|k| TOY_CLASSIFIERS[k].2);
    let mut rows = Vec::new();
    let mut predictions = vec![Vec::new(); 4];
    for cell in 0..4 {
        for (positive, sizes, errs) in [(true, pos_sizes, &pos_errs), (false, neg_sizes, &neg_errs)] {
            for i in 0..sizes[cell] {
                rows.push((cell, positive));
                for k in 0..4 {
                    let wrong = i < errs[k][cell];
                    predictions[k].push(positive != wrong);
                }
            }
        }
    }
    Fixture { rows, predictions }
}

fn write_data(dir: &Path, f: &Fixture) {
    let mut csv = String::from("x,sex,race,outcome\n");
    for (i, &(cell, positive)) in f.rows.iter().enumerate() {
        let (sex, race) = CELLS[cell];
        writeln!(csv, "{i},{sex},{race},{}", if positive { "yes" } else { "no" }).unwrap();
    }
    fs::write(dir.join("data.csv"), csv).unwrap();
    let schema = DatasetSchema {
        label_column: "outcome".into(),
        positive_label: "yes".into(),
        protected: vec![
            ProtectedSpec { column: "sex".into(), protected_values: vec!["F".into()] },
            ProtectedSpec { column: "race".into(), protected_values: vec!["B".into()] },
        ],
        features: vec![FeatureSpec { column: "x".into(), kind: FeatureKind::Numeric }],
        missing_policy: MissingPolicy::Error,
    };
    fs::write(dir.join("schema.json"), serde_json::to_string(&schema).unwrap()).unwrap();
}

#[test]
fn audit_reproduces_the_toy_table() {
    let tmp = tempfile::tempdir().unwrap();
    let f = fixture();
    write_data(tmp.path(), &f);
    let toy = toy_report();

    for (k, preds) in f.predictions.iter().enumerate() {
        // alternate label spellings between classifiers
        let (yes, no) = if k % 2 == 0 { ("yes", "no") } else { ("+1", "-1") };
        let mut csv = String::from("id,prediction\n");
        for (i, &p) in preds.iter().enumerate() {
            writeln!(csv, "{i},{}", if p { yes } else { no }).unwrap();
        }
        let path = tmp.path().join(format!("cf{k}.csv"));
        fs::write(&path, csv).unwrap();

        let mut out = Vec::new();
        let report = audit(&path, &tmp.path().join("schema.json"), &tmp.path().join("data.csv"), &mut out).unwrap();
        let row = &toy.rows[k];
        assert!(
            (report.fairness.mmm - row.mmm).abs() <= 1e-12,
            "{}: {} vs {}",
            row.classifier,
            report.fairness.mmm,
            row.mmm
        );
        for (got, want) in report.fairness.per_attribute.iter().zip(&row.per_attribute) {
            assert_eq!(got.attribute, want.attribute);
            assert!((got.dm - want.dm).abs() <= 1e-12, "{} {}", row.classifier, got.attribute);
            assert!((got.cdm - want.cdm).abs() <= 1e-12, "{} {}", row.classifier, got.attribute);
            assert!((got.delta_fnr - want.delta_fnr).abs() <= 1e-12);
            assert!((got.delta_fpr - want.delta_fpr).abs() <= 1e-12);
        }
        let printed: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert!(printed["fairness"]["mmm"].is_number());
    }
}

#[test]
fn audit_uses_scores_when_given_and_checks_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let f = fixture();
    write_data(tmp.path(), &f);
    let schema = tmp.path().join("schema.json");
    let data = tmp.path().join("data.csv");

    // perfect ranking scores with hard labels from Cf2
    let mut csv = String::from("prediction,score\n");
    for (&(_, positive), &p) in f.rows.iter().zip(&f.predictions[1]) {
        writeln!(csv, "{},{}", if p { 1 } else { -1 }, if positive { 0.9 } else { 0.1 }).unwrap();
    }
    let path = tmp.path().join("scored.csv");
    fs::write(&path, &csv).unwrap();
    let report = audit(&path, &schema, &data, &mut Vec::new()).unwrap();
    assert_eq!(report.auc, 1.0);

    let short: String = csv.lines().take(5).map(|l| format!("{l}\n")).collect();
    fs::write(&path, short).unwrap();
    let err = audit(&path, &schema, &data, &mut Vec::new()).unwrap_err().to_string();
    assert!(err.contains("4 predictions"), "{err}");

    let bad = csv.replacen("\n1,", "\nmaybe,", 1).replacen("\n-1,", "\nmaybe,", 1);
    fs::write(&path, bad).unwrap();
    let err = audit(&path, &schema, &data, &mut Vec::new()).unwrap_err().to_string();
    assert!(err.contains("line 2") && err.contains("maybe"), "{err}");
}
