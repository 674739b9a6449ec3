//! Cross-version evaluation: per-technique metrics plus paired comparisons of
//! variants that share a formula.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use dkmr_core::killdata::FAULTS_FILE;
use dkmr_core::metrics::{compare, exam_curve};
use dkmr_core::{
    evaluate, killdata, EvaluationReport, Formula, GroundTruth, StatTestResult,
    SuspiciousnessReport, Variant, VersionResult,
};
use serde::{Deserialize, Serialize};

use crate::output::{to_json, write_atomic, EVALUATION_FILE, REPORT_PREFIX};
use crate::UsageError;

/// Thresholds on the EXAM curve: 0, 0.01, ..., 1.
pub const EXAM_CURVE_STEPS: usize = 100;

/// Everything known about one fault version.
#[derive(Debug, Clone)]
pub struct VersionInput {
    pub name: String,
    pub ground_truth: Option<GroundTruth>,
    pub reports: Vec<SuspiciousnessReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub formula: Formula,
    /// Technique whose EXAM scores form the first sample.
    pub technique: Variant,
    pub baseline: Variant,
    /// Absent when every paired difference is zero.
    pub result: Option<StatTestResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationOutput {
    /// Keyed by `<variant>_<formula>`.
    pub techniques: BTreeMap<String, EvaluationReport>,
    pub comparisons: Vec<Comparison>,
}

fn read_report(path: &Path) -> Result<SuspiciousnessReport> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("{}: invalid report: {e}", path.display())).into())
}

fn load_version(dir: &Path, name: String) -> Result<VersionInput> {
    let faults = dir.join(FAULTS_FILE);
    let ground_truth = if faults.exists() {
        Some(killdata::load_ground_truth(&faults).with_context(|| format!("version {name}"))?)
    } else {
        None
    };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.starts_with(REPORT_PREFIX) && name.ends_with(".json")
        })
        .collect();
    paths.sort();
    let reports = paths
        .iter()
        .map(|p| read_report(p))
        .collect::<Result<_>>()?;
    Ok(VersionInput {
        name,
        ground_truth,
        reports,
    })
}

fn is_version_dir(dir: &Path) -> bool {
    dir.join(FAULTS_FILE).exists()
        || fs::read_dir(dir).is_ok_and(|entries| {
            entries.filter_map(|e| e.ok()).any(|e| {
                e.file_name()
                    .to_str()
                    .is_some_and(|n| n.starts_with(REPORT_PREFIX) && n.ends_with(".json"))
            })
        })
}

/// Reads either a single version directory or a root whose subdirectories
/// are versions. Versions are returned in name order.
pub fn load_versions(root: &Path) -> Result<Vec<VersionInput>> {
    if !root.is_dir() {
        return Err(UsageError(format!("{}: not a directory", root.display())).into());
    }
    if is_version_dir(root) {
        let name = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| ".".into());
        return Ok(vec![load_version(root, name)?]);
    }
    let mut dirs: Vec<_> = fs::read_dir(root)
        .with_context(|| format!("listing {}", root.display()))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir() && is_version_dir(&e.path()))
        .map(|e| (e.file_name().to_string_lossy().into_owned(), e.path()))
        .collect();
    dirs.sort();
    dirs.into_iter()
        .map(|(name, path)| load_version(&path, name))
        .collect()
}

/// Validates that every version has a ground truth and one report per
/// technique, then evaluates each technique and compares variant pairs.
pub fn evaluate_versions(versions: &[VersionInput]) -> Result<EvaluationOutput> {
    if versions.is_empty() {
        return Err(UsageError("no versions found".into()).into());
    }
    let truths = versions.iter().filter(|v| v.ground_truth.is_some()).count();
    let mut by_label: BTreeMap<String, Vec<VersionResult>> = BTreeMap::new();
    for v in versions {
        let mut seen = BTreeSet::new();
        for r in &v.reports {
            let label = r.label();
            if !seen.insert(label.clone()) {
                return Err(
                    UsageError(format!("version {}: duplicate report {label}", v.name)).into(),
                );
            }
            if let Some(truth) = &v.ground_truth {
                by_label.entry(label).or_default().push(VersionResult {
                    version: v.name.clone(),
                    report: r.clone(),
                    ground_truth: truth.clone(),
                });
            } else {
                by_label.entry(label).or_default();
            }
        }
    }
    if by_label.is_empty() {
        return Err(UsageError("no reports found".into()).into());
    }
    for label in by_label.keys() {
        let reports = versions
            .iter()
            .filter(|v| v.reports.iter().any(|r| &r.label() == label))
            .count();
        if reports != versions.len() || truths != versions.len() {
            return Err(UsageError(format!(
                "count mismatch for {label}: {reports} reports, {truths} ground truths, {} versions",
                versions.len()
            ))
            .into());
        }
    }

    let mut techniques = BTreeMap::new();
    for (label, results) in &by_label {
        let report = evaluate(results).with_context(|| format!("evaluating {label}"))?;
        techniques.insert(label.clone(), report);
    }

    let mut comparisons = Vec::new();
    let formulas: BTreeSet<Formula> = by_label.values().map(|r| r[0].report.formula).collect();
    for formula in formulas {
        let present: Vec<Variant> = Variant::ALL
            .into_iter()
            .filter(|v| techniques.contains_key(&format!("{v}_{formula}")))
            .collect();
        for (i, &a) in present.iter().enumerate() {
            for &b in &present[i + 1..] {
                let xs = &techniques[&format!("{a}_{formula}")].exam_scores;
                let ys = &techniques[&format!("{b}_{formula}")].exam_scores;
                let (result, note) = match compare(xs, ys) {
                    Ok(r) => (Some(r), None),
                    Err(dkmr_core::Error::AllDifferencesZero) => (
                        None,
                        Some("all paired EXAM differences are zero".to_owned()),
                    ),
                    Err(e) => return Err(e.into()),
                };
                comparisons.push(Comparison {
                    formula,
                    technique: a,
                    baseline: b,
                    result,
                    note,
                });
            }
        }
    }
    Ok(EvaluationOutput {
        techniques,
        comparisons,
    })
}

pub fn exam_curve_csv(exam_scores: &[f64]) -> String {
    let mut out = String::from("exam_threshold,fraction_of_faults_localized\n");
    for (t, frac) in exam_curve(exam_scores, EXAM_CURVE_STEPS) {
        out.push_str(&format!("{t},{frac}\n"));
    }
    out
}

/// Writes `evaluation.json` and one `exam_curve_<label>.csv` per technique.
pub fn write_evaluation(dir: &Path, output: &EvaluationOutput) -> Result<()> {
    write_atomic(&dir.join(EVALUATION_FILE), &to_json(output))?;
    for (label, report) in &output.techniques {
        write_atomic(
            &dir.join(format!("exam_curve_{label}.csv")),
            exam_curve_csv(&report.exam_scores).as_bytes(),
        )?;
    }
    Ok(())
}
