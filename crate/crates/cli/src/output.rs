//! File emission. Every file is written to a temporary sibling and renamed
//! into place, so readers never observe a partial artifact.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dkmr_core::synth::Scenario;
use dkmr_core::SuspiciousnessReport;
use serde::Serialize;

pub const REPORT_PREFIX: &str = "report_";
pub const EVALUATION_FILE: &str = "evaluation.json";

fn parent_of(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = parent_of(path);
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut json = serde_json::to_vec_pretty(value).expect("serializable value");
    json.push(b'\n');
    json
}

pub fn report_stem(report: &SuspiciousnessReport) -> String {
    format!("{REPORT_PREFIX}{}", report.label())
}

pub fn report_csv(report: &SuspiciousnessReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "file", "line", "score"])?;
    for r in &report.ranking {
        w.write_record([
            r.rank.to_string(),
            r.file.clone(),
            r.line.to_string(),
            r.score.to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

/// Writes `report_<variant>_<formula>.json` and `.csv` into `dir`.
pub fn write_report(dir: &Path, report: &SuspiciousnessReport) -> Result<PathBuf> {
    let stem = report_stem(report);
    let json_path = dir.join(format!("{stem}.json"));
    write_atomic(&json_path, &to_json(report))?;
    write_atomic(&dir.join(format!("{stem}.csv")), &report_csv(report)?)?;
    Ok(json_path)
}

/// Materializes a scenario (and optional reports) in a hidden staging
/// directory, then renames it to `target`, replacing any previous contents.
pub fn write_scenario_dir(
    target: &Path,
    scenario: &Scenario,
    reports: &[SuspiciousnessReport],
) -> Result<()> {
    let parent = parent_of(target);
    fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    let staging = tempfile::Builder::new()
        .prefix(".staging-")
        .tempdir_in(parent)
        .with_context(|| format!("creating staging directory in {}", parent.display()))?;
    scenario.write_to_dir(staging.path())?;
    for report in reports {
        write_report(staging.path(), report)?;
    }
    if target.exists() {
        fs::remove_dir_all(target).with_context(|| format!("replacing {}", target.display()))?;
    }
    let staged = staging.keep();
    fs::rename(&staged, target).with_context(|| format!("writing {}", target.display()))?;
    Ok(())
}

pub fn scenario_dir_name(seed: u64) -> String {
    format!("scenario_{seed:06}")
}
