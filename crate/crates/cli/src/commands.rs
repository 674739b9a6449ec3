//! Subcommand implementations.

use std::fs;
use std::io::{self, Write};
use std::time::Instant;

use anyhow::{Context, Result};
use dkmr_core::enhance::{parse_matrix_tsv, write_matrix_tsv};
use dkmr_core::synth::generate_scenario;
use dkmr_core::{build_enhanced_matrix, build_weak_matrix, load_dataset};
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::evaluation::{
    evaluate_versions, load_versions, write_evaluation, EvaluationOutput, VersionInput,
};
use crate::output::{scenario_dir_name, write_atomic, write_report, write_scenario_dir};
use crate::stages::{localize_dataset, StageTimes};
use crate::UsageError;

pub const WEAK_MATRIX_FILE: &str = "weak_matrix.tsv";
pub const ENHANCED_MATRIX_FILE: &str = "enhanced_matrix.tsv";
pub const SCENARIOS_DIR: &str = "scenarios";

/// Prints a line to stdout, ignoring a closed pipe.
fn say(line: std::fmt::Arguments<'_>) {
    let _ = writeln!(io::stdout().lock(), "{line}");
}

fn print_summary(evaluation: &EvaluationOutput) {
    for (label, r) in &evaluation.techniques {
        say(format_args!(
            "{label}: top1={} top3={} top5={} MAP={:.4}",
            r.top1, r.top3, r.top5, r.map_value
        ));
    }
}

pub fn build(cfg: &PipelineConfig) -> Result<()> {
    let input = cfg.input()?;
    let output = cfg.output()?;
    let dataset = load_dataset(input).with_context(|| format!("loading {}", input.display()))?;
    let mut times = StageTimes::default();
    let start = Instant::now();
    let weak = build_weak_matrix(&dataset);
    let enhanced = build_enhanced_matrix(&dataset);
    times.matrix_build = start.elapsed();
    times.runs = 1;
    write_atomic(
        &output.join(WEAK_MATRIX_FILE),
        write_matrix_tsv(&weak)?.as_bytes(),
    )?;
    write_atomic(
        &output.join(ENHANCED_MATRIX_FILE),
        write_matrix_tsv(&enhanced)?.as_bytes(),
    )?;
    if cfg.timings {
        eprint!("{times}");
    }
    Ok(())
}

pub fn refine(cfg: &PipelineConfig) -> Result<()> {
    let input = cfg.input()?;
    let output = cfg.output()?;
    let text =
        fs::read_to_string(input).map_err(|e| UsageError(format!("{}: {e}", input.display())))?;
    let matrix =
        parse_matrix_tsv(&text).map_err(|e| UsageError(format!("{}: {e}", input.display())))?;
    let start = Instant::now();
    let refined = dkmr_core::refine(&matrix, &cfg.denoise)?;
    let times = StageTimes {
        refine: start.elapsed(),
        runs: 1,
        ..Default::default()
    };
    write_atomic(output, write_matrix_tsv(&refined)?.as_bytes())?;
    if cfg.timings {
        eprint!("{times}");
    }
    Ok(())
}

pub fn localize(cfg: &PipelineConfig) -> Result<()> {
    let input = cfg.input()?;
    let output = cfg.output()?;
    let dataset = load_dataset(input).with_context(|| format!("loading {}", input.display()))?;
    let mut times = StageTimes::default();
    let reports = localize_dataset(
        &dataset,
        &cfg.variants,
        &cfg.formulas,
        &cfg.denoise,
        &mut times,
    )?;
    for report in &reports {
        let path = write_report(output, report)?;
        say(format_args!("{}", path.display()));
    }
    if cfg.timings {
        eprint!("{times}");
    }
    Ok(())
}

pub fn evaluate(cfg: &PipelineConfig) -> Result<()> {
    let input = cfg.input()?;
    let output = cfg.output()?;
    let versions = load_versions(input)?;
    let evaluation = evaluate_versions(&versions)?;
    write_evaluation(output, &evaluation)?;
    print_summary(&evaluation);
    Ok(())
}

fn seeds(cfg: &PipelineConfig) -> Vec<u64> {
    (0..cfg.count as u64)
        .map(|i| cfg.seed.wrapping_add(i))
        .collect()
}

pub fn simulate(cfg: &PipelineConfig) -> Result<()> {
    let output = cfg.output()?;
    seeds(cfg)
        .into_par_iter()
        .try_for_each(|seed| -> Result<()> {
            let scenario = generate_scenario(&cfg.params, seed)?;
            write_scenario_dir(&output.join(scenario_dir_name(seed)), &scenario, &[])
        })?;
    say(format_args!(
        "{} scenarios in {}",
        cfg.count,
        output.display()
    ));
    Ok(())
}

/// simulate, localize and evaluate without printing anything. Scenarios are
/// processed in parallel and each lands in its own directory; the evaluation
/// is a single reduction over the results in seed order.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<(EvaluationOutput, StageTimes)> {
    let output = cfg.output()?;
    let scenarios_dir = output.join(SCENARIOS_DIR);
    let results: Vec<(VersionInput, StageTimes)> = seeds(cfg)
        .into_par_iter()
        .map(|seed| -> Result<_> {
            let scenario = generate_scenario(&cfg.params, seed)?;
            let mut times = StageTimes::default();
            let reports = localize_dataset(
                &scenario.dataset,
                &cfg.variants,
                &cfg.formulas,
                &cfg.denoise,
                &mut times,
            )
            .with_context(|| format!("scenario seed {seed}"))?;
            let name = scenario_dir_name(seed);
            write_scenario_dir(&scenarios_dir.join(&name), &scenario, &reports)?;
            let version = VersionInput {
                name,
                ground_truth: scenario.dataset.ground_truth().cloned(),
                reports,
            };
            Ok((version, times))
        })
        .collect::<Result<_>>()?;

    let mut total = StageTimes::default();
    let mut versions = Vec::with_capacity(results.len());
    for (version, times) in results {
        total += times;
        versions.push(version);
    }
    versions.sort_by(|a, b| a.name.cmp(&b.name));
    let evaluation = evaluate_versions(&versions)?;
    write_evaluation(output, &evaluation)?;
    Ok((evaluation, total))
}

pub fn pipeline(cfg: &PipelineConfig) -> Result<()> {
    let (evaluation, times) = run_pipeline(cfg)?;
    print_summary(&evaluation);
    if cfg.timings {
        eprint!("{times}");
    }
    Ok(())
}
