//! Localization split into timed stages.

use std::fmt;
use std::ops::AddAssign;
use std::time::{Duration, Instant};

use dkmr_core::suspicion::{
    classical_statistics, fuzzy_statistics, report_from_statistics, MutantStatistics,
};
use dkmr_core::{
    build_enhanced_matrix, build_weak_matrix, refine, BooleanKillMatrix, Dataset, DenoiseConfig,
    EnhancedKillMatrix, Formula, SuspiciousnessReport, Variant,
};

/// Accumulated wall time of the three localization stages.
#[derive(Debug, Default, Clone, Copy, PartialEq)]
pub struct StageTimes {
    pub matrix_build: Duration,
    pub refine: Duration,
    pub suspiciousness: Duration,
    pub runs: u32,
}

impl AddAssign for StageTimes {
    fn add_assign(&mut self, other: Self) {
        self.matrix_build += other.matrix_build;
        self.refine += other.refine;
        self.suspiciousness += other.suspiciousness;
        self.runs += other.runs;
    }
}

impl fmt::Display for StageTimes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let runs = self.runs.max(1) as f64;
        for (name, d) in [
            ("matrix_build", self.matrix_build),
            ("refine", self.refine),
            ("suspiciousness", self.suspiciousness),
        ] {
            writeln!(
                f,
                "timing {name:<15} total {:>10.6}s  mean {:>10.6}s",
                d.as_secs_f64(),
                d.as_secs_f64() / runs
            )?;
        }
        Ok(())
    }
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot += start.elapsed();
    out
}

/// Runs every requested variant and formula on one dataset. Each matrix is
/// built at most once and shared across the variants that need it.
pub fn localize_dataset(
    dataset: &Dataset,
    variants: &[Variant],
    formulas: &[Formula],
    config: &DenoiseConfig,
    times: &mut StageTimes,
) -> dkmr_core::Result<Vec<SuspiciousnessReport>> {
    let weak: Option<BooleanKillMatrix> = variants
        .iter()
        .any(|v| *v != Variant::Full)
        .then(|| timed(&mut times.matrix_build, || build_weak_matrix(dataset)));
    let enhanced: Option<EnhancedKillMatrix> = variants
        .contains(&Variant::Full)
        .then(|| timed(&mut times.matrix_build, || build_enhanced_matrix(dataset)));

    let mut reports = Vec::with_capacity(variants.len() * formulas.len());
    for &variant in variants {
        let refined = match variant {
            Variant::Full => enhanced
                .as_ref()
                .map(|m| timed(&mut times.refine, || refine(m, config))),
            Variant::DenoiseOnly => weak
                .as_ref()
                .map(|m| timed(&mut times.refine, || refine(m, config))),
            Variant::Metallaxis => None,
        }
        .transpose()?;
        let stats = match refined {
            Some(refined) => timed(&mut times.suspiciousness, || MutantStatistics {
                variant,
                config: Some(*config),
                stats: fuzzy_statistics(&refined),
                mutant_ids: refined.rows,
            }),
            None => {
                let m = weak.as_ref().expect("matrix built above");
                timed(&mut times.suspiciousness, || MutantStatistics {
                    variant,
                    config: None,
                    stats: classical_statistics(m)
                        .into_iter()
                        .map(Into::into)
                        .collect(),
                    mutant_ids: m.rows.clone(),
                })
            }
        };
        for &formula in formulas {
            let report = timed(&mut times.suspiciousness, || {
                report_from_statistics(dataset, &stats, formula)
            })?;
            reports.push(report);
        }
    }
    times.runs += 1;
    Ok(reports)
}
