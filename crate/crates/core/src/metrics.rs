//! Localization effectiveness metrics and paired statistical comparison.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::killdata::GroundTruth;
use crate::suspicion::SuspiciousnessReport;
use crate::{Error, Result};

/// Largest number of non-zero differences evaluated with the exact
/// signed-rank distribution.
pub const EXACT_WILCOXON_LIMIT: usize = 25;

/// Fraction of dropped zero differences above which a comparison is flagged.
pub const ZERO_DIFFERENCE_WARNING: f64 = 0.10;

/// One fault version: a ranking and the statements that are actually faulty.
#[derive(Debug, Clone)]
pub struct VersionResult {
    pub version: String,
    pub report: SuspiciousnessReport,
    pub ground_truth: GroundTruth,
}

impl VersionResult {
    pub fn candidate_count(&self) -> usize {
        self.report.ranking.len()
    }

    /// Position and score of the best-ranked faulty statement.
    fn best_fault(&self) -> Option<(usize, f64)> {
        self.report
            .ranking
            .iter()
            .find(|r| self.ground_truth.contains(&r.statement()))
            .map(|r| (r.rank, r.score))
    }
}

/// True if any faulty statement sits at rank `n` or better.
pub fn top_n(result: &VersionResult, n: usize) -> bool {
    result.best_fault().is_some_and(|(rank, _)| rank <= n)
}

/// Average precision over the ranking. Faulty statements missing from the
/// ranking contribute nothing.
pub fn average_precision(result: &VersionResult) -> f64 {
    let total = result.ground_truth.len();
    if total == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, r) in result.report.ranking.iter().enumerate() {
        if result.ground_truth.contains(&r.statement()) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / total as f64
}

/// Fraction of candidates examined before reaching the best-ranked fault,
/// with ties resolved to the average position. 1.0 if no fault is ranked.
pub fn exam_score(result: &VersionResult) -> f64 {
    let Some((_, score)) = result.best_fault() else {
        return 1.0;
    };
    let ranking = &result.report.ranking;
    let higher = ranking.iter().filter(|r| r.score > score).count();
    let tied = ranking.iter().filter(|r| r.score == score).count();
    let rank = ((higher + 1) + (higher + tied)) as f64 / 2.0;
    rank / ranking.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersionDetail {
    pub version: String,
    pub best_rank: Option<usize>,
    pub average_precision: f64,
    pub exam: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub versions: usize,
    pub top1: usize,
    pub top3: usize,
    pub top5: usize,
    pub map_value: f64,
    pub exam_scores: Vec<f64>,
    pub details: Vec<VersionDetail>,
}

pub fn evaluate(results: &[VersionResult]) -> Result<EvaluationReport> {
    if results.is_empty() {
        return Err(Error::EmptySample);
    }
    if results.iter().any(|r| r.ground_truth.is_empty()) {
        return Err(Error::EmptyGroundTruth);
    }
    let count = |n| results.iter().filter(|r| top_n(r, n)).count();
    let details: Vec<VersionDetail> = results
        .iter()
        .map(|r| VersionDetail {
            version: r.version.clone(),
            best_rank: r.best_fault().map(|(rank, _)| rank),
            average_precision: average_precision(r),
            exam: exam_score(r),
        })
        .collect();
    let map_value = details.iter().map(|d| d.average_precision).sum::<f64>() / details.len() as f64;
    Ok(EvaluationReport {
        versions: results.len(),
        top1: count(1),
        top3: count(3),
        top5: count(5),
        map_value,
        exam_scores: details.iter().map(|d| d.exam).collect(),
        details,
    })
}

/// Cumulative EXAM distribution: for each threshold `k / steps`, the fraction
/// of versions whose EXAM is at most the threshold.
pub fn exam_curve(exam_scores: &[f64], steps: usize) -> Vec<(f64, f64)> {
    let total = exam_scores.len().max(1) as f64;
    (0..=steps)
        .map(|k| {
            let threshold = k as f64 / steps as f64;
            let hit = exam_scores
                .iter()
                .filter(|&&e| e <= threshold + 1e-12)
                .count();
            (threshold, hit as f64 / total)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    TwoSided,
    /// Median of `xs` is below median of `ys`.
    Less,
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    /// Exact up to [`EXACT_WILCOXON_LIMIT`] non-zero differences, normal
    /// approximation beyond.
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonOutcome {
    /// Sum of the ranks of positive differences.
    pub w_plus: f64,
    pub n_used: usize,
    pub zeros_dropped: usize,
    pub exact: bool,
    pub p_value: f64,
}

/// Average ranks (1-based) of `values`; tied values share their mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Paired Wilcoxon signed-rank test on `xs[i] - ys[i]`; returns the p-value.
pub fn wilcoxon_signed_rank(xs: &[f64], ys: &[f64], alternative: Alternative) -> Result<f64> {
    Ok(wilcoxon_signed_rank_with(xs, ys, alternative, WilcoxonMethod::Auto)?.p_value)
}

pub fn wilcoxon_signed_rank_with(
    xs: &[f64],
    ys: &[f64],
    alternative: Alternative,
    method: WilcoxonMethod,
) -> Result<WilcoxonOutcome> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    let diffs: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let zeros_dropped = xs.len() - diffs.len();
    if diffs.is_empty() {
        return Err(Error::AllDifferencesZero);
    }
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    let exact = match method {
        WilcoxonMethod::Auto => n <= EXACT_WILCOXON_LIMIT,
        WilcoxonMethod::Exact => true,
        WilcoxonMethod::Normal => false,
    };
    let (p_less, p_greater) = if exact {
        exact_tails(&ranks, w_plus)
    } else {
        normal_tails(&abs, &ranks, w_plus)
    };
    let p_value = match alternative {
        Alternative::Less => p_less,
        Alternative::Greater => p_greater,
        Alternative::TwoSided => (2.0 * p_less.min(p_greater)).min(1.0),
    };
    Ok(WilcoxonOutcome {
        w_plus,
        n_used: n,
        zeros_dropped,
        exact,
        p_value,
    })
}

/// `(P(W+ <= w), P(W+ >= w))` under the null, from the exact distribution of
/// the signed-rank sum given these (possibly tied) ranks.
fn exact_tails(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    // Average ranks are multiples of 1/2, so doubled ranks are integers.
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            let c = counts[s];
            if c != 0.0 {
                counts[s + r] += c;
            }
        }
        reach += r;
    }
    let observed = (2.0 * w_plus).round() as usize;
    let all: f64 = counts.iter().sum();
    let lower: f64 = counts[..=observed].iter().sum();
    let upper: f64 = counts[observed..].iter().sum();
    ((lower / all).min(1.0), (upper / all).min(1.0))
}

/// Normal approximation with tie and continuity corrections.
fn normal_tails(abs: &[f64], ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = abs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    for group in sorted.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    let sd = var.sqrt();
    let normal = Normal::standard();
    let p_less = normal.cdf((w_plus - mean + 0.5) / sd);
    let p_greater = normal.cdf(-(w_plus - mean - 0.5) / sd);
    (p_less.min(1.0), p_greater.min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn of(delta: f64) -> Self {
        let d = delta.abs();
        if d >= 0.474 {
            Magnitude::Large
        } else if d >= 0.33 {
            Magnitude::Medium
        } else if d >= 0.147 {
            Magnitude::Small
        } else {
            Magnitude::Negligible
        }
    }
}

/// Cliff's delta, `P(x > y) - P(x < y)` over all cross pairs.
///
/// Counts dominance with a sorted copy of `ys` and binary search rather than
/// the quadratic pair loop; the result is identical.
pub fn cliffs_delta(xs: &[f64], ys: &[f64]) -> Result<(f64, Magnitude)> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut greater: i64 = 0;
    let mut less: i64 = 0;
    for x in xs {
        let below = sorted.partition_point(|y| y < x);
        let not_above = sorted.partition_point(|y| y <= x);
        greater += below as i64;
        less += (sorted.len() - not_above) as i64;
    }
    let delta = (greater - less) as f64 / (xs.len() * ys.len()) as f64;
    Ok((delta, Magnitude::of(delta)))
}

/// Paired comparison of two techniques on the same versions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatTestResult {
    pub p_two_sided: f64,
    pub p_less: f64,
    pub p_greater: f64,
    pub cliffs_delta: f64,
    pub magnitude: Magnitude,
    pub pairs: usize,
    pub zero_differences_dropped: usize,
    /// More than 10% of the pairs had a zero difference.
    pub many_zero_differences: bool,
}

pub fn compare(xs: &[f64], ys: &[f64]) -> Result<StatTestResult> {
    let run = |alt| wilcoxon_signed_rank_with(xs, ys, alt, WilcoxonMethod::Auto);
    let two = run(Alternative::TwoSided)?;
    let less = run(Alternative::Less)?;
    let greater = run(Alternative::Greater)?;
    let (cliffs_delta, magnitude) = cliffs_delta(xs, ys)?;
    Ok(StatTestResult {
        p_two_sided: two.p_value,
        p_less: less.p_value,
        p_greater: greater.p_value,
        cliffs_delta,
        magnitude,
        pairs: xs.len(),
        zero_differences_dropped: two.zeros_dropped,
        many_zero_differences: two.zeros_dropped as f64 > ZERO_DIFFERENCE_WARNING * xs.len() as f64,
    })
}
