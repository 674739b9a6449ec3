//! Kill statistics, suspiciousness formulas and statement ranking.
//!
//! Classical statistics count boolean kills; fuzzy statistics sum the refined
//! matrix values instead, so a cell of 0.7 counts as 0.7 of a kill and 0.3 of
//! a survival. Both feed the same formula table.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::denoise::{refine, DenoiseConfig, MaskKind, RefinedKillMatrix};
use crate::enhance::{build_enhanced_matrix, build_weak_matrix, BooleanKillMatrix};
use crate::killdata::{mutant_index, Dataset, MutantMeta, Statement};
use crate::{Error, Result};

/// Integer kill counts of one mutant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KillStatistics {
    pub a_kf: u32,
    pub a_kp: u32,
    pub a_nf: u32,
    pub a_np: u32,
}

/// Fuzzy kill mass of one mutant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FuzzyKillStatistics {
    pub a_kf: f64,
    pub a_kp: f64,
    pub a_nf: f64,
    pub a_np: f64,
}

impl From<KillStatistics> for FuzzyKillStatistics {
    fn from(s: KillStatistics) -> Self {
        Self {
            a_kf: s.a_kf as f64,
            a_kp: s.a_kp as f64,
            a_nf: s.a_nf as f64,
            a_np: s.a_np as f64,
        }
    }
}

/// Per-row fuzzy statistics, aligned with `refined.rows`.
pub fn fuzzy_statistics(refined: &RefinedKillMatrix) -> Vec<FuzzyKillStatistics> {
    refined
        .cells
        .iter_rows()
        .map(|row| {
            let mut s = FuzzyKillStatistics::default();
            for (&m, &failing) in row.iter().zip(&refined.fail_vector) {
                if failing {
                    s.a_kf += m;
                    s.a_nf += 1.0 - m;
                } else {
                    s.a_kp += m;
                    s.a_np += 1.0 - m;
                }
            }
            s
        })
        .collect()
}

/// Per-row kill counts, aligned with `matrix.rows`.
pub fn classical_statistics(matrix: &BooleanKillMatrix) -> Vec<KillStatistics> {
    matrix
        .cells
        .iter_rows()
        .map(|row| {
            let mut s = KillStatistics::default();
            for (&killed, &failing) in row.iter().zip(&matrix.fail_vector) {
                match (killed, failing) {
                    (true, true) => s.a_kf += 1,
                    (true, false) => s.a_kp += 1,
                    (false, true) => s.a_nf += 1,
                    (false, false) => s.a_np += 1,
                }
            }
            s
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Dstar { exponent: u32 },
    Gp13,
    Jaccard,
    Ochiai,
    Op2,
    Tarantula,
}

pub const DEFAULT_DSTAR_EXPONENT: u32 = 2;

impl Formula {
    pub const DSTAR: Formula = Formula::Dstar {
        exponent: DEFAULT_DSTAR_EXPONENT,
    };

    pub const ALL: [Formula; 6] = [
        Formula::DSTAR,
        Formula::Gp13,
        Formula::Jaccard,
        Formula::Ochiai,
        Formula::Op2,
        Formula::Tarantula,
    ];

    pub fn score(self, s: &FuzzyKillStatistics) -> f64 {
        let FuzzyKillStatistics {
            a_kf,
            a_kp,
            a_nf,
            a_np,
        } = *s;
        match self {
            Formula::Jaccard => ratio(a_kf, a_kf + a_nf + a_kp),
            Formula::Tarantula => {
                let fail_rate = ratio(a_kf, a_kf + a_nf);
                let pass_rate = ratio(a_kp, a_kp + a_np);
                ratio(fail_rate, fail_rate + pass_rate)
            }
            Formula::Ochiai => ratio(a_kf, ((a_kf + a_nf) * (a_kf + a_kp)).sqrt()),
            Formula::Op2 => a_kf - ratio(a_kp, a_kp + a_np + 1.0),
            Formula::Dstar { exponent } => ratio(a_kf.powi(exponent as i32), a_kp + a_nf),
            Formula::Gp13 => a_kf + ratio(a_kf, 2.0 * a_kp + a_np),
        }
    }
}

/// A fraction whose zero denominator makes it contribute 0.
fn ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Dstar { exponent } if *exponent == DEFAULT_DSTAR_EXPONENT => {
                f.write_str("dstar")
            }
            Formula::Dstar { exponent } => write!(f, "dstar{exponent}"),
            Formula::Gp13 => f.write_str("gp13"),
            Formula::Jaccard => f.write_str("jaccard"),
            Formula::Ochiai => f.write_str("ochiai"),
            Formula::Op2 => f.write_str("op2"),
            Formula::Tarantula => f.write_str("tarantula"),
        }
    }
}

impl FromStr for Formula {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.to_ascii_lowercase();
        Ok(match s.as_str() {
            "dstar" => Formula::DSTAR,
            "gp13" => Formula::Gp13,
            "jaccard" => Formula::Jaccard,
            "ochiai" => Formula::Ochiai,
            "op2" => Formula::Op2,
            "tarantula" => Formula::Tarantula,
            other => match other.strip_prefix("dstar").map(str::parse::<u32>) {
                Some(Ok(exponent)) if exponent >= 1 => Formula::Dstar { exponent },
                _ => return Err(format!("unknown formula {other:?}")),
            },
        })
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Pipeline variants compared in the ablation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Enhanced {0,1,2} matrix, denoised, fuzzy statistics.
    Full,
    /// Boolean weak-kill matrix, denoised, fuzzy statistics.
    DenoiseOnly,
    /// Boolean weak-kill matrix, classical statistics.
    Metallaxis,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Full, Variant::DenoiseOnly, Variant::Metallaxis];

    pub fn is_refined(self) -> bool {
        self != Variant::Metallaxis
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Full => "full",
            Variant::DenoiseOnly => "denoise-only",
            Variant::Metallaxis => "metallaxis",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "full" => Ok(Variant::Full),
            "denoise-only" => Ok(Variant::DenoiseOnly),
            "metallaxis" => Ok(Variant::Metallaxis),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

pub fn mutant_suspiciousness(stats: impl Into<FuzzyKillStatistics>, formula: Formula) -> f64 {
    formula.score(&stats.into())
}

/// Max-aggregates mutant scores onto their statements. Scores for mutants
/// without metadata are ignored.
pub fn statement_suspiciousness(
    mutant_scores: &HashMap<String, f64>,
    mutants: &[MutantMeta],
) -> BTreeMap<Statement, f64> {
    let mut out: BTreeMap<Statement, f64> = BTreeMap::new();
    for m in mutants {
        let Some(&score) = mutant_scores.get(&m.mutant_id) else {
            continue;
        };
        out.entry(m.statement())
            .and_modify(|s| *s = s.max(score))
            .or_insert(score);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedStatement {
    pub file: String,
    pub line: u32,
    pub score: f64,
    /// 1-based position in the ranking.
    pub rank: usize,
}

impl RankedStatement {
    pub fn statement(&self) -> Statement {
        Statement::new(self.file.clone(), self.line)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspiciousnessReport {
    pub variant: Variant,
    pub formula: Formula,
    /// Absent for the unrefined variant.
    pub cutoff_d0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<MaskKind>,
    pub ranking: Vec<RankedStatement>,
}

impl SuspiciousnessReport {
    /// `<variant>_<formula>`, used in file names and evaluation labels.
    pub fn label(&self) -> String {
        format!("{}_{}", self.variant, self.formula)
    }
}

/// Sorts statements by descending score, breaking ties by `(file, line)`.
pub fn rank_statements(
    scores: &BTreeMap<Statement, f64>,
    formula: Formula,
    variant: Variant,
    config: Option<&DenoiseConfig>,
) -> Result<SuspiciousnessReport> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    // Adding 0.0 turns -0.0 into 0.0, which `total_cmp` would otherwise order
    // below it.
    let mut entries: Vec<(&Statement, f64)> = scores.iter().map(|(s, &v)| (s, v + 0.0)).collect();
    // BTreeMap iteration is already in (file, line) order; the stable sort keeps
    // it among equal scores.
    entries.sort_by(|a, b| b.1.total_cmp(&a.1));
    let ranking = entries
        .into_iter()
        .enumerate()
        .map(|(i, (s, score))| RankedStatement {
            file: s.file.clone(),
            line: s.line,
            score,
            rank: i + 1,
        })
        .collect();
    Ok(SuspiciousnessReport {
        variant,
        formula,
        cutoff_d0: config.map(|c| c.cutoff_d0),
        mask: config.map(|c| c.mask_kind),
        ranking,
    })
}

/// Kill statistics of every mutant for one variant, keyed by mutant id.
#[derive(Debug, Clone)]
pub struct MutantStatistics {
    pub variant: Variant,
    pub config: Option<DenoiseConfig>,
    pub mutant_ids: Vec<String>,
    pub stats: Vec<FuzzyKillStatistics>,
}

impl MutantStatistics {
    pub fn scores(&self, formula: Formula) -> HashMap<String, f64> {
        self.mutant_ids
            .iter()
            .cloned()
            .zip(self.stats.iter().map(|s| formula.score(s)))
            .collect()
    }
}

/// Builds the variant's matrix and derives per-mutant statistics.
pub fn variant_statistics(
    dataset: &Dataset,
    variant: Variant,
    config: &DenoiseConfig,
) -> Result<MutantStatistics> {
    let (mutant_ids, stats, config) = match variant {
        Variant::Full => {
            let refined = refine(&build_enhanced_matrix(dataset), config)?;
            (
                refined.rows.clone(),
                fuzzy_statistics(&refined),
                Some(*config),
            )
        }
        Variant::DenoiseOnly => {
            let refined = refine(&build_weak_matrix(dataset), config)?;
            (
                refined.rows.clone(),
                fuzzy_statistics(&refined),
                Some(*config),
            )
        }
        Variant::Metallaxis => {
            let weak = build_weak_matrix(dataset);
            let stats = classical_statistics(&weak)
                .into_iter()
                .map(Into::into)
                .collect();
            (weak.rows, stats, None)
        }
    };
    Ok(MutantStatistics {
        variant,
        config,
        mutant_ids,
        stats,
    })
}

/// Scores an already computed set of statistics with one formula.
pub fn report_from_statistics(
    dataset: &Dataset,
    stats: &MutantStatistics,
    formula: Formula,
) -> Result<SuspiciousnessReport> {
    let per_statement = statement_suspiciousness(&stats.scores(formula), dataset.mutants());
    rank_statements(
        &per_statement,
        formula,
        stats.variant,
        stats.config.as_ref(),
    )
}

/// Runs one variant of the localization pipeline end to end.
pub fn localize(
    dataset: &Dataset,
    variant: Variant,
    formula: Formula,
    config: &DenoiseConfig,
) -> Result<SuspiciousnessReport> {
    let stats = variant_statistics(dataset, variant, config)?;
    report_from_statistics(dataset, &stats, formula)
}

/// Statement of every mutant id.
pub fn mutant_statements(dataset: &Dataset) -> HashMap<&str, Statement> {
    mutant_index(dataset)
        .into_iter()
        .map(|(id, m)| (id, m.statement()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enhance::KillMatrix;
    use crate::matrix::Matrix;

    fn fuzzy(a_kf: f64, a_kp: f64, a_nf: f64, a_np: f64) -> FuzzyKillStatistics {
        FuzzyKillStatistics {
            a_kf,
            a_kp,
            a_nf,
            a_np,
        }
    }

    fn refined_row(row: Vec<f64>, fails: Vec<bool>) -> RefinedKillMatrix {
        KillMatrix {
            rows: vec!["m".into()],
            cols: (0..row.len()).map(|j| format!("t{j}")).collect(),
            fail_vector: fails,
            cells: Matrix::from_rows(vec![row]).unwrap(),
        }
    }

    #[test]
    fn fuzzy_sums_by_hand() {
        let s = fuzzy_statistics(&refined_row(vec![1.0, 0.5, 0.0], vec![true, false, true]));
        assert_eq!(s[0], fuzzy(1.0, 0.5, 1.0, 0.5));
    }

    #[test]
    fn zero_row_statistics() {
        let s = fuzzy_statistics(&refined_row(vec![0.0; 4], vec![true, false, false, true]));
        assert_eq!(s[0], fuzzy(0.0, 0.0, 2.0, 2.0));
    }

    #[test]
    fn classical_counts_by_hand() {
        let m = KillMatrix {
            rows: vec!["a".into(), "b".into(), "c".into()],
            cols: vec!["t1".into(), "t2".into(), "t3".into()],
            fail_vector: vec![true, false, true],
            cells: Matrix::from_rows(vec![
                vec![true, false, true],
                vec![false, false, false],
                vec![true, true, true],
            ])
            .unwrap(),
        };
        let s = classical_statistics(&m);
        let t = |a_kf, a_kp, a_nf, a_np| KillStatistics {
            a_kf,
            a_kp,
            a_nf,
            a_np,
        };
        assert_eq!(s, [t(2, 0, 0, 1), t(0, 0, 2, 1), t(2, 1, 0, 0)]);
    }

    #[test]
    fn fuzzy_ochiai_example() {
        let v = mutant_suspiciousness(fuzzy(1.0, 0.5, 1.0, 0.5), Formula::Ochiai);
        assert!((v - 0.57735).abs() < 1e-5);
    }

    #[test]
    fn gp13_example() {
        let v = mutant_suspiciousness(fuzzy(3.0, 1.0, 0.0, 2.0), Formula::Gp13);
        assert_eq!(v, 3.75);
    }

    #[test]
    fn zero_kf_scores() {
        let s = fuzzy(0.0, 2.0, 3.0, 6.0);
        for f in [
            Formula::Jaccard,
            Formula::Ochiai,
            Formula::DSTAR,
            Formula::Tarantula,
            Formula::Gp13,
        ] {
            assert_eq!(f.score(&s), 0.0, "{f}");
        }
        assert_eq!(Formula::Op2.score(&s), -2.0 / 9.0);
    }

    #[test]
    fn zero_denominators_contribute_zero() {
        let empty = FuzzyKillStatistics::default();
        for f in Formula::ALL {
            assert_eq!(f.score(&empty), 0.0, "{f}");
        }
        // a_kp + a_nf = 0
        assert_eq!(Formula::DSTAR.score(&fuzzy(3.0, 0.0, 0.0, 4.0)), 0.0);
        // pass rate undefined, fail rate 1 -> 1 / (1 + 0)
        assert_eq!(Formula::Tarantula.score(&fuzzy(2.0, 0.0, 0.0, 0.0)), 1.0);
    }

    #[test]
    fn formula_names_round_trip() {
        for f in Formula::ALL
            .into_iter()
            .chain([Formula::Dstar { exponent: 3 }])
        {
            assert_eq!(f.to_string().parse::<Formula>().unwrap(), f);
        }
        assert!("dstar0".parse::<Formula>().is_err());
        assert!("foo".parse::<Formula>().is_err());
    }

    fn meta(id: &str, line: u32) -> MutantMeta {
        MutantMeta {
            mutant_id: id.into(),
            file_path: "A.java".into(),
            line_number: line,
            operator: "x".into(),
        }
    }

    #[test]
    fn statement_max_aggregation() {
        let scores: HashMap<String, f64> = [("m1", 0.2), ("m2", 0.9), ("m3", 0.5)]
            .map(|(k, v)| (k.to_string(), v))
            .into();
        let out = statement_suspiciousness(&scores, &[meta("m1", 1), meta("m2", 1), meta("m3", 2)]);
        assert_eq!(out[&Statement::new("A.java", 1)], 0.9);
        assert_eq!(out[&Statement::new("A.java", 2)], 0.5);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn ranking_breaks_ties_by_location() {
        let scores: BTreeMap<Statement, f64> = [
            (Statement::new("b.java", 1), 0.1),
            (Statement::new("a.java", 9), 0.9),
            (Statement::new("a.java", 5), 0.9),
        ]
        .into();
        let r = rank_statements(&scores, Formula::Ochiai, Variant::Full, None).unwrap();
        let order: Vec<String> = r
            .ranking
            .iter()
            .map(|s| s.statement().to_string())
            .collect();
        assert_eq!(order, ["a.java:5", "a.java:9", "b.java:1"]);
        assert_eq!(
            r.ranking.iter().map(|s| s.rank).collect::<Vec<_>>(),
            [1, 2, 3]
        );
    }

    #[test]
    fn empty_scores_are_rejected() {
        assert!(matches!(
            rank_statements(&BTreeMap::new(), Formula::Ochiai, Variant::Full, None),
            Err(Error::EmptyScores)
        ));
    }

    #[test]
    fn report_json_shape() {
        let scores: BTreeMap<Statement, f64> = [(Statement::new("a.java", 3), 0.5)].into();
        let cfg = DenoiseConfig::default();
        let r = rank_statements(&scores, Formula::DSTAR, Variant::DenoiseOnly, Some(&cfg)).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"variant":"denoise-only","formula":"dstar","cutoff_d0":0.3,"mask":"ideal","ranking":[{"file":"a.java","line":3,"score":0.5,"rank":1}]}"#
        );
        let back: SuspiciousnessReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
