//! Seeded synthetic fault scenarios.
//!
//! Statements are the consecutive lines of a single source file, each with a
//! fixed number of mutants. Failing tests kill mutants of faulty statements
//! with probability `p_detect` and mutants of correct statements with
//! `p_couple`; statements within `locality_span` lines of a fault fall
//! linearly between the two. Passing tests kill any mutant with
//! `p_pass_kill`.
//!
//! Kill strength: a passing-test kill, or a failing-test kill of a faulty
//! statement's mutant, turns the test outcome around with probability
//! `p_strong_given_weak`. Failing-test kills of correct statements (coupling
//! and locality spill-over) only change the error signature, so they stay
//! weak. Finally every (mutant, failing test) cell flips its weak-kill bit
//! with `p_flip`; a flip that introduces a kill is weak as well.
//!
//! Tests are laid out in suites of [`SUITE_SIZE`]; the failing tests form a
//! contiguous block at a seed-dependent offset.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::killdata::{
    Dataset, ExecutionRecord, GroundTruth, MutantMeta, Outcome, Statement, TestMeta, Verdict,
};
use crate::{Error, Result};

pub const SYNTHETIC_FILE: &str = "src/main/java/synthetic/Subject.java";
pub const SUITE_SIZE: usize = 10;
const OPERATORS: [&str; 5] = ["AOR", "ROR", "COR", "LVR", "STD"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub n_statements: usize,
    pub mutants_per_statement: usize,
    pub n_failing_tests: usize,
    pub n_passing_tests: usize,
    pub n_faulty_statements: usize,
    pub p_detect: f64,
    pub p_couple: f64,
    pub p_flip: f64,
    pub p_strong_given_weak: f64,
    pub p_pass_kill: f64,
    pub locality_span: usize,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            n_statements: 100,
            mutants_per_statement: 3,
            n_failing_tests: 5,
            n_passing_tests: 45,
            n_faulty_statements: 1,
            p_detect: 0.9,
            p_couple: 0.05,
            p_flip: 0.10,
            p_strong_given_weak: 0.7,
            p_pass_kill: 0.02,
            locality_span: 2,
        }
    }
}

impl ScenarioParams {
    /// Parameters without any noise source. Locality spill-over onto
    /// neighbouring statements counts as noise here.
    pub fn noiseless() -> Self {
        Self {
            p_detect: 1.0,
            p_couple: 0.0,
            p_flip: 0.0,
            p_pass_kill: 0.0,
            locality_span: 0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.n_statements < 2 {
            return fail(format!(
                "n_statements must be >= 2, got {}",
                self.n_statements
            ));
        }
        for (name, value) in [
            ("mutants_per_statement", self.mutants_per_statement),
            ("n_failing_tests", self.n_failing_tests),
            ("n_passing_tests", self.n_passing_tests),
            ("n_faulty_statements", self.n_faulty_statements),
        ] {
            if value == 0 {
                return fail(format!("{name} must be >= 1"));
            }
        }
        if self.n_faulty_statements >= self.n_statements {
            return fail(format!(
                "n_faulty_statements ({}) must be below n_statements ({})",
                self.n_faulty_statements, self.n_statements
            ));
        }
        for (name, p) in [
            ("p_detect", self.p_detect),
            ("p_couple", self.p_couple),
            ("p_flip", self.p_flip),
            ("p_strong_given_weak", self.p_strong_given_weak),
            ("p_pass_kill", self.p_pass_kill),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        Ok(())
    }

    /// Weak-kill probability of a failing test on a mutant of statement
    /// `index`, given the faulty statement indices.
    pub fn detection_probability(&self, index: usize, faults: &BTreeSet<usize>) -> f64 {
        let distance = faults
            .iter()
            .map(|&f| f.abs_diff(index))
            .min()
            .unwrap_or(usize::MAX);
        if distance == 0 {
            self.p_detect
        } else if distance <= self.locality_span {
            let t = distance as f64 / (self.locality_span + 1) as f64;
            self.p_detect + (self.p_couple - self.p_detect) * t
        } else {
            self.p_couple
        }
    }

    fn digest(&self, seed: u64) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update(serde_json::to_vec(self).expect("params serialize"));
        hasher.finalize().into()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub dataset: Dataset,
    pub seed: u64,
    pub params: ScenarioParams,
}

#[derive(Serialize)]
struct ScenarioManifest<'a> {
    seed: u64,
    params: &'a ScenarioParams,
}

impl Scenario {
    /// Writes the dataset files plus `params.json`.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        self.dataset.write_to_dir(dir)?;
        let manifest = ScenarioManifest {
            seed: self.seed,
            params: &self.params,
        };
        let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        json.push('\n');
        fs::write(dir.join("params.json"), json)?;
        Ok(())
    }
}

/// Test layout shared by every scenario with the same test counts.
fn test_name(j: usize) -> (String, String, String) {
    (
        format!("t{j:05}"),
        format!("Suite{:03}", j / SUITE_SIZE),
        format!("test{:03}", j % SUITE_SIZE),
    )
}

fn hex_signature(prefix: char, rng: &mut ChaCha8Rng) -> String {
    format!("{prefix}{:08x}", rng.random::<u32>())
}

pub fn generate_scenario(params: &ScenarioParams, seed: u64) -> Result<Scenario> {
    params.validate()?;
    let mut rng = ChaCha8Rng::from_seed(params.digest(seed));

    let faults: BTreeSet<usize> = sample(&mut rng, params.n_statements, params.n_faulty_statements)
        .into_iter()
        .collect();

    let n_tests = params.n_failing_tests + params.n_passing_tests;
    let fail_start = rng.random_range(0..=params.n_passing_tests);
    let failing = |j: usize| (fail_start..fail_start + params.n_failing_tests).contains(&j);

    let tests: Vec<TestMeta> = (0..n_tests)
        .map(|j| {
            let (test_id, suite, name) = test_name(j);
            let is_failing = failing(j);
            TestMeta {
                test_id,
                suite,
                name,
                original_outcome: if is_failing {
                    Verdict::Fail
                } else {
                    Verdict::Pass
                },
                original_error_signature: is_failing.then(|| hex_signature('E', &mut rng)),
            }
        })
        .collect();

    let mut mutants = Vec::with_capacity(params.n_statements * params.mutants_per_statement);
    let mut executions = Vec::new();
    for s in 0..params.n_statements {
        let p_fail_kill = params.detection_probability(s, &faults);
        let is_faulty = faults.contains(&s);
        for k in 0..params.mutants_per_statement {
            let mutant_id = format!("m{:06}", s * params.mutants_per_statement + k);
            for (j, test) in tests.iter().enumerate() {
                // Fixed number of draws per cell keeps the stream layout
                // independent of outcomes.
                let (u_kill, u_strong, u_flip) = (
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                );
                let (weak, strong) = if failing(j) {
                    let weak = u_kill < p_fail_kill;
                    let strong = weak && is_faulty && u_strong < params.p_strong_given_weak;
                    if u_flip < params.p_flip {
                        (!weak, false)
                    } else {
                        (weak, strong)
                    }
                } else {
                    let weak = u_kill < params.p_pass_kill;
                    (weak, weak && u_strong < params.p_strong_given_weak)
                };
                if !weak {
                    continue;
                }
                let (outcome, error_signature) = match (strong, test.original_outcome) {
                    (true, Verdict::Pass) => (Outcome::Fail, Some(hex_signature('S', &mut rng))),
                    (true, Verdict::Fail) => (Outcome::Pass, None),
                    (false, Verdict::Pass) => (Outcome::Pass, Some(hex_signature('W', &mut rng))),
                    (false, Verdict::Fail) => (Outcome::Fail, Some(hex_signature('W', &mut rng))),
                };
                executions.push(ExecutionRecord {
                    mutant_id: mutant_id.clone(),
                    test_id: test.test_id.clone(),
                    outcome,
                    error_signature,
                });
            }
            mutants.push(MutantMeta {
                mutant_id,
                file_path: SYNTHETIC_FILE.to_owned(),
                line_number: s as u32 + 1,
                operator: OPERATORS[k % OPERATORS.len()].to_owned(),
            });
        }
    }

    let ground_truth = GroundTruth::new(
        faults
            .iter()
            .map(|&s| Statement::new(SYNTHETIC_FILE, s as u32 + 1)),
    );
    let dataset = Dataset::new(mutants, tests, executions, Some(ground_truth))?;
    Ok(Scenario {
        dataset,
        seed,
        params: params.clone(),
    })
}

/// Scenarios seeded `base_seed`, `base_seed + 1`, ...
pub fn generate_ensemble(
    params: &ScenarioParams,
    base_seed: u64,
    count: usize,
) -> Result<Vec<Scenario>> {
    if count == 0 {
        return Err(Error::InvalidParams("ensemble count must be >= 1".into()));
    }
    (0..count as u64)
        .map(|i| generate_scenario(params, base_seed.wrapping_add(i)))
        .collect()
}
