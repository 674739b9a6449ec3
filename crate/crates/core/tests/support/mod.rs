//! Random dataset strategies shared by the property tests.

#![allow(dead_code)]

use dkmr_core::{Dataset, ExecutionRecord, MutantMeta, Outcome, TestMeta, Verdict};
use proptest::prelude::*;

const FILES: [&str; 3] = ["A.java", "B.java", "pkg/C.java"];
const SUITES: [&str; 3] = ["SuiteA", "SuiteB", "SuiteC"];

/// Per-cell choice: no record, or one of a few record shapes.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Missing,
    SameOutcome,
    SameOutcomeOtherSignature,
    Flipped,
    Timeout,
    Crash,
}

fn cell() -> impl Strategy<Value = Cell> {
    prop_oneof![
        3 => Just(Cell::Missing),
        2 => Just(Cell::SameOutcome),
        1 => Just(Cell::SameOutcomeOtherSignature),
        2 => Just(Cell::Flipped),
        1 => Just(Cell::Timeout),
        1 => Just(Cell::Crash),
    ]
}

fn record(mutant: &MutantMeta, test: &TestMeta, cell: Cell) -> Option<ExecutionRecord> {
    let same = match test.original_outcome {
        Verdict::Pass => Outcome::Pass,
        Verdict::Fail => Outcome::Fail,
    };
    let flipped = match test.original_outcome {
        Verdict::Pass => Outcome::Fail,
        Verdict::Fail => Outcome::Pass,
    };
    let (outcome, error_signature) = match cell {
        Cell::Missing => return None,
        Cell::SameOutcome => (same, test.original_error_signature.clone()),
        Cell::SameOutcomeOtherSignature => (same, Some("Other".to_owned())),
        Cell::Flipped => match flipped {
            Outcome::Fail => (flipped, Some("Boom".to_owned())),
            _ => (flipped, None),
        },
        Cell::Timeout => (Outcome::Timeout, None),
        Cell::Crash => (Outcome::Crash, None),
    };
    Some(ExecutionRecord {
        mutant_id: mutant.mutant_id.clone(),
        test_id: test.test_id.clone(),
        outcome,
        error_signature,
    })
}

/// Small random datasets with every record shape and at least one failing
/// test. With `boolean_only`, records never change the test outcome.
pub fn dataset(max_mutants: usize, max_tests: usize, boolean_only: bool) -> BoxedStrategy<Dataset> {
    (1..=max_mutants, 1..=max_tests)
        .prop_flat_map(move |(nm, nt)| {
            (
                prop::collection::vec((0..FILES.len(), 1u32..8, 0..5usize), nm),
                prop::collection::vec((0..SUITES.len(), 0..4usize, any::<bool>()), nt),
                prop::collection::vec(cell(), nm * nt),
                0..nt,
            )
        })
        .prop_map(move |(ms, ts, cells, forced_fail)| {
            let mutants: Vec<MutantMeta> = ms
                .iter()
                .enumerate()
                .map(|(i, &(f, line, op))| MutantMeta {
                    mutant_id: format!("m{i}"),
                    file_path: FILES[f].to_owned(),
                    line_number: line,
                    operator: ["AOR", "ROR", "LVR", "STD", "COR"][op].to_owned(),
                })
                .collect();
            let tests: Vec<TestMeta> = ts
                .iter()
                .enumerate()
                .map(|(j, &(s, name, fails))| {
                    let fails = fails || j == forced_fail;
                    TestMeta {
                        test_id: format!("t{j}"),
                        suite: SUITES[s].to_owned(),
                        name: format!("test{name}"),
                        original_outcome: if fails { Verdict::Fail } else { Verdict::Pass },
                        original_error_signature: fails.then(|| "Assert".to_owned()),
                    }
                })
                .collect();
            let mut executions = Vec::new();
            for (i, m) in mutants.iter().enumerate() {
                for (j, t) in tests.iter().enumerate() {
                    let mut c = cells[i * tests.len() + j];
                    if boolean_only && !matches!(c, Cell::Missing | Cell::SameOutcome) {
                        c = Cell::SameOutcomeOtherSignature;
                    }
                    executions.extend(record(m, t, c));
                }
            }
            Dataset::new(mutants, tests, executions, None).expect("generated dataset is valid")
        })
        .boxed()
}
