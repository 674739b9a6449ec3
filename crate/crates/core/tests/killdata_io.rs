mod support;

use std::fs;
use std::path::Path;

use dkmr_core::killdata::{EXECUTIONS_FILE, FAULTS_FILE, MUTANTS_FILE, TESTS_FILE};
use dkmr_core::synth::{generate_scenario, ScenarioParams};
use dkmr_core::{
    build_enhanced_matrix, build_weak_matrix, load_dataset, order_axes, Dataset, Error,
    GroundTruth, KillClass, Statement,
};
use proptest::prelude::*;
use tempfile::TempDir;

fn write(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

fn small_dataset_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    write(
        p,
        MUTANTS_FILE,
        "mutant_id\tfile_path\tline_number\toperator\n\
         m1\tA.java\t3\tAOR\n\
         m2\tA.java\t5\tROR\n\
         m3\tB.java\t1\tSTD\n",
    );
    write(
        p,
        TESTS_FILE,
        "test_id\tsuite\tname\toriginal_outcome\toriginal_error_signature\n\
         t1\tS1\ttestA\tFAIL\tAssertionError\n\
         t2\tS1\ttestB\tPASS\t\n",
    );
    write(
        p,
        EXECUTIONS_FILE,
        "mutant_id\ttest_id\toutcome\terror_signature\n\
         m1\tt1\tPASS\t\n\
         m2\tt1\tFAIL\tNullPointerException\n\
         m3\tt2\tTIMEOUT\t\n",
    );
    write(p, FAULTS_FILE, "file_path\tline_number\nA.java\t3\n");
    dir
}

#[test]
fn loads_a_valid_directory() {
    let dir = small_dataset_dir();
    let d = load_dataset(dir.path()).unwrap();
    assert_eq!(d.mutants().len(), 3);
    assert_eq!(d.tests().len(), 2);
    assert_eq!(d.executions().len(), 3);
    assert_eq!(d.failing_test_count(), 1);
    assert_eq!(
        d.ground_truth().unwrap(),
        &GroundTruth::new([Statement::new("A.java", 3)])
    );

    let e = build_enhanced_matrix(&d);
    assert_eq!(e.rows, ["m1", "m2", "m3"]);
    assert_eq!(e.cols, ["t1", "t2"]);
    assert_eq!(e.cells[(0, 0)], KillClass::Strong);
    assert_eq!(e.cells[(1, 0)], KillClass::Weak);
    assert_eq!(e.cells[(2, 1)], KillClass::Strong);
    assert_eq!(e.cells[(2, 0)], KillClass::Survive);
}

#[test]
fn dangling_mutant_reference_reports_the_line() {
    let dir = small_dataset_dir();
    let path = dir.path().join(EXECUTIONS_FILE);
    let mut body = fs::read_to_string(&path).unwrap();
    body.push_str("m99\tt1\tFAIL\tX\n");
    fs::write(&path, body).unwrap();
    match load_dataset(dir.path()) {
        Err(Error::DanglingReference { file, line, id }) => {
            assert_eq!(file, EXECUTIONS_FILE);
            assert_eq!(line, 5);
            assert_eq!(id, "m99");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn duplicate_test_id_is_rejected() {
    let dir = small_dataset_dir();
    let path = dir.path().join(TESTS_FILE);
    let mut body = fs::read_to_string(&path).unwrap();
    body.push_str("t2\tS2\ttestC\tPASS\t\n");
    fs::write(&path, body).unwrap();
    assert!(matches!(
        load_dataset(dir.path()),
        Err(Error::DuplicateId { line: 4, .. })
    ));
}

#[test]
fn missing_file_is_reported() {
    let dir = small_dataset_dir();
    fs::remove_file(dir.path().join(MUTANTS_FILE)).unwrap();
    assert!(matches!(
        load_dataset(dir.path()),
        Err(Error::MissingFile(_))
    ));
}

#[test]
fn bad_header_and_outcome_are_malformed() {
    let dir = small_dataset_dir();
    write(dir.path(), FAULTS_FILE, "file\tline\nA.java\t3\n");
    assert!(matches!(
        load_dataset(dir.path()),
        Err(Error::MalformedRow { line: 1, .. })
    ));

    let dir = small_dataset_dir();
    write(
        dir.path(),
        EXECUTIONS_FILE,
        "mutant_id\ttest_id\toutcome\terror_signature\nm1\tt1\tMAYBE\t\n",
    );
    assert!(matches!(
        load_dataset(dir.path()),
        Err(Error::MalformedRow { line: 2, .. })
    ));
}

fn round_trip_bytes(d: &Dataset) -> (Vec<Vec<u8>>, Dataset) {
    let a = TempDir::new().unwrap();
    d.write_to_dir(a.path()).unwrap();
    let loaded = load_dataset(a.path()).unwrap();
    let b = TempDir::new().unwrap();
    loaded.write_to_dir(b.path()).unwrap();
    let files = [MUTANTS_FILE, TESTS_FILE, EXECUTIONS_FILE, FAULTS_FILE];
    for f in files {
        assert_eq!(
            fs::read(a.path().join(f)).ok(),
            fs::read(b.path().join(f)).ok(),
            "{f} differs after reload"
        );
    }
    let bytes = files
        .iter()
        .filter_map(|f| fs::read(a.path().join(f)).ok())
        .collect();
    (bytes, loaded)
}

#[test]
fn synthetic_datasets_round_trip() {
    for seed in 0..5 {
        let s = generate_scenario(&ScenarioParams::default(), seed).unwrap();
        let (_, loaded) = round_trip_bytes(&s.dataset);
        assert_eq!(loaded, s.dataset);
    }
}

fn shuffled(d: &Dataset, seed: u64) -> Dataset {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut m = d.mutants().to_vec();
    let mut t = d.tests().to_vec();
    let mut e = d.executions().to_vec();
    m.shuffle(&mut rng);
    t.shuffle(&mut rng);
    e.shuffle(&mut rng);
    Dataset::new(m, t, e, d.ground_truth().cloned()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_axes_is_a_stable_permutation(d in support::dataset(8, 8, false), seed in any::<u64>()) {
        let (rows, cols) = order_axes(&d);
        let mut sorted_rows = rows.clone();
        sorted_rows.sort();
        let mut ids: Vec<String> = d.mutants().iter().map(|m| m.mutant_id.clone()).collect();
        ids.sort();
        prop_assert_eq!(sorted_rows, ids);
        let mut sorted_cols = cols.clone();
        sorted_cols.sort();
        let mut ids: Vec<String> = d.tests().iter().map(|t| t.test_id.clone()).collect();
        ids.sort();
        prop_assert_eq!(sorted_cols, ids);

        // Ordering does not depend on input order, so applying it again to an
        // already ordered dataset is a no-op.
        let again = shuffled(&d, seed);
        prop_assert_eq!(order_axes(&again), (rows, cols));
    }

    #[test]
    fn write_load_write_is_byte_identical(d in support::dataset(6, 6, false)) {
        let (_, loaded) = round_trip_bytes(&d);
        prop_assert_eq!(loaded, d);
    }

    #[test]
    fn strong_implies_weak(d in support::dataset(8, 8, false)) {
        let weak = build_weak_matrix(&d);
        let enhanced = build_enhanced_matrix(&d);
        prop_assert_eq!(&weak.rows, &enhanced.rows);
        prop_assert_eq!(&weak.cols, &enhanced.cols);
        prop_assert_eq!(&weak.fail_vector, &enhanced.fail_vector);
        for (w, e) in weak.cells.as_slice().iter().zip(enhanced.cells.as_slice()) {
            prop_assert_eq!(*w, e.is_killed());
            prop_assert_eq!(*w, *e as u8 >= 1);
        }
    }

    #[test]
    fn record_order_does_not_change_cells(d in support::dataset(8, 8, false), seed in any::<u64>()) {
        let other = shuffled(&d, seed);
        prop_assert_eq!(build_enhanced_matrix(&d), build_enhanced_matrix(&other));
        prop_assert_eq!(build_weak_matrix(&d), build_weak_matrix(&other));
    }

    #[test]
    fn outcome_preserving_records_never_strong(d in support::dataset(6, 6, true)) {
        let enhanced = build_enhanced_matrix(&d);
        prop_assert!(enhanced.cells.as_slice().iter().all(|c| *c != KillClass::Strong));
    }
}
