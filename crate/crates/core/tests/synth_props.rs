use dkmr_core::enhance::build_weak_matrix;
use dkmr_core::synth::{generate_ensemble, generate_scenario, ScenarioParams};
use dkmr_core::{evaluate, localize, DenoiseConfig, Formula, Variant, VersionResult};

#[test]
fn fault_mutant_kill_rate_matches_the_model() {
    let params = ScenarioParams::default();
    let (mut killed, mut total) = (0usize, 0usize);
    for seed in 1000..2200 {
        let s = generate_scenario(&params, seed).unwrap();
        let truth = s.dataset.ground_truth().unwrap();
        let weak = build_weak_matrix(&s.dataset);
        let faulty: Vec<bool> = weak
            .rows
            .iter()
            .map(|id| {
                let m = s
                    .dataset
                    .mutants()
                    .iter()
                    .find(|m| &m.mutant_id == id)
                    .unwrap();
                truth.contains(&m.statement())
            })
            .collect();
        for (r, &is_faulty) in faulty.iter().enumerate() {
            if !is_faulty {
                continue;
            }
            for (c, &fails) in weak.fail_vector.iter().enumerate() {
                if fails {
                    total += 1;
                    killed += usize::from(weak.cells[(r, c)]);
                }
            }
        }
    }
    let p = &params;
    let expected = p.p_detect * (1.0 - p.p_flip) + (1.0 - p.p_detect) * p.p_flip;
    let rate = killed as f64 / total as f64;
    assert!((rate - expected).abs() <= 0.02, "rate {rate} vs {expected}");
}

#[test]
fn noiseless_ensemble_is_always_top_one() {
    let ensemble = generate_ensemble(&ScenarioParams::noiseless(), 300, 30).unwrap();
    let config = DenoiseConfig::default();
    for variant in Variant::ALL {
        for formula in Formula::ALL {
            let results: Vec<VersionResult> = ensemble
                .iter()
                .map(|s| VersionResult {
                    version: s.seed.to_string(),
                    report: localize(&s.dataset, variant, formula, &config).unwrap(),
                    ground_truth: s.dataset.ground_truth().unwrap().clone(),
                })
                .collect();
            let report = evaluate(&results).unwrap();
            if variant == Variant::Metallaxis && matches!(formula, Formula::Dstar { .. }) {
                // A perfectly detected mutant has a_kp = a_nf = 0, so its Dstar
                // fraction has a zero denominator and scores 0 like every
                // other mutant.
                assert!(results
                    .iter()
                    .all(|r| r.report.ranking.iter().all(|x| x.score == 0.0)));
                continue;
            }
            assert_eq!(report.top1, ensemble.len(), "{variant} {formula}");
        }
    }
}

#[test]
fn statements_are_consecutive_lines_of_one_file() {
    let s = generate_scenario(&ScenarioParams::default(), 3).unwrap();
    let mut lines: Vec<u32> = s.dataset.mutants().iter().map(|m| m.line_number).collect();
    lines.dedup();
    assert_eq!(lines, (1..=100).collect::<Vec<_>>());
    let files: std::collections::BTreeSet<&str> = s
        .dataset
        .mutants()
        .iter()
        .map(|m| m.file_path.as_str())
        .collect();
    assert_eq!(files.len(), 1);
}
