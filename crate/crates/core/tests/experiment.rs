use rbmtls::experiment::{
    emit_outputs, generate_instance, parse_results_csv, results_csv, run_experiment,
    run_experiment_sequential, run_trial, trial_seed, ExperimentConfig, NoiseCase,
};
use rbmtls::{solve_ls, solve_mtls, solve_tls, SolveOptions};

fn small(case: NoiseCase) -> ExperimentConfig {
    ExperimentConfig {
        m_values: vec![30, 40],
        n: 10,
        n1: 4,
        d: 6,
        trials: 4,
        noise_scale: 0.01,
        case,
        seed: 3,
    }
}

#[test]
fn zero_noise_instances_are_solved_exactly_by_all_methods() {
    let cfg = ExperimentConfig {
        noise_scale: 0.0,
        ..ExperimentConfig::default()
    };
    let inst = generate_instance(&cfg, 90, trial_seed(cfg.seed, 90, 0)).unwrap();
    let o = SolveOptions::default();
    let p = &inst.problem;
    let xs = [
        solve_mtls(p, &o).unwrap().x,
        solve_tls(&p.with_split(0).unwrap(), &o).unwrap().x,
        solve_ls(&p.with_split(p.n()).unwrap(), &o).unwrap().x,
    ];
    for x in xs {
        assert!((x - &inst.x0).norm() <= 1e-6 * inst.x0.norm());
    }
}

#[test]
fn instances_are_reproducible() {
    let cfg = small(NoiseCase::AllColumns);
    let a = generate_instance(&cfg, 30, 12345).unwrap();
    let b = generate_instance(&cfg, 30, 12345).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, generate_instance(&cfg, 30, 12346).unwrap());
}

#[test]
fn trials_report_three_errors() {
    let cfg = small(NoiseCase::RhsAndSubset);
    let t = run_trial(&cfg, 30, 0).unwrap();
    let errors = t.errors.expect("all solvers succeed");
    assert!(errors.iter().all(|e| e.is_finite() && *e >= 0.0));
    assert!(t.diagnostics.iter().all(|d| d.is_some_and(|r| r.unique)));
}

#[test]
fn parallel_and_sequential_runs_agree() {
    for case in NoiseCase::ALL {
        let cfg = small(case);
        let seq = run_experiment_sequential(&cfg).unwrap();
        let par = run_experiment(&cfg).unwrap();
        assert_eq!(results_csv(&seq), results_csv(&par));
    }
}

#[test]
fn outputs_have_expected_structure() {
    let cfg = ExperimentConfig {
        m_values: vec![30, 40],
        ..small(NoiseCase::RhsOnly)
    };
    let rows = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_outputs(&rows, dir.path()).unwrap();
    assert_eq!(files.len(), 2);

    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("m,case,eps1,eps2,eps3,skipped\n"));
    assert_eq!(parse_results_csv(&csv).unwrap(), rows);

    let svg = std::fs::read_to_string(dir.path().join("case3.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
}

#[test]
fn unwritable_output_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let rows = run_experiment(&ExperimentConfig {
        trials: 1,
        m_values: vec![30],
        ..small(NoiseCase::RhsOnly)
    })
    .unwrap();
    assert!(matches!(
        emit_outputs(&rows, blocker.join("sub")),
        Err(rbmtls::Error::Io(_))
    ));
}
