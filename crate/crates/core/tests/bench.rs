use mfdist::bench::{
    nearest_rank, read_results_csv, run_ecdf_y, run_experiment, run_fixed_m, run_statistics_comparison, summarize,
    write_results_csv, write_summary_csv, EvalMode, ExperimentConfig, Method, RunOptions,
};
use mfdist::models::{ishigami_suite, IshigamiParams, IshigamiVariant, SampleTable, Subset, SuiteSpec};
use mfdist::policy::PolicyState;
use mfdist::rng::rng_from_seed;
use rand::Rng;

fn config(methods: Vec<Method>, budgets: Vec<f64>, replicates: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(SuiteSpec::ishigami(IshigamiVariant::Perfect, Default::default()), methods, budgets);
    c.replicates = replicates;
    c.oracle_samples = 100_000;
    c
}

#[test]
fn single_cell_gives_single_row() {
    let out = run_experiment(&config(vec![Method::EcdfY], vec![100.0], 1), None, &RunOptions::default()).unwrap();
    assert_eq!(out.rows.len(), 1);
    assert_eq!(out.rows[0].exploitation, Some(100));
    assert!(out.traces.is_empty());
}

#[test]
fn ecdf_y_sample_counts() {
    let suite = ishigami_suite(IshigamiVariant::Perfect, IshigamiParams::default()).unwrap();
    let mut rng = rng_from_seed(71);
    assert_eq!(run_ecdf_y(&suite, 1.0, &mut rng).unwrap().len(), 1);
    assert_eq!(run_ecdf_y(&suite, 1e3, &mut rng).unwrap().len(), 1000);
    assert!(run_ecdf_y(&suite, 0.5, &mut rng).is_err());
}

#[test]
fn reproducible_bytes_and_row_properties() {
    let mut c = config(vec![Method::EcdfY, Method::AetcD, Method::AetcDQ, Method::FixedM(20)], vec![3.0, 100.0, 300.0], 6);
    c.fixed_subset = Some(Subset::from_models(&[1]).unwrap());
    c.eval = EvalMode::Sampled;
    let render = |c: &ExperimentConfig| {
        let out = run_experiment(c, None, &RunOptions::default()).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_results_csv(&out.rows, &mut a).unwrap();
        write_summary_csv(&summarize(&out.rows), &mut b).unwrap();
        (out.rows, a, b)
    };
    let (rows, a1, b1) = render(&c);
    let (_, a2, b2) = render(&c);
    assert_eq!(a1, a2);
    assert_eq!(b1, b2);
    assert_eq!(rows.len(), 4 * 3 * 6);

    let mut seeds: Vec<u64> = rows.iter().filter(|r| r.method == Method::EcdfY).map(|r| r.seed).collect();
    seeds.sort();
    seeds.dedup();
    assert_eq!(seeds.len(), 18);

    for r in &rows {
        if let Some(spend) = r.spend {
            assert!(spend <= r.budget);
        }
        assert_eq!(r.error.is_some(), r.failure.is_none());
        if let Some(e) = r.error {
            assert!(e >= 0.0);
        }
    }
    let tiny: Vec<_> = rows.iter().filter(|r| r.budget == 3.0 && r.method == Method::AetcD).collect();
    assert!(tiny.iter().all(|r| r.failure.as_deref() == Some("budget-exhausted")));

    for s in summarize(&rows) {
        let errs: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == s.method && r.budget == s.budget)
            .filter_map(|r| r.error)
            .collect();
        assert_eq!(s.failures + errs.len(), 6);
        if !errs.is_empty() {
            assert!((s.mean - errs.iter().sum::<f64>() / errs.len() as f64).abs() < 1e-12);
            assert!(s.q05 <= s.q50 && s.q50 <= s.q95);
        }
    }

    let back = read_results_csv(a1.as_slice()).unwrap();
    assert_eq!(back.len(), rows.len());
    assert_eq!(back[5].error, rows[5].error);
}

#[test]
fn nearest_rank_rule() {
    let v: Vec<f64> = (1..=20).map(f64::from).collect();
    assert_eq!(nearest_rank(&v, 0.05), 1.0);
    assert_eq!(nearest_rank(&v, 0.5), 10.0);
    assert_eq!(nearest_rank(&v, 0.95), 19.0);
    assert_eq!(nearest_rank(&[4.0], 0.5), 4.0);
}

#[test]
fn fixed_m_boundaries() {
    let suite = ishigami_suite(IshigamiVariant::Perfect, IshigamiParams::default()).unwrap();
    let s1 = Subset::from_models(&[1]).unwrap();
    let mut rng = rng_from_seed(72);
    let state = PolicyState::fixed(&suite, 1e3, 10, &mut rng).unwrap();
    assert_eq!(state.max_rounds(), 951);
    let tight = 3.0 * 1.051 + 0.06;
    let out = run_fixed_m(&suite, tight, 3, s1, &mut rng).unwrap();
    assert_eq!(out.exploitation, 1);
    assert!(out.spend <= tight);
    assert!(run_fixed_m(&suite, 3.0 * 1.051 + 0.04, 3, s1, &mut rng).is_err());
    assert!(run_fixed_m(&suite, 1e3, 2, s1, &mut rng).is_err());
}

#[test]
fn oracle_passthrough_has_zero_error() {
    let c = config(vec![Method::Oracle], vec![100.0], 3);
    let out = run_experiment(&c, None, &RunOptions::default()).unwrap();
    assert!(out.rows.iter().all(|r| r.error == Some(0.0)));
    let stats = run_statistics_comparison(&c, None).unwrap();
    assert_eq!(stats.len(), 4);
    assert!(stats.iter().all(|s| s.mse == 0.0));
}

#[test]
fn multifidelity_moments_beat_direct_sampling() {
    let mut c = config(vec![Method::EcdfY, Method::AetcD], vec![1e3, 1e4], 40);
    c.oracle_samples = 1_000_000;
    c.seed = 73;
    let stats = run_statistics_comparison(&c, None).unwrap();
    for b in [1e3, 1e4] {
        let mse = |m: Method| stats.iter().find(|s| s.method == m && s.budget == b && s.statistic == "mean").unwrap().mse;
        assert!(mse(Method::AetcD) < mse(Method::EcdfY), "B={b}");
    }
}

#[test]
fn symmetric_truth_gives_centered_skewness() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(74);
    let mut values = Vec::new();
    for _ in 0..20_000 {
        let y: f64 = rng.random_range(-1.0..1.0);
        values.extend([y, y + 0.1 * rng.random_range(-1.0..1.0)]);
        values.extend([-values[values.len() - 2], -values[values.len() - 1]]);
    }
    let table = SampleTable::new(1, values, 1.0, vec![0.01]).unwrap();
    table.write(&dir.path().join("sym.csv"), &dir.path().join("sym.json")).unwrap();
    let spec: SuiteSpec = serde_json::from_str(r#"{"kind": "table", "path": "sym.csv"}"#).unwrap();
    let mut c = ExperimentConfig::new(spec, vec![Method::EcdfY, Method::AetcD], vec![1e3]);
    c.replicates = 30;
    let out = run_experiment(&c, Some(dir.path()), &RunOptions::default()).unwrap();
    assert!(out.oracle_moments.unwrap().skewness.unwrap().abs() < 1e-9);
    for m in [Method::EcdfY, Method::AetcD] {
        let sk: Vec<f64> = out
            .rows
            .iter()
            .filter(|r| r.method == m)
            .filter_map(|r| r.moments.and_then(|x| x.skewness))
            .collect();
        let mean = sk.iter().sum::<f64>() / sk.len() as f64;
        assert!(mean.abs() < 0.05, "{m}: {mean}");
    }
}

#[test]
fn dump_samples_writes_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(vec![Method::EcdfY], vec![10.0], 2);
    let opts = RunOptions { dump_samples: Some(dir.path().join("samples")) };
    run_experiment(&c, None, &opts).unwrap();
    let text = std::fs::read_to_string(dir.path().join("samples/ecdf-y-b10-r1.csv")).unwrap();
    assert_eq!(text.lines().count(), 11);
}
