use std::sync::Arc;

use mfdist::bench::{run_experiment, summarize, ExperimentConfig, Method, RunOptions};
use mfdist::models::{
    ishigami_suite, Expansion, Feature, IshigamiParams, IshigamiVariant, JointSampler, ModelSuite, SampleTable,
    Subset, SuiteSpec,
};
use mfdist::rng::{rng_from_seed, SuiteRng};
use rand::Rng;

fn correlations(suite: &ModelSuite, draws: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let w = suite.n() + 1;
    let mut sums = vec![0.0; w];
    let mut sq = vec![0.0; w];
    let mut cross = vec![0.0; w];
    let mut buf = vec![0.0; w];
    for _ in 0..draws {
        suite.draw(&mut rng, &mut buf);
        for k in 0..w {
            sums[k] += buf[k];
            sq[k] += buf[k] * buf[k];
            cross[k] += buf[0] * buf[k];
        }
    }
    let n = draws as f64;
    let var = |k: usize| sq[k] / n - (sums[k] / n).powi(2);
    (1..w)
        .map(|k| (cross[k] / n - sums[0] * sums[k] / (n * n)) / (var(0) * var(k)).sqrt())
        .collect()
}

#[test]
fn ishigami_correlations() {
    let perfect = ishigami_suite(IshigamiVariant::Perfect, IshigamiParams::default()).unwrap();
    let r = correlations(&perfect, 1_000_000, 31);
    assert!((r[0] - 0.999).abs() < 0.002, "{r:?}");
    assert!((r[1] - 0.986).abs() < 0.002, "{r:?}");
    let approx = ishigami_suite(IshigamiVariant::Approx, IshigamiParams::approx()).unwrap();
    let r = correlations(&approx, 1_000_000, 32);
    assert!((r[0] - 0.999).abs() < 0.005, "{r:?}");
    assert!((r[1] - 0.950).abs() < 0.005, "{r:?}");
}

#[test]
fn expansion_feature_lists() {
    let s1 = Subset::from_models(&[1]).unwrap();
    let base = ishigami_suite(IshigamiVariant::Approx, IshigamiParams::approx()).unwrap();
    let l = base.expanded(&Expansion::Cubic).unwrap();
    assert_eq!(
        l.features_for(s1),
        vec![
            Feature::Power { model: 1, exponent: 1 },
            Feature::Power { model: 1, exponent: 2 },
            Feature::Power { model: 1, exponent: 3 },
        ]
    );
    let q = Expansion::QuadraticInteractions.features(3);
    assert_eq!(q.len(), 9);
    assert!(q.contains(&Feature::Product { left: 1, right: 3 }));
    assert!(Feature::validate_list(&[Feature::Power { model: 4, exponent: 1 }], 3).is_err());
}

struct Gaussian;

impl JointSampler for Gaussian {
    fn n_models(&self) -> usize {
        1
    }

    fn draw(&self, rng: &mut SuiteRng, out: &mut [f64]) {
        let y: f64 = rng.random_range(-1.0..1.0);
        out[0] = y;
        out[1] = 2.0 * y;
    }
}

#[test]
fn custom_sampler_suite() {
    let suite = ModelSuite::new("line", Arc::new(Gaussian), 1.0, vec![0.1]).unwrap();
    let mut rng = rng_from_seed(1);
    let mut buf = [0.0; 2];
    suite.draw(&mut rng, &mut buf);
    assert_eq!(buf[1], 2.0 * buf[0]);
    assert!(ModelSuite::new("bad", Arc::new(Gaussian), 1.0, vec![0.1, 0.2]).is_err());
}

#[test]
fn table_suite_matches_live_sampler() {
    let dir = tempfile::tempdir().unwrap();
    let live = ishigami_suite(IshigamiVariant::Perfect, IshigamiParams::default()).unwrap();
    let mut rng = rng_from_seed(41);
    let table = SampleTable::generate(&live, 100_000, &mut rng).unwrap();
    table.write(&dir.path().join("ishigami.csv"), &dir.path().join("ishigami.json")).unwrap();
    let back = SampleTable::read(&dir.path().join("ishigami.csv"), &dir.path().join("ishigami.json")).unwrap();
    assert_eq!(back.rows(), 100_000);
    assert_eq!(back.row(17), table.row(17));

    let budgets = vec![1e3];
    let mut live_cfg =
        ExperimentConfig::new(SuiteSpec::ishigami(IshigamiVariant::Perfect, Default::default()), vec![Method::AetcD], budgets.clone());
    live_cfg.replicates = 50;
    live_cfg.seed = 42;
    let table_spec: SuiteSpec =
        serde_json::from_str(r#"{"kind": "table", "path": "ishigami.csv"}"#).unwrap();
    let mut table_cfg = live_cfg.clone();
    table_cfg.suite = table_spec;
    table_cfg.seed = 43;

    let a = summarize(&run_experiment(&live_cfg, None, &RunOptions::default()).unwrap().rows);
    let b = summarize(&run_experiment(&table_cfg, Some(dir.path()), &RunOptions::default()).unwrap().rows);
    assert_eq!(a[0].failures + b[0].failures, 0);
    assert!(a[0].q05 <= b[0].q95 && b[0].q05 <= a[0].q95, "{a:?} vs {b:?}");
    assert!((a[0].q50 / b[0].q50 - 1.0).abs() < 0.25, "{a:?} vs {b:?}");
}
