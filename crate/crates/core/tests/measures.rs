mod common;

use mfdist::measures::{j_functionals, kolmogorov, moment_summary, wasserstein1, EmpiricalMeasure};
use mfdist::rng::rng_from_seed;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn measure() -> impl Strategy<Value = EmpiricalMeasure> {
    prop::collection::vec(-50.0f64..50.0, 1..40).prop_map(|v| EmpiricalMeasure::from_samples(v).unwrap())
}

fn weighted() -> impl Strategy<Value = EmpiricalMeasure> {
    prop::collection::vec((-20.0f64..20.0, 0.01f64..5.0), 1..30).prop_map(|v| {
        let (a, w): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        EmpiricalMeasure::from_weighted(a, w).unwrap()
    })
}

fn weights(m: &EmpiricalMeasure) -> Vec<f64> {
    (0..m.len()).map(|k| m.weight(k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn metric_axioms(a in measure(), b in measure(), c in weighted()) {
        for d in [wasserstein1, kolmogorov] {
            prop_assert_eq!(d(&a, &b), d(&b, &a));
            prop_assert!(d(&a, &b) >= 0.0);
            prop_assert_eq!(d(&a, &a), 0.0);
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-10);
        }
        let shuffled = EmpiricalMeasure::from_samples(a.atoms().iter().rev().copied().collect()).unwrap();
        prop_assert_eq!(wasserstein1(&a, &shuffled), 0.0);
    }

    #[test]
    fn distinct_measures_are_separated(a in measure(), shift in 0.01f64..3.0) {
        let b = EmpiricalMeasure::from_samples(a.atoms().iter().map(|x| x + shift).collect()).unwrap();
        prop_assert!((wasserstein1(&a, &b) - shift).abs() < 1e-10);
        prop_assert!(kolmogorov(&a, &b) > 0.0);
    }

    #[test]
    fn quantile_representation(a in weighted(), b in measure()) {
        let q = common::quantile_route_w1(a.atoms(), &weights(&a), b.atoms(), &weights(&b));
        prop_assert!((wasserstein1(&a, &b) - q).abs() < 1e-10 * (1.0 + q));
    }

    #[test]
    fn quantile_inverts_cdf(a in weighted(), t in 0.001f64..1.0) {
        let x = a.quantile(t).unwrap();
        prop_assert!(a.cdf_at(x) >= t - 1e-12);
        let below = a.atoms().iter().copied().filter(|&v| v < x).fold(f64::NEG_INFINITY, f64::max);
        if below.is_finite() {
            prop_assert!(a.cdf_at(below) < t + 1e-12);
        }
    }

    #[test]
    fn j_functional_ordering(a in weighted()) {
        let (j0, j1) = j_functionals(&a);
        prop_assert!(j0 >= 0.0 && j1 >= 2.0 * j0 - 1e-12);
        let range = a.atoms()[a.len() - 1] - a.atoms()[0];
        prop_assert!(j1 <= 0.5 * range + 1e-12);
    }
}

#[test]
fn exhaustive_assignment_oracle() {
    let grid = [0, 1, 2, 3];
    let mut checked = 0;
    for na in 1..=6 {
        for nb in 1..=6 {
            if common::lcm(na, nb) > 6 {
                continue;
            }
            for a in common::multisets(&grid, na) {
                for b in common::multisets(&grid, nb) {
                    let (num, den) = common::brute_force_w1(&a, &b);
                    let ma = EmpiricalMeasure::from_samples(a.iter().map(|&x| x as f64).collect()).unwrap();
                    let mb = EmpiricalMeasure::from_samples(b.iter().map(|&x| x as f64).collect()).unwrap();
                    assert_eq!(wasserstein1(&ma, &mb), num as f64 / den as f64, "{a:?} vs {b:?}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 5000);
}

#[test]
fn uniform_j_values_match_quadrature() {
    let j0 = common::simpson(|x| x * (1.0 - x), 0.0, 1.0, 1000);
    let j1 = common::simpson(|x| (x * (1.0 - x)).sqrt(), 0.0, 1.0, 200_000);
    assert!((j0 - 1.0 / 6.0).abs() < 1e-12);
    assert!((j1 - std::f64::consts::PI / 8.0).abs() < 1e-6);
    let mut rng = rng_from_seed(11);
    let u = EmpiricalMeasure::from_samples((0..100_000).map(|_| rng.random::<f64>()).collect()).unwrap();
    let (e0, e1) = j_functionals(&u);
    assert!((e0 / j0 - 1.0).abs() < 0.02, "{e0}");
    assert!((e1 / j1 - 1.0).abs() < 0.02, "{e1}");
}

#[test]
fn kolmogorov_controlled_by_w1_for_bounded_density() {
    let mut rng = rng_from_seed(12);
    let a = EmpiricalMeasure::from_samples((0..20_000).map(|_| rng.random::<f64>()).collect()).unwrap();
    for n in [5, 50, 500] {
        let b = EmpiricalMeasure::from_samples((0..n).map(|_| rng.random::<f64>()).collect()).unwrap();
        let bound = 2.0 * wasserstein1(&a, &b).sqrt();
        assert!(kolmogorov(&a, &b) <= 1.1 * bound);
    }
}

#[test]
fn normal_tail_lemma_spot_check() {
    let phi_max = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let tail = |x: f64| 0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2);
    let sup = (1..4000).map(|k| k as f64 * 0.005).map(|x| x.powi(4) * tail(x)).fold(0.0, f64::max);
    let c = (1.0f64 + 1e-9).max(sup).max(phi_max * phi_max);
    let mut rng = rng_from_seed(13);
    let z: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let (j0, j1) = j_functionals(&EmpiricalMeasure::from_samples(z).unwrap());
    assert!((j0 - 1.0 / std::f64::consts::PI.sqrt()).abs() < 0.02);
    assert!(j1 <= 21.0 * c * j0);
}

#[test]
fn normal_moments() {
    let mut rng = rng_from_seed(14);
    let z: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let m = moment_summary(&EmpiricalMeasure::from_samples(z).unwrap()).unwrap();
    assert!((m.kurtosis.unwrap() / 3.0 - 1.0).abs() < 0.05);
    assert!(m.skewness.unwrap().abs() < 0.05);
    assert!((m.variance - 1.0).abs() < 0.02);
}

#[test]
fn symmetric_sample_has_zero_skewness() {
    let v: Vec<f64> = [-3.5, -1.25, -0.5, 0.0, 0.5, 1.25, 3.5].to_vec();
    let m = moment_summary(&EmpiricalMeasure::from_samples(v).unwrap()).unwrap();
    assert!(m.skewness.unwrap().abs() < 1e-12);
}

#[test]
fn resampling_is_inverse_transform() {
    let a = EmpiricalMeasure::from_weighted(vec![0.0, 1.0, 5.0], vec![0.2, 0.5, 0.3]).unwrap();
    let mut rng = rng_from_seed(15);
    let r = a.resample(100_000, &mut rng).unwrap();
    assert!(kolmogorov(&a, &r) < 0.01);
}
