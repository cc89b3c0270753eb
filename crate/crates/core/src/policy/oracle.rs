use serde::Serialize;

use super::surrogate::{optimal_exploration, optimal_value};
use crate::error::{Error, Result};
use crate::measures::{j_functionals, EmpiricalMeasure};
use crate::models::{ModelSuite, Subset};
use crate::regress::{ols_fit, DesignMatrix};
use crate::rng::SuiteRng;

/// Population constants of one subset's loss bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsetConstants {
    pub subset: Subset,
    pub k1: f64,
    pub k2: f64,
}

/// Pilot-sample estimates of the constants for every subset, plus the
/// functionals of `F_Y`.
#[derive(Debug, Clone, Serialize)]
pub struct PilotConstants {
    pub samples: usize,
    pub j0_y: f64,
    pub j1_y: f64,
    pub subsets: Vec<SubsetConstants>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOptimum {
    pub subset: Subset,
    pub m_star: f64,
    pub g_star: f64,
}

/// `S_opt = argmin_S G*_S`, ties broken by canonical subset order.
pub fn oracle_optimum(stats: &[SubsetConstants], budget: f64, c_epr: f64) -> Result<OracleOptimum> {
    let mut sorted: Vec<_> = stats.to_vec();
    sorted.sort_by_key(|c| c.subset);
    let mut best: Option<OracleOptimum> = None;
    for c in &sorted {
        let g = optimal_value(c.k1, c.k2, budget, c_epr);
        if best.as_ref().is_none_or(|b| g < b.g_star) {
            best = Some(OracleOptimum {
                subset: c.subset,
                m_star: optimal_exploration(c.k1, c.k2, budget, c_epr),
                g_star: g,
            });
        }
    }
    best.ok_or_else(|| Error::Config("no subset constants supplied".into()))
}

/// `sqrt(c_0 J_0²(F_Y) / 2B) / G*_{S_opt}`; independent of `B`.
pub fn efficiency_ratio(k1_opt: f64, k2_opt: f64, j0_y: f64, c0: f64, budget: f64, c_epr: f64) -> f64 {
    (c0 * j0_y * j0_y / (2.0 * budget)).sqrt() / optimal_value(k1_opt, k2_opt, budget, c_epr)
}

/// Estimates `k1(S) = (2 sqrt(s+1) σ_S + J_1(F_{ε_S}))²` and
/// `k2(S) = c_ept(S) J_1²(F_Y)` from `samples` joint draws.
pub fn pilot_constants(suite: &ModelSuite, samples: usize, rng: &mut SuiteRng) -> Result<PilotConstants> {
    let width = suite.n() + 1;
    let mut log = vec![0.0; samples * width];
    for row in log.chunks_exact_mut(width) {
        suite.draw(rng, row);
    }
    let y: Vec<f64> = log.chunks_exact(width).map(|r| r[0]).collect();
    let (j0_y, j1_y) = j_functionals(&EmpiricalMeasure::from_samples(y.clone())?);
    let mut subsets = Vec::new();
    let mut feats = Vec::new();
    for s in suite.subsets() {
        let features = suite.features_for(s);
        let mut flat = Vec::with_capacity(samples * features.len());
        for row in log.chunks_exact(width) {
            feats.clear();
            ModelSuite::eval_features(&features, &row[1..], &mut feats);
            flat.extend_from_slice(&feats);
        }
        let design = DesignMatrix::from_flat_features(&flat, features.len())?;
        let fit = ols_fit(&design, &y)?;
        let (_, j1_eps) = j_functionals(&EmpiricalMeasure::from_samples(fit.residuals.clone())?);
        let sf = features.len() as f64;
        let k1 = (2.0 * (sf + 1.0).sqrt() * fit.sigma2_hat.sqrt() + j1_eps).powi(2);
        subsets.push(SubsetConstants { subset: s, k1, k2: suite.c_ept(s) * j1_y * j1_y });
    }
    Ok(PilotConstants { samples, j0_y, j1_y, subsets })
}
