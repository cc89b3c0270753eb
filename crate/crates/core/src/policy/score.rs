use rayon::prelude::*;

use super::state::PolicyState;
use super::surrogate::{optimal_exploration, surrogate_loss};
use crate::measures::{j1, EmpiricalMeasure};
use crate::models::{ModelSuite, Subset};
use crate::regress::{ols_fit, DesignMatrix, FitResult};

/// Relative size below which `sqrt(k̂1)` counts as an exact fit.
const ZERO_FIT_TOL: f64 = 1e-9;

/// One subset's estimated loss surrogate at the current exploration size.
#[derive(Debug, Clone)]
pub struct SubsetScore {
    pub subset: Subset,
    /// `None` when `t` does not exceed the number of regression coefficients.
    pub fit: Option<FitResult>,
    /// Number of regressors excluding the intercept.
    pub regressors: usize,
    pub k1_hat: f64,
    pub k2_hat: f64,
    /// `+∞` when `k̂1 = 0`, NaN when there is no fit.
    pub m_star_hat: f64,
    /// `+∞` when ineligible.
    pub rho: f64,
    pub eligible: bool,
    /// The fit interpolates the exploration responses (`k̂1 ≈ 0`).
    pub zero_residual: bool,
}

impl SubsetScore {
    pub fn has_fit(&self) -> bool {
        self.fit.is_some()
    }
}

/// Scores every nonempty subset against the exploration log of `state`.
/// Results are in canonical subset order.
pub fn score_subsets(state: &PolicyState, suite: &ModelSuite) -> Vec<SubsetScore> {
    let y = state.responses();
    let j1_y = EmpiricalMeasure::from_samples(y.clone()).map(|m| j1(&m)).unwrap_or(0.0);
    let y_scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = j1_y.max(1e-12 * y_scale).max(f64::MIN_POSITIVE);
    suite
        .subsets()
        .par_iter()
        .map(|&s| score_one(state, suite, s, &y, j1_y, scale))
        .collect()
}

fn score_one(state: &PolicyState, suite: &ModelSuite, s: Subset, y: &[f64], j1_y: f64, scale: f64) -> SubsetScore {
    let t = state.t();
    let features = suite.features_for(s);
    let regressors = features.len();
    let k2_hat = suite.c_ept(s) * j1_y * j1_y;
    let mut score = SubsetScore {
        subset: s,
        fit: None,
        regressors,
        k1_hat: f64::NAN,
        k2_hat,
        m_star_hat: f64::NAN,
        rho: f64::INFINITY,
        eligible: false,
        zero_residual: false,
    };
    if t <= regressors + 1 {
        return score;
    }
    let mut flat = Vec::with_capacity(t * regressors);
    for row in state.rows() {
        ModelSuite::eval_features(&features, &row[1..], &mut flat);
    }
    let fit = match DesignMatrix::from_flat_features(&flat, regressors).and_then(|d| ols_fit(&d, y)) {
        Ok(fit) => fit,
        Err(_) => return score,
    };
    let j_eps = EmpiricalMeasure::from_samples(fit.residuals.clone()).map(|m| j1(&m)).unwrap_or(f64::NAN);
    let root_k1 = 2.0 * ((regressors + 2) as f64).sqrt() * fit.sigma2_hat.sqrt() + j_eps;
    let k1_hat = root_k1 * root_k1;
    score.k1_hat = k1_hat;
    score.zero_residual = fit.rank_ok && root_k1 <= ZERO_FIT_TOL * scale;
    score.eligible = fit.rank_ok && !score.zero_residual && k1_hat.is_finite();
    if score.zero_residual {
        score.m_star_hat = f64::INFINITY;
    } else if k1_hat > 0.0 {
        score.m_star_hat = optimal_exploration(k1_hat, k2_hat, state.budget(), state.c_epr());
    }
    if score.eligible {
        let m = score.m_star_hat.max(t as f64);
        score.rho = surrogate_loss(k1_hat, k2_hat, m, state.budget(), state.c_epr()).unwrap_or(f64::INFINITY);
    }
    score.fit = Some(fit);
    score
}
