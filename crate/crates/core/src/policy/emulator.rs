use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Feature, ModelSuite, Subset};
use crate::regress::{quantile_fit, DesignMatrix, FitResult, QuantileFit};
use crate::rng::SuiteRng;

/// Number of quantile levels `j/(K+1)` used by the quantile variant.
pub const DEFAULT_QUANTILE_LEVELS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExploitVariant {
    Standard,
    NoNoise,
    Quantile,
}

impl fmt::Display for ExploitVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard",
            Self::NoNoise => "no-noise",
            Self::Quantile => "quantile",
        })
    }
}

impl FromStr for ExploitVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Self::Standard),
            "no-noise" => Ok(Self::NoNoise),
            "quantile" => Ok(Self::Quantile),
            _ => Err(Error::Config(format!("unknown exploitation variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum EmulatorKind {
    /// Bootstrap pool of the exploration residuals.
    Residuals(Vec<f64>),
    NoNoise,
    Quantile(QuantileFit),
}

/// Exploitation-time sampler `Y' = X_Sᵀβ̂_S + ε̂_S`.
#[derive(Debug, Clone)]
pub struct Emulator {
    subset: Subset,
    features: Vec<Feature>,
    beta_hat: Vec<f64>,
    kind: EmulatorKind,
}

impl Emulator {
    /// Builds the emulator from the exploration fit of `subset`. `design` and
    /// `y` are the exploration data the fit was computed on; they are only
    /// used by the quantile variant.
    pub fn new(
        subset: Subset,
        features: Vec<Feature>,
        fit: &FitResult,
        variant: ExploitVariant,
        design: &DesignMatrix,
        y: &[f64],
        quantile_levels: usize,
    ) -> Result<Self> {
        let kind = match variant {
            ExploitVariant::Standard => EmulatorKind::Residuals(fit.residuals.clone()),
            ExploitVariant::NoNoise => EmulatorKind::NoNoise,
            ExploitVariant::Quantile => {
                if quantile_levels == 0 {
                    return Err(Error::Config("quantile grid must have at least one level".into()));
                }
                let k = quantile_levels as f64;
                let taus: Vec<f64> = (1..=quantile_levels).map(|j| j as f64 / (k + 1.0)).collect();
                EmulatorKind::Quantile(quantile_fit(design, y, &taus)?)
            }
        };
        Ok(Self { subset, features, beta_hat: fit.beta_hat.clone(), kind })
    }

    /// A noiseless or bootstrap emulator from explicit coefficients.
    pub fn from_parts(subset: Subset, features: Vec<Feature>, beta_hat: Vec<f64>, kind: EmulatorKind) -> Result<Self> {
        if beta_hat.len() != features.len() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} regressors plus intercept",
                beta_hat.len(),
                features.len()
            )));
        }
        if let EmulatorKind::Quantile(q) = &kind {
            if q.betas.iter().any(|b| b.len() != beta_hat.len()) {
                return Err(Error::DimensionMismatch("quantile coefficient width".into()));
            }
        }
        Ok(Self { subset, features, beta_hat, kind })
    }

    pub fn subset(&self) -> Subset {
        self.subset
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn beta_hat(&self) -> &[f64] {
        &self.beta_hat
    }

    pub fn kind(&self) -> &EmulatorKind {
        &self.kind
    }

    /// Design row `(1, f_1(x), ..)` for low-fidelity outputs `x = (x_1, .., x_n)`.
    pub fn design_row(&self, x: &[f64], row: &mut Vec<f64>) {
        row.clear();
        row.push(1.0);
        ModelSuite::eval_features(&self.features, x, row);
    }

    /// Uniform index into the residual pool, if there is one.
    pub fn residual_index(&self, rng: &mut SuiteRng) -> Option<usize> {
        match &self.kind {
            EmulatorKind::Residuals(pool) if !pool.is_empty() => Some(rng.random_range(0..pool.len())),
            _ => None,
        }
    }

    /// One emulated response for the design row `row`.
    pub fn sample_row(&self, row: &[f64], rng: &mut SuiteRng) -> f64 {
        match &self.kind {
            EmulatorKind::Quantile(q) => q.predict(rng.random_range(0..q.taus.len()), row),
            EmulatorKind::Residuals(pool) => {
                let mean = dot(&self.beta_hat, row);
                match self.residual_index(rng) {
                    Some(i) => mean + pool[i],
                    None => mean,
                }
            }
            EmulatorKind::NoNoise => dot(&self.beta_hat, row),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
