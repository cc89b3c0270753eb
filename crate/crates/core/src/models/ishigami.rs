use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{JointSampler, ModelSuite};
use crate::error::Result;
use crate::rng::SuiteRng;

/// Which pair of low-fidelity models accompanies the Ishigami output
///
/// `Y = sin Z1 + a sin²Z2 + b Z3⁴ sin Z1 + c sin³Z4 + d sin⁴Z5`, `Z_i ~ U(−π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IshigamiVariant {
    /// `X1` drops the `d` term, `X2` drops both `c` and `d` terms. The linear
    /// model holds exactly.
    Perfect,
    /// `X1 = sin Z1 + 0.95a sin²Z2 + b Z3⁴ sin Z1`,
    /// `X2 = sin Z1 + 0.6a sin²Z2 + 9b Z3² sin Z1`. Linearity only holds
    /// approximately.
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IshigamiParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub cost_y: f64,
    pub costs: [f64; 2],
}

impl Default for IshigamiParams {
    /// `a = 5, b = 0.1, c = 1, d = 0.1`, costs `(1, 0.05, 0.001)`.
    fn default() -> Self {
        Self {
            a: 5.0,
            b: 0.1,
            c: 1.0,
            d: 0.1,
            cost_y: 1.0,
            costs: [0.05, 0.001],
        }
    }
}

impl IshigamiParams {
    /// Defaults for the approximate variant: `c = d = 0`.
    pub fn approx() -> Self {
        Self {
            c: 0.0,
            d: 0.0,
            ..Self::default()
        }
    }
}

struct Ishigami {
    variant: IshigamiVariant,
    p: IshigamiParams,
}

impl JointSampler for Ishigami {
    fn n_models(&self) -> usize {
        2
    }

    fn draw(&self, rng: &mut SuiteRng, out: &mut [f64]) {
        let mut z = [0.0; 5];
        for v in &mut z {
            *v = PI * (2.0 * rng.random::<f64>() - 1.0);
        }
        let s1 = z[0].sin();
        let s2 = z[1].sin();
        let s4 = z[3].sin();
        let s5 = z[4].sin();
        let z3sq = z[2] * z[2];
        let IshigamiParams { a, b, c, d, .. } = self.p;
        let core = s1 + a * s2 * s2 + b * z3sq * z3sq * s1;
        let y = core + c * s4 * s4 * s4 + d * (s5 * s5) * (s5 * s5);
        out[0] = y;
        match self.variant {
            IshigamiVariant::Perfect => {
                out[1] = core + c * s4 * s4 * s4;
                out[2] = core;
            }
            IshigamiVariant::Approx => {
                out[1] = s1 + 0.95 * a * s2 * s2 + b * z3sq * z3sq * s1;
                out[2] = s1 + 0.6 * a * s2 * s2 + 9.0 * b * z3sq * s1;
            }
        }
    }
}

pub fn ishigami_suite(variant: IshigamiVariant, params: IshigamiParams) -> Result<ModelSuite> {
    let name = match variant {
        IshigamiVariant::Perfect => "ishigami-perfect",
        IshigamiVariant::Approx => "ishigami-approx",
    };
    ModelSuite::new(
        name,
        Arc::new(Ishigami { variant, p: params }),
        params.cost_y,
        params.costs.to_vec(),
    )
}

struct Heteroscedastic;

impl JointSampler for Heteroscedastic {
    fn n_models(&self) -> usize {
        1
    }

    fn draw(&self, rng: &mut SuiteRng, out: &mut [f64]) {
        let x = 2.0 * rng.random::<f64>();
        let eta = 2.0 * rng.random::<f64>() - 1.0;
        out[0] = x + x.abs() * eta;
        out[1] = x;
    }
}

/// Single-surrogate suite with noise that scales with the regressor:
/// `X1 ~ U(0, 2)`, `η ~ U(−1, 1)` independent, `Y = X1 + |X1| η`.
///
/// The conditional quantiles of `Y` are linear in `X1` while the residual is
/// not independent of `X1`.
pub fn heteroscedastic_suite(cost_y: f64, cost_x: f64) -> Result<ModelSuite> {
    ModelSuite::new("heteroscedastic", Arc::new(Heteroscedastic), cost_y, vec![cost_x])
}
