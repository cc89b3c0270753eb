//! Multifidelity model suites: joint samplers of `(Y, X_1..X_n)` with declared
//! per-model costs and per-subset regressor lists.

mod features;
mod ishigami;
mod spec;
mod subset;
mod table;

use std::fmt;
use std::sync::Arc;

pub use features::{Expansion, Feature};
pub use ishigami::{heteroscedastic_suite, ishigami_suite, IshigamiParams, IshigamiVariant};
pub use spec::{ExpansionName, SuiteSpec};
pub use subset::Subset;
pub use table::{table_suite, CostSidecar, SampleTable};

use crate::error::{Error, Result};
use crate::measures::EmpiricalMeasure;
use crate::rng::SuiteRng;

/// Largest supported number of low-fidelity models (subset enumeration is
/// `2^n − 1`).
pub const MAX_MODELS: usize = 16;

/// A procedure producing one joint draw.
pub trait JointSampler: Send + Sync {
    /// Number of low-fidelity models `n`.
    fn n_models(&self) -> usize;

    /// Writes `(y, x_1, .., x_n)` into `out` (length `n + 1`).
    fn draw(&self, rng: &mut SuiteRng, out: &mut [f64]);

    /// The exact law of `Y` when it is a finite measure (tabulated suites).
    fn exact_reference(&self) -> Option<EmpiricalMeasure> {
        None
    }
}

/// The environment the policy acts on.
#[derive(Clone)]
pub struct ModelSuite {
    name: String,
    sampler: Arc<dyn JointSampler>,
    cost_y: f64,
    costs: Vec<f64>,
    features: Vec<Feature>,
}

impl fmt::Debug for ModelSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSuite")
            .field("name", &self.name)
            .field("cost_y", &self.cost_y)
            .field("costs", &self.costs)
            .field("features", &self.features)
            .finish()
    }
}

impl ModelSuite {
    /// A suite whose subset `S` regresses on the identity features `X_i, i ∈ S`.
    pub fn new(
        name: impl Into<String>,
        sampler: Arc<dyn JointSampler>,
        cost_y: f64,
        costs: Vec<f64>,
    ) -> Result<Self> {
        let n = sampler.n_models();
        if n == 0 || n > MAX_MODELS {
            return Err(Error::Config(format!(
                "number of low-fidelity models must be in 1..={MAX_MODELS}, got {n}"
            )));
        }
        if costs.len() != n {
            return Err(Error::Config(format!("{} costs given for {n} models", costs.len())));
        }
        if !(cost_y.is_finite() && cost_y > 0.0) || costs.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::Config("model costs must be positive and finite".into()));
        }
        Ok(Self {
            name: name.into(),
            sampler,
            cost_y,
            costs,
            features: Expansion::Identity.features(n),
        })
    }

    /// Replaces the regressor list. Subsets are still enumerated over the base
    /// models and exploitation costs are unchanged.
    pub fn expanded(&self, expansion: &Expansion) -> Result<Self> {
        let features = expansion.features(self.n());
        Feature::validate_list(&features, self.n())?;
        let mut out = self.clone();
        out.features = features;
        if *expansion != Expansion::Identity {
            out.name = format!("{}+{}", self.name, expansion.label());
        }
        Ok(out)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn cost_y(&self) -> f64 {
        self.cost_y
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Cost of one exploration round, `c_0 + Σ c_i`.
    pub fn c_epr(&self) -> f64 {
        self.cost_y + self.costs.iter().sum::<f64>()
    }

    /// Cost of one exploitation sample of `S`, `Σ_{i∈S} c_i`.
    pub fn c_ept(&self, s: Subset) -> f64 {
        s.models().iter().map(|&i| self.costs[i - 1]).sum()
    }

    /// Nonempty subsets in canonical order (cardinality, then lexicographic).
    pub fn subsets(&self) -> Vec<Subset> {
        Subset::all_nonempty(self.n())
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    /// Regressors available to `S`: every feature whose models lie in `S`.
    pub fn features_for(&self, s: Subset) -> Vec<Feature> {
        self.features
            .iter()
            .filter(|f| f.models().iter().all(|&i| s.contains(i)))
            .cloned()
            .collect()
    }

    /// Evaluates the regressors of `S` on one joint draw's low-fidelity
    /// outputs `x = (x_1, .., x_n)`, appending to `out`.
    pub fn eval_features(features: &[Feature], x: &[f64], out: &mut Vec<f64>) {
        out.extend(features.iter().map(|f| f.eval(x)));
    }

    /// One joint draw `(y, x_1, .., x_n)`.
    pub fn draw(&self, rng: &mut SuiteRng, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n() + 1);
        self.sampler.draw(rng, out);
    }

    /// Reference measure for `Y`: the exact tabulated law when available,
    /// otherwise `count` fresh draws.
    pub fn reference_measure(&self, count: usize, rng: &mut SuiteRng) -> Result<EmpiricalMeasure> {
        if let Some(m) = self.sampler.exact_reference() {
            return Ok(m);
        }
        let mut buf = vec![0.0; self.n() + 1];
        let ys = (0..count)
            .map(|_| {
                self.draw(rng, &mut buf);
                buf[0]
            })
            .collect();
        EmpiricalMeasure::from_samples(ys)
    }
}
