use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Subset, SuiteSpec};
use crate::policy::DEFAULT_QUANTILE_LEVELS;

/// An estimation method compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    /// Whole budget spent on direct samples of `Y`.
    EcdfY,
    /// Adaptive policy with bootstrap residual noise.
    AetcD,
    /// Adaptive policy without noise.
    AetcDNo,
    /// Adaptive policy with quantile-regression emulation.
    AetcDQ,
    /// Fixed exploration size `m` on a fixed subset.
    FixedM(usize),
    /// Returns the oracle measure itself (diagnostic).
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::EcdfY => f.write_str("ecdf-y"),
            Method::AetcD => f.write_str("aetc-d"),
            Method::AetcDNo => f.write_str("aetc-d-no"),
            Method::AetcDQ => f.write_str("aetc-d-q"),
            Method::FixedM(m) => write!(f, "fixed-m:{m}"),
            Method::Oracle => f.write_str("oracle"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ecdf-y" => Method::EcdfY,
            "aetc-d" => Method::AetcD,
            "aetc-d-no" => Method::AetcDNo,
            "aetc-d-q" => Method::AetcDQ,
            "oracle" => Method::Oracle,
            _ => match s.strip_prefix("fixed-m:").map(str::parse::<usize>) {
                Some(Ok(m)) if m > 0 => Method::FixedM(m),
                _ => return Err(Error::Config(format!("unknown method `{s}`"))),
            },
        })
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.to_string()
    }
}

/// How an estimate is compared with the oracle measure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// `W1` of the full estimate against the oracle.
    #[default]
    Full,
    /// `W1` of `eval_samples` inverse-transform draws from the estimate.
    Sampled,
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalMode::Full => "full",
            EvalMode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: SuiteSpec,
    pub methods: Vec<Method>,
    pub budgets: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_eval_samples")]
    pub eval_samples: usize,
    #[serde(default = "default_oracle_samples")]
    pub oracle_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub eval: EvalMode,
    #[serde(default = "default_quantile_levels")]
    pub quantile_levels: usize,
    /// Subset used by `fixed-m` methods; the pilot optimum when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_subset: Option<Subset>,
    /// Pilot sample size for oracle constants.
    #[serde(default = "default_pilot_samples")]
    pub pilot_samples: usize,
}

fn default_replicates() -> usize {
    100
}

fn default_eval_samples() -> usize {
    200
}

fn default_oracle_samples() -> usize {
    1_000_000
}

fn default_quantile_levels() -> usize {
    DEFAULT_QUANTILE_LEVELS
}

fn default_pilot_samples() -> usize {
    100_000
}

impl ExperimentConfig {
    /// A config with default knobs.
    pub fn new(suite: SuiteSpec, methods: Vec<Method>, budgets: Vec<f64>) -> Self {
        Self {
            suite,
            methods,
            budgets,
            replicates: default_replicates(),
            eval_samples: default_eval_samples(),
            oracle_samples: default_oracle_samples(),
            seed: 0,
            eval: EvalMode::default(),
            quantile_levels: default_quantile_levels(),
            fixed_subset: None,
            pilot_samples: default_pilot_samples(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.budgets.is_empty() {
            return Err(Error::Config("at least one budget is required".into()));
        }
        if self.budgets.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::Config("budgets must be positive and finite".into()));
        }
        if self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("budgets must be strictly increasing".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.oracle_samples == 0 || self.eval_samples == 0 {
            return Err(Error::Config("sample counts must be positive".into()));
        }
        if self.quantile_levels == 0 {
            return Err(Error::Config("quantile_levels must be positive".into()));
        }
        let needs_pilot = self.fixed_subset.is_none() && self.methods.iter().any(|m| matches!(m, Method::FixedM(_)));
        if needs_pilot && self.pilot_samples < 3 {
            return Err(Error::Config("pilot_samples too small".into()));
        }
        Ok(())
    }
}
