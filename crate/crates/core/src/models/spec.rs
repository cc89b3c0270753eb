use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    heteroscedastic_suite, ishigami_suite, table_suite, Expansion, IshigamiParams, IshigamiVariant,
    ModelSuite, SampleTable,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionName {
    #[default]
    #[serde(rename = "none")]
    None,
    /// Adds squares and cubes of every model output.
    #[serde(rename = "L")]
    L,
    #[serde(rename = "quadratic-interactions")]
    QuadraticInteractions,
}

impl ExpansionName {
    pub fn expansion(self) -> Expansion {
        match self {
            ExpansionName::None => Expansion::Identity,
            ExpansionName::L => Expansion::Cubic,
            ExpansionName::QuadraticInteractions => Expansion::QuadraticInteractions,
        }
    }
}

/// JSON description of a suite: a built-in generator or a sample table, plus
/// parameter overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SuiteSpec {
    Ishigami {
        variant: IshigamiVariant,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cost_y: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        costs: Option<Vec<f64>>,
        #[serde(default)]
        expansion: ExpansionName,
    },
    Heteroscedastic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cost_y: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cost_x: Option<f64>,
        #[serde(default)]
        expansion: ExpansionName,
    },
    Table {
        path: PathBuf,
        /// Defaults to the table path with a `.json` extension.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        costs_path: Option<PathBuf>,
        #[serde(default)]
        expansion: ExpansionName,
    },
}

impl SuiteSpec {
    pub fn ishigami(variant: IshigamiVariant, expansion: ExpansionName) -> Self {
        SuiteSpec::Ishigami {
            variant,
            a: None,
            b: None,
            c: None,
            d: None,
            cost_y: None,
            costs: None,
            expansion,
        }
    }

    /// Builds the suite. Relative table paths resolve against `base_dir`.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<ModelSuite> {
        match self {
            SuiteSpec::Ishigami {
                variant,
                a,
                b,
                c,
                d,
                cost_y,
                costs,
                expansion,
            } => {
                let defaults = match variant {
                    IshigamiVariant::Perfect => IshigamiParams::default(),
                    IshigamiVariant::Approx => IshigamiParams::approx(),
                };
                let costs = match costs {
                    None => defaults.costs,
                    Some(v) if v.len() == 2 => [v[0], v[1]],
                    Some(v) => {
                        return Err(Error::Config(format!(
                            "ishigami suites have 2 low-fidelity models, got {} costs",
                            v.len()
                        )))
                    }
                };
                let params = IshigamiParams {
                    a: a.unwrap_or(defaults.a),
                    b: b.unwrap_or(defaults.b),
                    c: c.unwrap_or(defaults.c),
                    d: d.unwrap_or(defaults.d),
                    cost_y: cost_y.unwrap_or(defaults.cost_y),
                    costs,
                };
                ishigami_suite(*variant, params)?.expanded(&expansion.expansion())
            }
            SuiteSpec::Heteroscedastic {
                cost_y,
                cost_x,
                expansion,
            } => heteroscedastic_suite(cost_y.unwrap_or(1.0), cost_x.unwrap_or(0.01))?
                .expanded(&expansion.expansion()),
            SuiteSpec::Table {
                path,
                costs_path,
                expansion,
            } => {
                let resolve = |p: &Path| match base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.to_path_buf(),
                };
                let csv = resolve(path);
                let sidecar = costs_path
                    .as_deref()
                    .map(resolve)
                    .unwrap_or_else(|| csv.with_extension("json"));
                table_suite(SampleTable::read(&csv, &sidecar)?)?.expanded(&expansion.expansion())
            }
        }
    }
}
