use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A regressor built from base low-fidelity outputs (1-based model indices).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Feature {
    /// `X_model^exponent`.
    Power { model: usize, exponent: u32 },
    /// `X_left · X_right` for distinct models.
    Product { left: usize, right: usize },
}

impl Feature {
    pub fn models(&self) -> Vec<usize> {
        match *self {
            Feature::Power { model, .. } => vec![model],
            Feature::Product { left, right } => vec![left, right],
        }
    }

    /// Evaluates on `x = (x_1, .., x_n)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            Feature::Power { model, exponent } => x[model - 1].powi(exponent as i32),
            Feature::Product { left, right } => x[left - 1] * x[right - 1],
        }
    }

    /// Rejects features referencing models outside `1..=n`, degenerate
    /// transforms, and duplicates.
    pub fn validate_list(features: &[Feature], n: usize) -> Result<()> {
        let mut seen = HashSet::new();
        for f in features {
            if f.models().iter().any(|&i| i == 0 || i > n) {
                return Err(Error::InvalidExpansion(format!(
                    "{f:?} references a model outside 1..={n}"
                )));
            }
            match *f {
                Feature::Power { exponent: 0, .. } => {
                    return Err(Error::InvalidExpansion(
                        "zero exponent duplicates the intercept".into(),
                    ))
                }
                Feature::Product { left, right } if left == right => {
                    return Err(Error::InvalidExpansion(
                        "self-product; use a power feature".into(),
                    ))
                }
                _ => {}
            }
            let key = match *f {
                Feature::Product { left, right } => Feature::Product {
                    left: left.min(right),
                    right: left.max(right),
                },
                ref other => other.clone(),
            };
            if !seen.insert(key) {
                return Err(Error::InvalidExpansion(format!("duplicate feature {f:?}")));
            }
        }
        Ok(())
    }
}

/// Regressor lists over all base models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expansion {
    /// `X_i` for each model.
    Identity,
    /// `X_i, X_i², X_i³` for each model.
    Cubic,
    /// `X_i`, `X_i²` and pairwise products `X_i X_j`.
    QuadraticInteractions,
    Custom(Vec<Feature>),
}

impl Expansion {
    pub fn label(&self) -> &'static str {
        match self {
            Expansion::Identity => "none",
            Expansion::Cubic => "L",
            Expansion::QuadraticInteractions => "quadratic-interactions",
            Expansion::Custom(_) => "custom",
        }
    }

    pub fn features(&self, n: usize) -> Vec<Feature> {
        let power = |model, exponent| Feature::Power { model, exponent };
        let linear = (1..=n).map(|i| power(i, 1));
        match self {
            Expansion::Identity => linear.collect(),
            Expansion::Cubic => linear
                .chain((1..=n).flat_map(|i| [power(i, 2), power(i, 3)]))
                .collect(),
            Expansion::QuadraticInteractions => linear
                .chain((1..=n).map(|i| power(i, 2)))
                .chain((1..=n).flat_map(|i| ((i + 1)..=n).map(move |j| Feature::Product { left: i, right: j })))
                .collect(),
            Expansion::Custom(list) => list.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interaction_count() {
        let f = Expansion::QuadraticInteractions.features(3);
        assert_eq!(f.len(), 9);
        assert!(Feature::validate_list(&f, 3).is_ok());
    }

    #[test]
    fn invalid_lists() {
        let out_of_range = vec![Feature::Power { model: 3, exponent: 1 }];
        assert!(Feature::validate_list(&out_of_range, 2).is_err());
        let dup = vec![
            Feature::Product { left: 1, right: 2 },
            Feature::Product { left: 2, right: 1 },
        ];
        assert!(Feature::validate_list(&dup, 2).is_err());
        assert!(Feature::validate_list(&[Feature::Product { left: 1, right: 1 }], 2).is_err());
    }

    #[test]
    fn eval() {
        let x = [2.0, 3.0];
        assert_eq!(Feature::Power { model: 2, exponent: 3 }.eval(&x), 27.0);
        assert_eq!(Feature::Product { left: 1, right: 2 }.eval(&x), 6.0);
    }
}
