use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Regression design: `m` rows of `(1, features...)`, intercept first.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    matrix: DMatrix<f64>,
}

impl DesignMatrix {
    /// Builds a design from per-sample feature rows; the intercept column is
    /// prepended. All rows must have the same length.
    pub fn from_feature_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != width) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} features, expected {width}",
                rows[bad].as_ref().len()
            )));
        }
        let matrix = DMatrix::from_fn(rows.len(), width + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                rows[i].as_ref()[j - 1]
            }
        });
        Ok(Self { matrix })
    }

    /// Builds a design from a flat row-major feature buffer with `width`
    /// features per row.
    pub fn from_flat_features(features: &[f64], width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::DimensionMismatch("zero-width feature buffer".into()));
        }
        if !features.len().is_multiple_of(width) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not split into rows of {width}",
                features.len()
            )));
        }
        let m = features.len() / width;
        let matrix = DMatrix::from_fn(m, width + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                features[i * width + j - 1]
            }
        });
        Ok(Self { matrix })
    }

    pub fn intercept_only(m: usize) -> Self {
        Self {
            matrix: DMatrix::from_element(m, 1, 1.0),
        }
    }

    /// Wraps a full matrix; the first column must be all ones.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.ncols() == 0 || matrix.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::DimensionMismatch(
                "first design column must be the all-ones intercept".into(),
            ));
        }
        Ok(Self { matrix })
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.matrix.row(i).iter().copied().collect()
    }

    pub(crate) fn check_response(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} responses for {} design rows",
                y.len(),
                self.rows()
            )));
        }
        if self.rows() <= self.cols() {
            return Err(Error::InsufficientSamples {
                needed: self.cols() + 1,
                got: self.rows(),
            });
        }
        Ok(())
    }
}
