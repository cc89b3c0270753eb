//! Least-squares and quantile-regression fits on exploration data.

mod design;
mod ols;
mod quantile;

pub use design::DesignMatrix;
pub use ols::{ols_fit, FitResult};
pub use quantile::{pinball_loss, quantile_fit, QuantileFit};
