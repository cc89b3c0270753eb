use nalgebra::DVector;

use super::DesignMatrix;
use crate::error::Result;

/// Least-squares fit with residuals and the model-variance estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub beta_hat: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `‖residuals‖² / (m − cols)`.
    pub sigma2_hat: f64,
    /// False when the design is numerically rank deficient; `beta_hat` is then
    /// the minimum-norm solution.
    pub rank_ok: bool,
}

/// Ordinary least squares via Householder QR.
///
/// The singular values of `Z` are those of the triangular factor, so the rank
/// test runs an SVD on the small `cols × cols` factor only.
pub fn ols_fit(z: &DesignMatrix, y: &[f64]) -> Result<FitResult> {
    z.check_response(y)?;
    let (m, p) = (z.rows(), z.cols());
    let yv = DVector::from_column_slice(y);
    let qr = z.matrix().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let qty = q.transpose() * &yv;

    let svd = r.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let tol = m as f64 * f64::EPSILON * smax;
    let rank_ok = smax > 0.0 && smin > tol;

    let beta = if rank_ok {
        r.solve_upper_triangular(&qty)
            .expect("triangular factor is nonsingular when rank_ok")
    } else {
        svd.solve(&qty, tol).expect("svd computed with both factors")
    };

    let fitted = z.matrix() * &beta;
    let residuals: Vec<f64> = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    Ok(FitResult {
        beta_hat: beta.iter().copied().collect(),
        residuals,
        sigma2_hat: rss / (m - p) as f64,
        rank_ok,
    })
}
