use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least-squares fit of `f(m) = α1/sqrt(m) + α2/sqrt(B/c_epr − m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffFit {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Euclidean norm of the fit residuals.
    pub residual_norm: f64,
    /// `B / c_epr`.
    pub horizon: f64,
    /// Set when a negative coefficient was clipped to zero.
    pub clipped: bool,
}

impl TradeoffFit {
    pub fn eval(&self, m: f64) -> f64 {
        self.alpha1 / m.sqrt() + self.alpha2 / (self.horizon - m).sqrt()
    }

    /// `argmin_m f(m) = (B/c_epr) / (1 + (α2/α1)^{2/3})`.
    pub fn minimizer(&self) -> f64 {
        if self.alpha1 == 0.0 {
            return 0.0;
        }
        self.horizon / (1.0 + (self.alpha2 / self.alpha1).powf(2.0 / 3.0))
    }
}

/// Fits the two coefficients by linear least squares on the basis
/// `(m^{-1/2}, (B/c_epr − m)^{-1/2})`. A negative coefficient is clipped to
/// zero and the other refitted alone.
pub fn fit_tradeoff_curve(points: &[(f64, f64)], budget: f64, c_epr: f64) -> Result<TradeoffFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: points.len() });
    }
    let horizon = budget / c_epr;
    if let Some(&(m, _)) = points.iter().find(|(m, _)| !(*m > 0.0 && *m < horizon)) {
        return Err(Error::Domain(format!("exploration size {m} outside (0, {horizon})")));
    }
    let a = DMatrix::from_fn(points.len(), 2, |i, j| {
        let m = points[i].0;
        if j == 0 {
            m.powf(-0.5)
        } else {
            (horizon - m).powf(-0.5)
        }
    });
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = points.len() as f64 * f64::EPSILON * smax;
    if svd.singular_values.min() <= tol * 1e4 {
        return Err(Error::Domain("degenerate basis: exploration sizes do not vary".into()));
    }
    let coef = svd.solve(&y, tol).map_err(|e| Error::Domain(e.to_string()))?;
    let (mut a1, mut a2) = (coef[0], coef[1]);
    let clipped = a1 < 0.0 || a2 < 0.0;
    if clipped {
        log::warn!("negative trade-off coefficient ({a1}, {a2}) clipped to zero");
        let single = |col: usize| {
            let c = a.column(col);
            (c.dot(&y) / c.dot(&c)).max(0.0)
        };
        let sse = |a1: f64, a2: f64| (&a * DVector::from_vec(vec![a1, a2]) - &y).norm_squared();
        let only1 = single(0);
        let only2 = single(1);
        (a1, a2) = if sse(only1, 0.0) <= sse(0.0, only2) { (only1, 0.0) } else { (0.0, only2) };
    }
    let residual_norm = (&a * DVector::from_vec(vec![a1, a2]) - &y).norm();
    Ok(TradeoffFit { alpha1: a1, alpha2: a2, residual_norm, horizon, clipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const MS: [f64; 9] = [10.0, 30.0, 50.0, 100.0, 200.0, 300.0, 400.0, 500.0, 600.0];

    fn points(a1: f64, a2: f64, horizon: f64) -> Vec<(f64, f64)> {
        MS.iter().map(|&m| (m, a1 / m.sqrt() + a2 / (horizon - m).sqrt())).collect()
    }

    #[test]
    fn recovers_exact_coefficients() {
        let c = 1.051;
        let fit = fit_tradeoff_curve(&points(2.0, 3.0, 1e3 / c), 1e3, c).unwrap();
        assert_abs_diff_eq!(fit.alpha1, 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.alpha2, 3.0, epsilon = 1e-8);
        assert!(fit.residual_norm < 1e-10);
        assert!(!fit.clipped);
        let m = fit.minimizer();
        let h = 1e-3 * m;
        assert!(fit.eval(m) < fit.eval(m + h) && fit.eval(m) < fit.eval(m - h));
    }

    #[test]
    fn zero_second_coefficient() {
        let fit = fit_tradeoff_curve(&points(2.0, 0.0, 900.0), 900.0, 1.0).unwrap();
        assert_abs_diff_eq!(fit.alpha2, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn clips_negative_coefficient() {
        let fit = fit_tradeoff_curve(&points(2.0, -0.5, 900.0), 900.0, 1.0).unwrap();
        assert!(fit.clipped);
        assert!(fit.alpha1 >= 0.0 && fit.alpha2 == 0.0);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_tradeoff_curve(&[(10.0, 1.0), (10.0, 2.0), (10.0, 3.0)], 100.0, 1.0).is_err());
        assert!(fit_tradeoff_curve(&[(10.0, 1.0), (20.0, 2.0)], 100.0, 1.0).is_err());
        assert!(fit_tradeoff_curve(&[(10.0, 1.0), (20.0, 2.0), (100.0, 1.0)], 100.0, 1.0).is_err());
    }
}
