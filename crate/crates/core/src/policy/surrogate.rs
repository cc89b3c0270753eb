use crate::error::{Error, Result};

/// `G(m) = sqrt(k1/m) + sqrt(k2/(B − c_epr m))` on `0 < m < B/c_epr`.
pub fn surrogate_loss(k1: f64, k2: f64, m: f64, budget: f64, c_epr: f64) -> Result<f64> {
    if !(m > 0.0 && c_epr * m < budget) {
        return Err(Error::Domain(format!(
            "exploration rate {m} outside (0, {})",
            budget / c_epr
        )));
    }
    Ok((k1 / m).sqrt() + (k2 / (budget - c_epr * m)).sqrt())
}

/// Minimizer of [`surrogate_loss`]: `B / (c_epr + (c_epr² k2 / k1)^{1/3})`.
pub fn optimal_exploration(k1: f64, k2: f64, budget: f64, c_epr: f64) -> f64 {
    budget / (c_epr + (c_epr * c_epr * k2 / k1).cbrt())
}

/// Minimum of [`surrogate_loss`]: `((c_epr k1)^{1/3} + k2^{1/3})^{3/2} / sqrt(B)`.
pub fn optimal_value(k1: f64, k2: f64, budget: f64, c_epr: f64) -> f64 {
    ((c_epr * k1).cbrt() + k2.cbrt()).powf(1.5) / budget.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn loss_examples() {
        assert_abs_diff_eq!(surrogate_loss(1.0, 1.0, 2.0, 4.0, 1.0).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            surrogate_loss(0.0, 3.0, 1.0, 4.0, 1.0).unwrap(),
            (3.0f64 / 3.0).sqrt(),
            epsilon = 1e-15
        );
        assert!(surrogate_loss(1.0, 1.0, 4.0, 4.0, 1.0).is_err());
        assert!(surrogate_loss(1.0, 1.0, 0.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn optimum_examples() {
        assert_abs_diff_eq!(optimal_exploration(2.0, 2.0, 10.0, 1.0), 5.0, epsilon = 1e-12);
        assert!(optimal_exploration(1.0, 1e12, 10.0, 1.0) < 1e-3);
        let m = optimal_exploration(4.0, 1.0, 100.0, 1.0);
        assert_abs_diff_eq!(m, 100.0 / (1.0 + 0.25f64.cbrt()), epsilon = 1e-12);
        assert_abs_diff_eq!(m, 61.3511790, epsilon = 1e-6);
        assert_abs_diff_eq!(
            surrogate_loss(4.0, 1.0, m, 100.0, 1.0).unwrap(),
            optimal_value(4.0, 1.0, 100.0, 1.0),
            epsilon = 1e-10
        );
    }

    #[test]
    fn scales_linearly_in_budget() {
        let a = optimal_exploration(0.3, 2.0, 100.0, 1.2);
        let b = optimal_exploration(0.3, 2.0, 700.0, 1.2);
        assert_abs_diff_eq!(b / a, 7.0, epsilon = 1e-12);
    }
}
