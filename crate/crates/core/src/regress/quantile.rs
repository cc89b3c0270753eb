//! Linear quantile regression by an exact vertex-descent (simplex) method.
//!
//! The pinball objective `Σ ρ_τ(y_i − z_iᵀβ)` is convex and piecewise linear;
//! its minimum is attained at a vertex where `p = cols` residuals vanish. Each
//! iteration holds such a basis, evaluates the directional derivative along
//! the `2p` edges that release one basic residual, and performs an exact line
//! search (a weighted-median scan over the kinks) along the steepest edge.
//! Successive levels of the τ grid warm-start from the previous basis.

use nalgebra::{DMatrix, DVector};

use super::{ols_fit, DesignMatrix};
use crate::error::{Error, Result};

/// `ρ_τ(x) = x (τ − 1{x < 0})`.
pub fn pinball_loss(x: f64, tau: f64) -> f64 {
    if x < 0.0 {
        x * (tau - 1.0)
    } else {
        x * tau
    }
}

/// Coefficient vectors for a strictly increasing grid of quantile levels.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFit {
    pub taus: Vec<f64>,
    pub betas: Vec<Vec<f64>>,
}

impl QuantileFit {
    /// Evaluates `zᵀβ(τ_k)` for the `k`-th level on a full design row
    /// (intercept included).
    pub fn predict(&self, k: usize, row: &[f64]) -> f64 {
        self.betas[k].iter().zip(row).map(|(b, x)| b * x).sum()
    }
}

/// Fits `β̂(τ) = argmin (1/m) Σ ρ_τ(y − zᵀβ)` for every level in `taus`.
///
/// Where the minimizer is not unique the lexicographically smallest optimal
/// vertex reachable along zero-slope edges is returned, e.g. the lower median
/// for an intercept-only fit at τ = 0.5 on an even sample.
pub fn quantile_fit(z: &DesignMatrix, y: &[f64], taus: &[f64]) -> Result<QuantileFit> {
    z.check_response(y)?;
    if taus.is_empty() {
        return Err(Error::Domain("empty quantile grid".into()));
    }
    if taus.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(Error::Domain("quantile levels must lie in (0, 1)".into()));
    }
    if taus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("quantile levels must be strictly increasing".into()));
    }
    let mut solver = Vertex::new(z, y)?;
    let betas = taus
        .iter()
        .map(|&tau| solver.solve(tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantileFit {
        taus: taus.to_vec(),
        betas,
    })
}

struct Vertex<'a> {
    rows: Vec<f64>, // row-major m × p
    y: &'a [f64],
    m: usize,
    p: usize,
    basis: Vec<usize>,
    zero_tol: f64,
    max_iter: usize,
}

impl<'a> Vertex<'a> {
    fn new(z: &DesignMatrix, y: &'a [f64]) -> Result<Self> {
        let (m, p) = (z.rows(), z.cols());
        let mat = z.matrix();
        let mut rows = Vec::with_capacity(m * p);
        for i in 0..m {
            rows.extend(mat.row(i).iter());
        }
        let yscale = y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let mut v = Self {
            rows,
            y,
            m,
            p,
            basis: Vec::new(),
            zero_tol: 1e-12 * yscale,
            max_iter: 50 * m + 1000,
        };
        v.basis = v.initial_basis(z)?;
        Ok(v)
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.p..(i + 1) * self.p]
    }

    /// Rows with the smallest least-squares residuals that are linearly
    /// independent, picked greedily by Gram–Schmidt.
    fn initial_basis(&self, z: &DesignMatrix) -> Result<Vec<usize>> {
        let fit = ols_fit(z, self.y)?;
        let mut order: Vec<usize> = (0..self.m).collect();
        order.sort_by(|&a, &b| {
            fit.residuals[a]
                .abs()
                .total_cmp(&fit.residuals[b].abs())
                .then(a.cmp(&b))
        });
        let mut basis = Vec::with_capacity(self.p);
        let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(self.p);
        for i in order {
            let mut v = self.row(i).to_vec();
            let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for q in &ortho {
                let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-10 * norm0.max(1.0) {
                v.iter_mut().for_each(|a| *a /= norm);
                ortho.push(v);
                basis.push(i);
                if basis.len() == self.p {
                    return Ok(basis);
                }
            }
        }
        Err(Error::Domain("design is rank deficient; quantile fit undefined".into()))
    }

    fn basis_inverse(&self) -> Result<DMatrix<f64>> {
        let zh = DMatrix::from_fn(self.p, self.p, |r, c| self.row(self.basis[r])[c]);
        zh.try_inverse()
            .ok_or_else(|| Error::Domain("singular quantile basis".into()))
    }

    fn solve(&mut self, tau: f64) -> Result<Vec<f64>> {
        let (m, p) = (self.m, self.p);
        let mut in_basis = vec![false; m];
        let mut w = vec![0.0; m * p];
        let mut r = vec![0.0; m];
        let mut lex_moves = 0usize;

        for _ in 0..self.max_iter {
            let inv = self.basis_inverse()?;
            let yh = DVector::from_fn(p, |k, _| self.y[self.basis[k]]);
            let beta = &inv * yh;
            in_basis.iter_mut().for_each(|b| *b = false);
            for &b in &self.basis {
                in_basis[b] = true;
            }

            // w_i = z_iᵀ Z_h⁻¹; moving basic residual j to σ·s shifts the
            // residual of row i at rate σ·w_ij.
            let mut u = vec![0.0; p];
            let mut zero_plus = vec![0.0; p];
            let mut zero_minus = vec![0.0; p];
            let mut abs_sum = vec![0.0; p];
            for i in 0..m {
                let zi = self.row(i);
                let wi = &mut w[i * p..(i + 1) * p];
                for (j, wij) in wi.iter_mut().enumerate() {
                    *wij = (0..p).map(|k| zi[k] * inv[(k, j)]).sum();
                }
                if in_basis[i] {
                    r[i] = 0.0;
                    continue;
                }
                let fit: f64 = zi.iter().zip(beta.iter()).map(|(a, b)| a * b).sum();
                r[i] = self.y[i] - fit;
                let slope = if r[i] > self.zero_tol {
                    Some(tau)
                } else if r[i] < -self.zero_tol {
                    Some(tau - 1.0)
                } else {
                    r[i] = 0.0;
                    None
                };
                for j in 0..p {
                    let wij = wi[j];
                    abs_sum[j] += wij.abs();
                    match slope {
                        Some(g) => u[j] += g * wij,
                        None => {
                            zero_plus[j] += pinball_loss(wij, tau);
                            zero_minus[j] += pinball_loss(-wij, tau);
                        }
                    }
                }
            }

            // Directional derivatives along the 2p edges.
            let mut best: Option<(usize, f64, f64)> = None;
            let mut flat: Vec<(usize, f64)> = Vec::new();
            for j in 0..p {
                let tol = 1e-10 * (1.0 + abs_sum[j]);
                for sigma in [1.0, -1.0] {
                    let d = if sigma > 0.0 {
                        tau + u[j] + zero_plus[j]
                    } else {
                        (1.0 - tau) - u[j] + zero_minus[j]
                    };
                    if d < -tol {
                        if best.is_none_or(|(_, _, bd)| d < bd) {
                            best = Some((j, sigma, d));
                        }
                    } else if d <= tol {
                        flat.push((j, sigma));
                    }
                }
            }

            match best {
                Some((j, sigma, d)) => {
                    let entering = self
                        .line_search(&w, &r, &in_basis, j, sigma, Some(d))
                        .ok_or(Error::SolverFailure {
                            tau,
                            iterations: self.max_iter,
                        })?;
                    self.basis[j] = entering;
                }
                None => {
                    // Optimal. Slide along zero-slope edges that decrease β
                    // lexicographically until none remain.
                    let mut moved = false;
                    for (j, sigma) in flat {
                        let dir: Vec<f64> = (0..p).map(|k| -sigma * inv[(k, j)]).collect();
                        let lex_neg = dir
                            .iter()
                            .find(|v| v.abs() > 1e-14)
                            .is_some_and(|v| *v < 0.0);
                        if !lex_neg {
                            continue;
                        }
                        if let Some(entering) = self.line_search(&w, &r, &in_basis, j, sigma, None) {
                            self.basis[j] = entering;
                            moved = true;
                            break;
                        }
                    }
                    lex_moves += 1;
                    if !moved || lex_moves > m {
                        return Ok(beta.iter().copied().collect());
                    }
                }
            }
        }
        Err(Error::SolverFailure {
            tau,
            iterations: self.max_iter,
        })
    }

    /// Exact line search along the edge releasing basic residual `j` in
    /// direction `sigma`. With `slope = Some(d)` the objective is minimized
    /// starting from slope `d < 0`; with `None` the first kink is returned.
    fn line_search(
        &self,
        w: &[f64],
        r: &[f64],
        in_basis: &[bool],
        j: usize,
        sigma: f64,
        slope: Option<f64>,
    ) -> Option<usize> {
        let p = self.p;
        // Residual i moves as r_i(s) = r_i + s·σ·w_ij.
        let mut kinks: Vec<(f64, usize, f64)> = (0..self.m)
            .filter(|&i| !in_basis[i] && r[i] != 0.0)
            .filter_map(|i| {
                let rate = sigma * w[i * p + j];
                if rate == 0.0 {
                    return None;
                }
                let s = -r[i] / rate;
                (s > 0.0).then_some((s, i, rate.abs()))
            })
            .collect();
        kinks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        match slope {
            None => kinks.first().map(|k| k.1),
            Some(mut d) => {
                for (_, i, jump) in kinks {
                    d += jump;
                    if d >= 0.0 {
                        return Some(i);
                    }
                }
                None
            }
        }
    }
}
