//! One-dimensional empirical measures.
//!
//! An [`EmpiricalMeasure`] is a sorted multiset of atoms carrying positive
//! weights that sum to one. Every distance here is computed exactly from the
//! piecewise-constant CDFs, never by sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted atoms with positive weights summing to one.
///
/// Uniform measures (the common case) store no weight vector; the CDF after
/// the `k`-th atom is then `(k + 1) / n` computed directly, which keeps
/// quantile lookups exact for grid values like `1/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<f64>,
    // Cumulative weights; `None` for uniform 1/n weights.
    cumulative: Option<Vec<f64>>,
}

impl EmpiricalMeasure {
    /// Builds the uniform empirical measure of raw samples. Duplicates are kept
    /// as repeated atoms.
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite sample".into()));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(Self {
            atoms: samples,
            cumulative: None,
        })
    }

    /// Builds a weighted measure. Weights must be positive and finite; they are
    /// normalized to sum to one.
    pub fn from_weighted(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
        if atoms.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite atom".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Domain("weights must be positive and finite".into()));
        }
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(pairs.len());
        for (_, w) in &pairs {
            acc += w / total;
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(Self {
            atoms: pairs.into_iter().map(|p| p.0).collect(),
            cumulative: Some(cumulative),
        })
    }

    pub fn point_mass(c: f64) -> Result<Self> {
        Self::from_samples(vec![c])
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn is_uniform(&self) -> bool {
        self.cumulative.is_none()
    }

    /// Weight of atom `k`.
    pub fn weight(&self, k: usize) -> f64 {
        match &self.cumulative {
            None => 1.0 / self.atoms.len() as f64,
            Some(c) if k == 0 => c[0],
            Some(c) => c[k] - c[k - 1],
        }
    }

    /// CDF value immediately after atom `k`.
    pub fn cumulative(&self, k: usize) -> f64 {
        match &self.cumulative {
            None => (k + 1) as f64 / self.atoms.len() as f64,
            Some(c) => c[k],
        }
    }

    /// Merges duplicate atoms into single weighted atoms.
    pub fn merge_duplicates(&self) -> Self {
        let mut atoms = Vec::new();
        let mut cumulative = Vec::new();
        for (k, &x) in self.atoms.iter().enumerate() {
            if atoms.last() == Some(&x) {
                *cumulative.last_mut().unwrap() = self.cumulative(k);
            } else {
                atoms.push(x);
                cumulative.push(self.cumulative(k));
            }
        }
        if atoms.len() == self.atoms.len() {
            return self.clone();
        }
        Self {
            atoms,
            cumulative: Some(cumulative),
        }
    }

    /// Right-continuous CDF: total weight of atoms `<= x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let count = self.atoms.partition_point(|&a| a <= x);
        if count == 0 {
            0.0
        } else {
            self.cumulative(count - 1)
        }
    }

    /// Generalized inverse CDF, `inf { x : F(x) >= t }` for `t` in `(0, 1]`.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("quantile level {t} outside (0, 1]")));
        }
        let n = self.atoms.len();
        let k = match &self.cumulative {
            None => ((t * n as f64).ceil() as usize).clamp(1, n) - 1,
            Some(c) => c.partition_point(|&f| f < t).min(n - 1),
        };
        Ok(self.atoms[k])
    }

    /// Inverse-transform draw for a given uniform level `u` in `(0, 1]`.
    pub fn sample_inverse_transform(&self, u: f64) -> Result<f64> {
        self.quantile(u)
    }

    /// Draws `count` iid samples by inverse transform and returns their
    /// empirical measure.
    pub fn resample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Self> {
        let draws = (0..count)
            .map(|_| {
                // random() is in [0, 1); flip it into (0, 1].
                let u = 1.0 - rng.random::<f64>();
                self.sample_inverse_transform(u)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(draws)
    }

    pub fn mean(&self) -> f64 {
        match &self.cumulative {
            None => self.atoms.iter().sum::<f64>() / self.atoms.len() as f64,
            Some(_) => (0..self.len()).map(|k| self.weight(k) * self.atoms[k]).sum(),
        }
    }
}

/// Walks the merged breakpoints of two CDFs, calling `visit(x_prev, x, fa, fb)`
/// with the CDF values holding on `[x_prev, x)`. The last call has both CDFs at 1.
fn walk_merged(a: &EmpiricalMeasure, b: &EmpiricalMeasure, mut visit: impl FnMut(f64, f64, f64, f64)) {
    let (xa, xb) = (a.atoms(), b.atoms());
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut prev = xa[0].min(xb[0]);
    while i < xa.len() || j < xb.len() {
        let x = match (xa.get(i), xb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        visit(prev, x, fa, fb);
        while i < xa.len() && xa[i] == x {
            i += 1;
        }
        while j < xb.len() && xb[j] == x {
            j += 1;
        }
        fa = if i == 0 { 0.0 } else { a.cumulative(i - 1) };
        fb = if j == 0 { 0.0 } else { b.cumulative(j - 1) };
        prev = x;
    }
    visit(prev, prev, fa, fb);
}

/// Exact 1-Wasserstein distance, `∫ |F_a − F_b| dx` over the merged grid.
pub fn wasserstein1(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> f64 {
    if a.is_uniform() && b.is_uniform() {
        return wasserstein1_uniform(a.atoms(), b.atoms());
    }
    let mut area = 0.0;
    walk_merged(a, b, |lo, hi, fa, fb| area += (fa - fb).abs() * (hi - lo));
    area
}

/// Uniform weights: integrates the integer CDF gap `|i·n_b − j·n_a|` and
/// divides by `n_a·n_b` once.
fn wasserstein1_uniform(xa: &[f64], xb: &[f64]) -> f64 {
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = xa[0].min(xb[0]);
    let mut area = 0.0;
    while i < na || j < nb {
        let x = match (xa.get(i), xb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        let gap = ((i as u128) * nb as u128).abs_diff((j as u128) * na as u128);
        area += gap as f64 * (x - prev);
        while i < na && xa[i] == x {
            i += 1;
        }
        while j < nb && xb[j] == x {
            j += 1;
        }
        prev = x;
    }
    area / (na as f64 * nb as f64)
}

/// Exact Kolmogorov distance `sup_x |F_a(x) − F_b(x)|`.
///
/// Both one-sided limits are covered: the value on `[x_prev, x)` is the left
/// limit at `x`, and the value after the final jump is the right limit.
pub fn kolmogorov(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> f64 {
    let mut sup = 0.0f64;
    walk_merged(a, b, |_, _, fa, fb| sup = sup.max((fa - fb).abs()));
    sup.min(1.0)
}

/// The pair `(J0, J1)`: `∫ F(1−F)` and `∫ sqrt(F(1−F))`.
pub fn j_functionals(m: &EmpiricalMeasure) -> (f64, f64) {
    let x = m.atoms();
    let (mut j0, mut j1) = (0.0, 0.0);
    for k in 0..x.len().saturating_sub(1) {
        let gap = x[k + 1] - x[k];
        if gap > 0.0 {
            let f = m.cumulative(k);
            let v = (f * (1.0 - f)).max(0.0);
            j0 += v * gap;
            j1 += v.sqrt() * gap;
        }
    }
    (j0, j1)
}

/// J1 alone; used for the online loss-surrogate estimates.
pub fn j1(m: &EmpiricalMeasure) -> f64 {
    j_functionals(m).1
}

/// Standard sample moments of a measure.
///
/// `variance` is unbiased (`n / (n − 1)` times the central second moment).
/// Skewness and kurtosis are biased standardized central moments
/// `m3 / m2^1.5` and `m4 / m2^2`; kurtosis is non-excess, so a normal sample
/// gives about 3. They are `None` below 3 (resp. 4) atoms or when the sample is
/// constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

pub fn moment_summary(m: &EmpiricalMeasure) -> Result<MomentSummary> {
    let n = m.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let mean = m.mean();
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for (k, &x) in m.atoms().iter().enumerate() {
        let w = m.weight(k);
        let d = x - mean;
        let d2 = d * d;
        m2 += w * d2;
        m3 += w * d2 * d;
        m4 += w * d2 * d2;
    }
    let variance = m2 * n as f64 / (n - 1) as f64;
    let degenerate = m2 <= 0.0;
    let skewness = (n >= 3 && !degenerate).then(|| m3 / m2.powf(1.5));
    let kurtosis = (n >= 4 && !degenerate).then(|| m4 / (m2 * m2));
    Ok(MomentSummary {
        mean,
        variance,
        skewness,
        kurtosis,
    })
}
