#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

/// Every multiset of `len` values from `grid`, as sorted vectors.
pub fn multisets(grid: &[i64], len: usize) -> Vec<Vec<i64>> {
    fn go(grid: &[i64], len: usize, start: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..grid.len() {
            cur.push(grid[i]);
            go(grid, len, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(grid, len, 0, &mut Vec::new(), &mut out);
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Minimum transport cost between two uniform measures on integer atoms,
/// by replicating both to `lcm` unit masses and searching every assignment.
/// Returned as the exact pair (numerator, denominator).
pub fn brute_force_w1(a: &[i64], b: &[i64]) -> (i64, i64) {
    let l = lcm(a.len(), b.len());
    let rep = |v: &[i64]| -> Vec<i64> { v.iter().flat_map(|&x| std::iter::repeat_n(x, l / v.len())).collect() };
    let (ra, mut rb) = (rep(a), rep(b));
    let mut best = i64::MAX;
    permute(&mut rb, 0, &mut |p| {
        let cost: i64 = ra.iter().zip(p).map(|(x, y)| (x - y).abs()).sum();
        best = best.min(cost);
    });
    (best, l as i64)
}

fn permute(v: &mut Vec<i64>, k: usize, f: &mut dyn FnMut(&[i64])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Exact solution of the normal equations `ZᵀZ β = Zᵀy` over the rationals,
/// with every `f64` input converted exactly.
pub fn rational_normal_equations(rows: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = rows[0].len();
    let q = |x: f64| BigRational::from_f64(x).expect("finite input");
    let z: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    let yq: Vec<BigRational> = y.iter().map(|&x| q(x)).collect();
    let mut a = vec![vec![BigRational::zero(); p + 1]; p];
    for (row, yi) in z.iter().zip(&yq) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += &row[i] * &row[j];
            }
            a[i][p] += &row[i] * yi;
        }
    }
    for col in 0..p {
        let pivot = (col..p).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        for r in 0..p {
            if r != col && !a[r][col].is_zero() {
                let factor = &a[r][col] / &a[col][col];
                for c in col..=p {
                    let sub = &factor * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
    }
    Some((0..p).map(|i| (&a[i][p] / &a[i][i]).to_f64().unwrap()).collect())
}

/// Golden-section minimizer of a unimodal function on `[lo, hi]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `∫_0^1 |F_N(x) − x| dx` for the empirical CDF of `u ⊂ [0,1]`, in closed
/// form per step.
pub fn w1_to_uniform(u: &mut [f64]) -> f64 {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let mut total = 0.0;
    let mut left = 0.0;
    for k in 0..=u.len() {
        let right = if k < u.len() { u[k] } else { 1.0 };
        let level = k as f64 / n;
        total += abs_linear_integral(left, right, level);
        left = right;
    }
    total
}

/// `∫_l^r |c − x| dx`.
fn abs_linear_integral(l: f64, r: f64, c: f64) -> f64 {
    let prim = |x: f64| {
        let d = x - c;
        d * d.abs() / 2.0
    };
    prim(r) - prim(l)
}

/// `∫_0^1 |Qa(t) − Qb(t)| dt` by walking the union of both cumulative-weight
/// grids.
pub fn quantile_route_w1(a: &[f64], wa: &[f64], b: &[f64], wb: &[f64]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let (mut ca, mut cb) = (wa[0], wb[0]);
    let mut t = 0.0;
    let mut total = 0.0;
    loop {
        let next = ca.min(cb);
        total += (next - t) * (a[i] - b[j]).abs();
        t = next;
        if i + 1 == a.len() && j + 1 == b.len() {
            break;
        }
        if ca <= cb && i + 1 < a.len() {
            i += 1;
            ca += wa[i];
        } else if j + 1 < b.len() {
            j += 1;
            cb += wb[j];
        } else {
            i += 1;
            ca += wa[i];
        }
    }
    total + (1.0 - t).max(0.0) * (a[a.len() - 1] - b[b.len() - 1]).abs()
}
