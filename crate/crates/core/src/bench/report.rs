use std::io::{Read, Write};

use super::config::Method;
use super::run::ResultRow;
use crate::error::{Error, Result};
use crate::measures::{EmpiricalMeasure, MomentSummary};

/// Error statistics of one (method, budget) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub budget: f64,
    pub count: usize,
    pub mean: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub failures: usize,
}

/// Nearest-rank quantile of a sorted sample: the `⌈p·n⌉`-th smallest value.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Per-(method, budget) mean and 5/50/95% nearest-rank quantiles of the
/// error, in first-appearance order. Failed replicates are counted, not
/// averaged.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Method, f64)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(m, b)| m == r.method && b == r.budget) {
            keys.push((r.method, r.budget));
        }
    }
    keys.into_iter()
        .map(|(method, budget)| {
            let cell: Vec<&ResultRow> = rows.iter().filter(|r| r.method == method && r.budget == budget).collect();
            let mut errors: Vec<f64> = cell.iter().filter_map(|r| r.error).collect();
            errors.sort_by(f64::total_cmp);
            let mean = if errors.is_empty() {
                f64::NAN
            } else {
                errors.iter().sum::<f64>() / errors.len() as f64
            };
            SummaryRow {
                method,
                budget,
                count: errors.len(),
                mean,
                q05: nearest_rank(&errors, 0.05),
                q50: nearest_rank(&errors, 0.5),
                q95: nearest_rank(&errors, 0.95),
                failures: cell.len() - errors.len(),
            }
        })
        .collect()
}

/// Mean squared error of each moment statistic against the oracle moments.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticRow {
    pub method: Method,
    pub budget: f64,
    pub statistic: &'static str,
    pub mse: f64,
    pub count: usize,
}

fn statistics(m: &MomentSummary) -> [(&'static str, Option<f64>); 4] {
    [
        ("mean", Some(m.mean)),
        ("variance", Some(m.variance)),
        ("skewness", m.skewness),
        ("kurtosis", m.kurtosis),
    ]
}

/// Per-(method, budget, statistic) MSE over the successful replicates.
pub fn statistics_mse(rows: &[ResultRow], oracle: &MomentSummary) -> Vec<StatisticRow> {
    let truth = statistics(oracle);
    let mut out = Vec::new();
    for s in summarize(rows) {
        let cell: Vec<&MomentSummary> = rows
            .iter()
            .filter(|r| r.method == s.method && r.budget == s.budget)
            .filter_map(|r| r.moments.as_ref())
            .collect();
        for (k, &(name, t)) in truth.iter().enumerate() {
            let Some(t) = t else { continue };
            let sq: Vec<f64> = cell
                .iter()
                .filter_map(|m| statistics(m)[k].1)
                .map(|v| (v - t) * (v - t))
                .collect();
            let mse = if sq.is_empty() { f64::NAN } else { sq.iter().sum::<f64>() / sq.len() as f64 };
            out.push(StatisticRow { method: s.method, budget: s.budget, statistic: name, mse, count: sq.len() });
        }
    }
    out
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub const RESULT_HEADER: [&str; 14] = [
    "method",
    "budget",
    "replicate",
    "seed",
    "error",
    "subset",
    "exploration",
    "exploitation",
    "spend",
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "failure",
];

pub fn write_results_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_HEADER)?;
    for r in rows {
        let m = r.moments.as_ref();
        w.write_record([
            r.method.to_string(),
            r.budget.to_string(),
            r.replicate.to_string(),
            r.seed.to_string(),
            opt(r.error),
            opt(r.subset),
            opt(r.exploration),
            opt(r.exploitation),
            opt(r.spend),
            opt(m.map(|m| m.mean)),
            opt(m.map(|m| m.variance)),
            opt(m.and_then(|m| m.skewness)),
            opt(m.and_then(|m| m.kurtosis)),
            r.failure.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "budget", "mean", "q05", "q50", "q95", "failures"])?;
    for s in rows {
        w.write_record([
            s.method.to_string(),
            s.budget.to_string(),
            s.mean.to_string(),
            s.q05.to_string(),
            s.q50.to_string(),
            s.q95.to_string(),
            s.failures.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_statistics_csv<W: Write>(rows: &[StatisticRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "budget", "statistic", "mse", "count"])?;
    for s in rows {
        w.write_record([
            s.method.to_string(),
            s.budget.to_string(),
            s.statistic.to_string(),
            s.mse.to_string(),
            s.count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One atom per line under a `y` header.
pub fn write_samples<W: Write>(m: &EmpiricalMeasure, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["y"])?;
    for a in m.atoms() {
        w.write_record([a.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `(method, budget, exploration, error)` of the successful rows of a
/// `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub method: Method,
    pub budget: f64,
    pub exploration: Option<usize>,
    pub error: Option<f64>,
}

pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("results file lacks a `{name}` column")))
    };
    let (mc, bc, xc, ec) = (col("method")?, col("budget")?, col("exploration")?, col("error")?);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i as u64 + 2;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let parse_err = |c: usize, what: &str| Error::Parse {
            line,
            column: c + 1,
            message: format!("invalid {what} `{}`", field(c)),
        };
        let method = field(mc).parse().map_err(|_| parse_err(mc, "method"))?;
        let budget = field(bc).parse().map_err(|_| parse_err(bc, "budget"))?;
        let exploration = match field(xc) {
            "" => None,
            s => Some(s.parse().map_err(|_| parse_err(xc, "exploration"))?),
        };
        let error = match field(ec) {
            "" => None,
            s => Some(s.parse().map_err(|_| parse_err(ec, "error"))?),
        };
        out.push(ResultRecord { method, budget, exploration, error });
    }
    Ok(out)
}
