use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{JointSampler, ModelSuite};
use crate::error::{Error, Result};
use crate::measures::EmpiricalMeasure;
use crate::rng::SuiteRng;

/// Cost metadata stored next to a sample table: `{"cost_y": c0, "costs": [c1..cn]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSidecar {
    pub cost_y: f64,
    pub costs: Vec<f64>,
}

/// Precomputed joint samples `(y, x1..xn)` with declared costs.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    n: usize,
    values: Vec<f64>,
    cost_y: f64,
    costs: Vec<f64>,
}

impl SampleTable {
    /// `values` is row-major with `n + 1` entries per row.
    pub fn new(n: usize, values: Vec<f64>, cost_y: f64, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != n {
            return Err(Error::Config(format!("{} costs given for {n} models", costs.len())));
        }
        if values.is_empty() {
            return Err(Error::EmptyTable);
        }
        if !values.len().is_multiple_of(n + 1) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not form rows of {}",
                values.len(),
                n + 1
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sample table contains non-finite values".into()));
        }
        Ok(Self {
            n,
            values,
            cost_y,
            costs,
        })
    }

    /// Tabulates `rows` joint draws of a live suite.
    pub fn generate(suite: &ModelSuite, rows: usize, rng: &mut SuiteRng) -> Result<Self> {
        let width = suite.n() + 1;
        let mut values = vec![0.0; rows * width];
        for row in values.chunks_mut(width) {
            suite.draw(rng, row);
        }
        Self::new(suite.n(), values, suite.cost_y(), suite.costs().to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.values.len() / (self.n + 1)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.n + 1;
        &self.values[i * w..(i + 1) * w]
    }

    pub fn costs(&self) -> CostSidecar {
        CostSidecar {
            cost_y: self.cost_y,
            costs: self.costs.clone(),
        }
    }

    pub fn column_names(n: usize) -> Vec<String> {
        std::iter::once("y".to_string())
            .chain((1..=n).map(|i| format!("x{i}")))
            .collect()
    }

    /// Parses CSV with header `y,x1,...,xn`. Errors name the 1-based file line
    /// and column.
    pub fn from_csv_reader<R: Read>(reader: R, costs: CostSidecar) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        let n = header.len().saturating_sub(1);
        if n == 0 {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "header needs `y` and at least one `x` column".into(),
            });
        }
        for (k, (got, want)) in header.iter().zip(Self::column_names(n)).enumerate() {
            if got.trim() != want {
                return Err(Error::Parse {
                    line: 1,
                    column: k + 1,
                    message: format!("expected column `{want}`, found `{got}`"),
                });
            }
        }
        let mut values = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != n + 1 {
                return Err(Error::Parse {
                    line,
                    column: record.len().min(n + 1) + 1,
                    message: format!("expected {} fields, found {}", n + 1, record.len()),
                });
            }
            for (k, field) in record.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    line,
                    column: k + 1,
                    message: format!("`{field}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        column: k + 1,
                        message: "non-finite value".into(),
                    });
                }
                values.push(v);
            }
        }
        if values.is_empty() {
            return Err(Error::EmptyTable);
        }
        Self::new(n, values, costs.cost_y, costs.costs)
    }

    /// Reads `csv_path` with the cost sidecar at `costs_path`.
    pub fn read(csv_path: &Path, costs_path: &Path) -> Result<Self> {
        let costs: CostSidecar = serde_json::from_reader(File::open(costs_path)?)?;
        Self::from_csv_reader(File::open(csv_path)?, costs)
    }

    /// Writes the CSV body; values use Rust's shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::column_names(self.n))?;
        for i in 0..self.rows() {
            w.write_record(self.row(i).iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, csv_path: &Path, costs_path: &Path) -> Result<()> {
        self.write_csv(File::create(csv_path)?)?;
        serde_json::to_writer_pretty(File::create(costs_path)?, &self.costs())?;
        Ok(())
    }
}

struct TableSampler {
    table: SampleTable,
}

impl JointSampler for TableSampler {
    fn n_models(&self) -> usize {
        self.table.n
    }

    fn draw(&self, rng: &mut SuiteRng, out: &mut [f64]) {
        let i = rng.random_range(0..self.table.rows());
        out.copy_from_slice(self.table.row(i));
    }

    fn exact_reference(&self) -> Option<EmpiricalMeasure> {
        let ys = (0..self.table.rows()).map(|i| self.table.row(i)[0]).collect();
        EmpiricalMeasure::from_samples(ys).ok()
    }
}

/// A suite that resamples table rows uniformly with replacement (a bootstrap
/// stand-in for the unknown joint law). Costs come from the table metadata.
pub fn table_suite(table: SampleTable) -> Result<ModelSuite> {
    let (cost_y, costs) = (table.cost_y, table.costs.clone());
    ModelSuite::new("table", Arc::new(TableSampler { table }), cost_y, costs)
}
