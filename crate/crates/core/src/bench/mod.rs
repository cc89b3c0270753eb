//! Experiment harness: method comparison over budget grids, fixed-rate
//! sweeps, trade-off curve fitting, moment statistics and CSV export.

mod config;
mod curve;
mod report;
mod run;

pub use config::{EvalMode, ExperimentConfig, Method};
pub use curve::{fit_tradeoff_curve, TradeoffFit};
pub use report::{
    nearest_rank, read_results_csv, statistics_mse, summarize, write_results_csv, write_samples,
    write_statistics_csv, write_summary_csv, ResultRecord, StatisticRow, SummaryRow, RESULT_HEADER,
};
pub use run::{
    run_ecdf_y, run_experiment, run_fixed_m, run_id, run_with_context, Context, ExperimentOutput, MethodOutput,
    ResultRow, RunOptions,
};

use crate::error::Result;

/// Runs the experiment and returns per-(method, budget, statistic) MSEs of
/// the estimated moments against the oracle moments.
pub fn run_statistics_comparison(
    config: &ExperimentConfig,
    base_dir: Option<&std::path::Path>,
) -> Result<Vec<StatisticRow>> {
    let out = run_experiment(config, base_dir, &RunOptions::default())?;
    let oracle = out
        .oracle_moments
        .ok_or_else(|| crate::Error::Config("oracle measure has fewer than two atoms".into()))?;
    Ok(statistics_mse(&out.rows, &oracle))
}
