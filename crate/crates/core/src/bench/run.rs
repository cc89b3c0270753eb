use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{EvalMode, ExperimentConfig, Method};
use crate::error::{Error, Result};
use crate::measures::{moment_summary, wasserstein1, EmpiricalMeasure, MomentSummary};
use crate::models::{ModelSuite, Subset};
use crate::policy::{
    exploit, oracle_optimum, pilot_constants, run_aetc_d, ExploitVariant, PolicyState, RoundRecord,
};
use crate::rng::{derive_seed, rng_from_seed, SuiteRng};

const ORACLE_STREAM: u64 = 0;
const REPLICATE_STREAM: u64 = 1;
const EVAL_STREAM: u64 = 2;
const PILOT_STREAM: u64 = 3;

/// One (method, budget, replicate) outcome. Failed replicates carry an error
/// tag and no measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    pub budget: f64,
    pub replicate: usize,
    pub seed: u64,
    pub error: Option<f64>,
    pub subset: Option<Subset>,
    pub exploration: Option<usize>,
    pub exploitation: Option<usize>,
    pub spend: Option<f64>,
    pub moments: Option<MomentSummary>,
    pub failure: Option<String>,
}

/// What a method run produces before evaluation.
#[derive(Debug, Clone)]
pub struct MethodOutput {
    pub estimate: EmpiricalMeasure,
    pub subset: Option<Subset>,
    pub exploration: Option<usize>,
    pub exploitation: usize,
    pub spend: f64,
    pub trace: Vec<RoundRecord>,
}

/// `⌊B/c_0⌋` fresh draws of `Y`.
pub fn run_ecdf_y(suite: &ModelSuite, budget: f64, rng: &mut SuiteRng) -> Result<EmpiricalMeasure> {
    let count = crate::policy::affordable_count(budget, suite.cost_y());
    if count == 0 {
        return Err(Error::Infeasible(format!(
            "budget {budget} cannot pay for one sample of Y at cost {}",
            suite.cost_y()
        )));
    }
    let mut buf = vec![0.0; suite.n() + 1];
    let ys = (0..count)
        .map(|_| {
            suite.draw(rng, &mut buf);
            buf[0]
        })
        .collect();
    EmpiricalMeasure::from_samples(ys)
}

/// Fixed exploration size `m` on subset `s`, then standard exploitation.
pub fn run_fixed_m(
    suite: &ModelSuite,
    budget: f64,
    m: usize,
    s: Subset,
    rng: &mut SuiteRng,
) -> Result<MethodOutput> {
    let mut state = PolicyState::fixed(suite, budget, m, rng)?;
    state.commit_to(suite, s)?;
    let ex = exploit(&mut state, suite, ExploitVariant::Standard, 0, rng)?;
    Ok(MethodOutput {
        estimate: ex.estimate,
        subset: Some(ex.subset),
        exploration: Some(ex.exploration),
        exploitation: ex.exploitation,
        spend: ex.spend,
        trace: Vec::new(),
    })
}

fn run_adaptive(
    suite: &ModelSuite,
    budget: f64,
    variant: ExploitVariant,
    quantile_levels: usize,
    rng: &mut SuiteRng,
) -> Result<MethodOutput> {
    let mut state = run_aetc_d(suite, budget, rng)?;
    let ex = exploit(&mut state, suite, variant, quantile_levels, rng)?;
    Ok(MethodOutput {
        estimate: ex.estimate,
        subset: Some(ex.subset),
        exploration: Some(ex.exploration),
        exploitation: ex.exploitation,
        spend: ex.spend,
        trace: state.trace().to_vec(),
    })
}

/// Shared read-only inputs of an experiment.
#[derive(Debug, Clone)]
pub struct Context {
    pub suite: ModelSuite,
    pub oracle: EmpiricalMeasure,
    pub eval: EvalMode,
    pub eval_samples: usize,
    pub quantile_levels: usize,
    /// Subset for fixed-m runs, per budget.
    pub fixed_subsets: Vec<Option<Subset>>,
}

impl Context {
    /// Builds the suite, the oracle measure and (when needed) the fixed-m
    /// subsets from the pilot optimum.
    pub fn prepare(config: &ExperimentConfig, base_dir: Option<&Path>) -> Result<Self> {
        config.validate()?;
        let suite = config.suite.build(base_dir)?;
        let mut rng = rng_from_seed(derive_seed(config.seed, &[ORACLE_STREAM]));
        let oracle = suite.reference_measure(config.oracle_samples, &mut rng)?;
        let has_fixed = config.methods.iter().any(|m| matches!(m, Method::FixedM(_)));
        let fixed_subsets = match (config.fixed_subset, has_fixed) {
            (Some(s), _) => {
                if s.max_model() > suite.n() {
                    return Err(Error::Config(format!("fixed subset {s} exceeds {} models", suite.n())));
                }
                vec![Some(s); config.budgets.len()]
            }
            (None, true) => {
                let mut rng = rng_from_seed(derive_seed(config.seed, &[PILOT_STREAM]));
                let pilot = pilot_constants(&suite, config.pilot_samples, &mut rng)?;
                config
                    .budgets
                    .iter()
                    .map(|&b| oracle_optimum(&pilot.subsets, b, suite.c_epr()).map(|o| Some(o.subset)))
                    .collect::<Result<_>>()?
            }
            (None, false) => vec![None; config.budgets.len()],
        };
        Ok(Self {
            suite,
            oracle,
            eval: config.eval,
            eval_samples: config.eval_samples,
            quantile_levels: config.quantile_levels,
            fixed_subsets,
        })
    }

    /// Runs one method at one budget.
    pub fn run_method(&self, method: Method, budget_index: usize, budget: f64, rng: &mut SuiteRng) -> Result<MethodOutput> {
        let suite = &self.suite;
        match method {
            Method::EcdfY => {
                let estimate = run_ecdf_y(suite, budget, rng)?;
                let exploitation = estimate.len();
                Ok(MethodOutput {
                    estimate,
                    subset: None,
                    exploration: None,
                    exploitation,
                    spend: exploitation as f64 * suite.cost_y(),
                    trace: Vec::new(),
                })
            }
            Method::AetcD => run_adaptive(suite, budget, ExploitVariant::Standard, self.quantile_levels, rng),
            Method::AetcDNo => run_adaptive(suite, budget, ExploitVariant::NoNoise, self.quantile_levels, rng),
            Method::AetcDQ => run_adaptive(suite, budget, ExploitVariant::Quantile, self.quantile_levels, rng),
            Method::FixedM(m) => {
                let s = self.fixed_subsets[budget_index]
                    .ok_or_else(|| Error::Config("no subset for fixed-m runs".into()))?;
                run_fixed_m(suite, budget, m, s, rng)
            }
            Method::Oracle => Ok(MethodOutput {
                estimate: self.oracle.clone(),
                subset: None,
                exploration: None,
                exploitation: 0,
                spend: 0.0,
                trace: Vec::new(),
            }),
        }
    }

    /// `W1` error of `estimate` under the configured evaluation mode.
    pub fn error(&self, estimate: &EmpiricalMeasure, rng: &mut SuiteRng) -> Result<f64> {
        Ok(match self.eval {
            EvalMode::Full => wasserstein1(estimate, &self.oracle),
            EvalMode::Sampled => wasserstein1(&estimate.resample(self.eval_samples, rng)?, &self.oracle),
        })
    }
}

/// Identifier of one run, used for trace and sample file names.
pub fn run_id(method: Method, budget: f64, replicate: usize) -> String {
    format!("{}-b{}-r{}", method.to_string().replace(':', "-"), budget, replicate)
}

/// Optional side outputs of [`run_experiment`].
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory receiving one CSV of estimate atoms per run.
    pub dump_samples: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    /// `(run id, trace)` for every adaptive run, in row order.
    pub traces: Vec<(String, Vec<RoundRecord>)>,
    pub oracle_moments: Option<MomentSummary>,
}

/// Runs every (method, budget, replicate) cell. Replicate `r` at budget `b`
/// uses the same seed for every method. Rows come back sorted by method (in
/// config order), budget and replicate.
pub fn run_experiment(config: &ExperimentConfig, base_dir: Option<&Path>, options: &RunOptions) -> Result<ExperimentOutput> {
    let ctx = Context::prepare(config, base_dir)?;
    run_with_context(config, &ctx, options)
}

pub fn run_with_context(config: &ExperimentConfig, ctx: &Context, options: &RunOptions) -> Result<ExperimentOutput> {
    if let Some(dir) = &options.dump_samples {
        std::fs::create_dir_all(dir)?;
    }
    let cells: Vec<(usize, usize, usize)> = (0..config.methods.len())
        .flat_map(|mi| (0..config.budgets.len()).flat_map(move |bi| (0..config.replicates).map(move |r| (mi, bi, r))))
        .collect();
    let results: Vec<Result<(ResultRow, Option<Vec<RoundRecord>>)>> = cells
        .par_iter()
        .map(|&(mi, bi, r)| run_cell(config, ctx, options, mi, bi, r))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut traces = Vec::new();
    for res in results {
        let (row, trace) = res?;
        if let Some(trace) = trace {
            traces.push((run_id(row.method, row.budget, row.replicate), trace));
        }
        rows.push(row);
    }
    let oracle_moments = moment_summary(&ctx.oracle).ok();
    Ok(ExperimentOutput { rows, traces, oracle_moments })
}

fn run_cell(
    config: &ExperimentConfig,
    ctx: &Context,
    options: &RunOptions,
    mi: usize,
    bi: usize,
    r: usize,
) -> Result<(ResultRow, Option<Vec<RoundRecord>>)> {
    let method = config.methods[mi];
    let budget = config.budgets[bi];
    let seed = derive_seed(config.seed, &[REPLICATE_STREAM, bi as u64, r as u64]);
    let mut rng = rng_from_seed(seed);
    let mut row = ResultRow {
        method,
        budget,
        replicate: r,
        seed,
        error: None,
        subset: None,
        exploration: None,
        exploitation: None,
        spend: None,
        moments: None,
        failure: None,
    };
    match ctx.run_method(method, bi, budget, &mut rng) {
        Ok(out) => {
            let mut eval_rng = rng_from_seed(derive_seed(config.seed, &[EVAL_STREAM, bi as u64, r as u64]));
            row.error = Some(ctx.error(&out.estimate, &mut eval_rng)?);
            row.subset = out.subset;
            row.exploration = out.exploration;
            row.exploitation = Some(out.exploitation);
            row.spend = Some(out.spend);
            row.moments = moment_summary(&out.estimate).ok();
            if let Some(dir) = &options.dump_samples {
                let path = dir.join(format!("{}.csv", run_id(method, budget, r)));
                super::report::write_samples(&out.estimate, std::fs::File::create(path)?)?;
            }
            let trace = matches!(method, Method::AetcD | Method::AetcDNo | Method::AetcDQ).then_some(out.trace);
            Ok((row, trace))
        }
        Err(e @ (Error::Io(_) | Error::Config(_))) => Err(e),
        Err(e) => {
            row.failure = Some(failure_tag(&e).to_string());
            log::debug!("{} at B={budget}, replicate {r}: {e}", method);
            Ok((row, None))
        }
    }
}

fn failure_tag(e: &Error) -> &'static str {
    match e {
        Error::BudgetExhausted { .. } => "budget-exhausted",
        Error::InfeasibleExploitation { .. } => "infeasible-exploitation",
        Error::Infeasible(_) => "infeasible",
        Error::InsufficientSamples { .. } => "insufficient-samples",
        Error::SolverFailure { .. } => "solver-failure",
        _ => "error",
    }
}
