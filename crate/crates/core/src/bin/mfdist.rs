use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand};

use mfdist::bench::{
    fit_tradeoff_curve, read_results_csv, run_with_context, statistics_mse, summarize, write_results_csv,
    write_statistics_csv, write_summary_csv, Context, EvalMode, ExperimentConfig, Method, RunOptions,
};
use mfdist::models::{Subset, SuiteSpec};
use mfdist::policy::{efficiency_ratio, oracle_optimum, pilot_constants, write_trace_jsonl};
use mfdist::rng::rng_from_seed;

#[derive(Parser)]
#[command(name = "mfdist", version, about = "Budget-limited multifidelity distribution estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (method, budget, replicate) cell of a config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the config's evaluation mode.
        #[arg(long, value_enum)]
        eval: Option<EvalMode>,
        /// Write the atoms of every estimate under `<out>/samples/`.
        #[arg(long)]
        dump_samples: bool,
    },
    /// Fixed exploration sizes on a fixed subset (the pilot optimum unless given).
    FixedM {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated exploration sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        m_grid: Vec<usize>,
        #[arg(long)]
        subset: Option<Subset>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit `α1/√m + α2/√(B/c_epr − m)` to the fixed-m rows of a results file.
    FitCurve {
        #[arg(long = "in")]
        input: PathBuf,
        /// Exploration round cost `c_0 + Σ c_i`.
        #[arg(long)]
        c_epr: f64,
    },
    /// Pilot estimates of the loss constants, the optimal subset and rate.
    Oracle {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        pilot: usize,
        #[arg(long, default_value_t = 1000.0)]
        budget: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Moment-statistic MSEs against the oracle moments.
    Stats {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run { config, out, seed, threads, eval, dump_samples } => {
            let mut cfg = ExperimentConfig::read(&config).with_context(|| format!("reading {}", config.display()))?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(e) = eval {
                cfg.eval = e;
            }
            init_threads(threads)?;
            run(&cfg, base_dir(&config), &out, dump_samples)
        }
        Command::FixedM { config, m_grid, subset, out, seed, threads } => {
            let mut cfg = ExperimentConfig::read(&config).with_context(|| format!("reading {}", config.display()))?;
            if m_grid.is_empty() || m_grid.contains(&0) {
                bail!("--m-grid needs positive exploration sizes");
            }
            cfg.methods = m_grid.into_iter().map(Method::FixedM).collect();
            if subset.is_some() {
                cfg.fixed_subset = subset;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            init_threads(threads)?;
            run(&cfg, base_dir(&config), &out, false)
        }
        Command::FitCurve { input, c_epr } => fit_curve(&input, c_epr),
        Command::Oracle { suite, pilot, budget, seed } => oracle(&suite, pilot, budget, seed),
        Command::Stats { config, out, seed, threads } => {
            let mut cfg = ExperimentConfig::read(&config).with_context(|| format!("reading {}", config.display()))?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            init_threads(threads)?;
            let ctx = Context::prepare(&cfg, base_dir(&config))?;
            let output = run_with_context(&cfg, &ctx, &RunOptions::default())?;
            let truth = output.oracle_moments.context("oracle measure has fewer than two atoms")?;
            fs::create_dir_all(&out)?;
            write_results_csv(&output.rows, BufWriter::new(File::create(out.join("results.csv"))?))?;
            write_statistics_csv(
                &statistics_mse(&output.rows, &truth),
                BufWriter::new(File::create(out.join("statistics.csv"))?),
            )?;
            Ok(())
        }
    }
}

fn base_dir(config: &Path) -> Option<&Path> {
    config.parent()
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    Ok(())
}

fn run(cfg: &ExperimentConfig, base: Option<&Path>, out: &Path, dump_samples: bool) -> Result<()> {
    fs::create_dir_all(out)?;
    let ctx = Context::prepare(cfg, base)?;
    let options = RunOptions { dump_samples: dump_samples.then(|| out.join("samples")) };
    let output = run_with_context(cfg, &ctx, &options)?;
    write_results_csv(&output.rows, BufWriter::new(File::create(out.join("results.csv"))?))?;
    let summary = summarize(&output.rows);
    write_summary_csv(&summary, BufWriter::new(File::create(out.join("summary.csv"))?))?;
    if !output.traces.is_empty() {
        let dir = out.join("trace");
        fs::create_dir_all(&dir)?;
        for (id, trace) in &output.traces {
            write_trace_jsonl(trace, BufWriter::new(File::create(dir.join(format!("{id}.jsonl")))?))?;
        }
    }
    for s in &summary {
        log::info!(
            "{:<12} B={:<8} mean={:.4e} q50={:.4e} failures={}",
            s.method.to_string(),
            s.budget,
            s.mean,
            s.q50,
            s.failures
        );
    }
    Ok(())
}

fn fit_curve(input: &Path, c_epr: f64) -> Result<()> {
    let records = read_results_csv(File::open(input).with_context(|| format!("opening {}", input.display()))?)?;
    let mut budgets: Vec<f64> = Vec::new();
    for r in &records {
        if matches!(r.method, Method::FixedM(_)) && !budgets.contains(&r.budget) {
            budgets.push(r.budget);
        }
    }
    if budgets.is_empty() {
        bail!("no fixed-m rows in {}", input.display());
    }
    println!("budget,alpha1,alpha2,residual_norm,minimizer,clipped");
    for b in budgets {
        let mut ms: Vec<usize> = Vec::new();
        for r in &records {
            if let (Method::FixedM(m), true) = (r.method, r.budget == b) {
                if !ms.contains(&m) {
                    ms.push(m);
                }
            }
        }
        let points: Vec<(f64, f64)> = ms
            .iter()
            .filter_map(|&m| {
                let errs: Vec<f64> = records
                    .iter()
                    .filter(|r| r.method == Method::FixedM(m) && r.budget == b)
                    .filter_map(|r| r.error)
                    .collect();
                (!errs.is_empty()).then(|| (m as f64, errs.iter().sum::<f64>() / errs.len() as f64))
            })
            .collect();
        let fit = match fit_tradeoff_curve(&points, b, c_epr) {
            Ok(fit) => fit,
            Err(e @ mfdist::Error::InsufficientSamples { .. }) => {
                log::warn!("skipping budget {b}: {e}");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        println!(
            "{b},{},{},{},{},{}",
            fit.alpha1,
            fit.alpha2,
            fit.residual_norm,
            fit.minimizer(),
            fit.clipped
        );
    }
    Ok(())
}

fn oracle(suite_path: &Path, pilot: usize, budget: f64, seed: u64) -> Result<()> {
    let text = fs::read_to_string(suite_path).with_context(|| format!("reading {}", suite_path.display()))?;
    let spec: SuiteSpec = serde_json::from_str(&text)?;
    let suite = spec.build(base_dir(suite_path))?;
    let mut rng = rng_from_seed(seed);
    let p = pilot_constants(&suite, pilot, &mut rng)?;
    let opt = oracle_optimum(&p.subsets, budget, suite.c_epr())?;
    let best = p.subsets.iter().find(|c| c.subset == opt.subset).expect("optimum is a scored subset");
    let report = serde_json::json!({
        "suite": suite.name(),
        "pilot": p.samples,
        "budget": budget,
        "c_epr": suite.c_epr(),
        "j0_y": p.j0_y,
        "j1_y": p.j1_y,
        "subsets": p.subsets,
        "s_opt": opt.subset,
        "m_star": opt.m_star,
        "g_star": opt.g_star,
        "efficiency_ratio": efficiency_ratio(best.k1, best.k2, p.j0_y, suite.cost_y(), budget, suite.c_epr()),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
