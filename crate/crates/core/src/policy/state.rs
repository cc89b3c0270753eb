use std::io::Write;

use serde::Serialize;

use super::emulator::{Emulator, ExploitVariant};
use super::score::{score_subsets, SubsetScore};
use crate::error::{Error, Result};
use crate::measures::EmpiricalMeasure;
use crate::models::{ModelSuite, Subset};
use crate::regress::{ols_fit, DesignMatrix, FitResult};
use crate::rng::SuiteRng;

/// Upper bound on loop rounds; Algorithm 1 needs `O(log B)`.
const MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Exploring,
    Committed,
    Exhausted,
}

/// Branch taken by one round of Algorithm 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    /// `m̂* > 2t`: `t ← 2t`.
    Double,
    /// `t < m̂* ≤ 2t`: `t ← ⌊(t + m̂*)/2⌋`.
    Average,
    /// `m̂* ≤ t`, or every subset fits exactly.
    Commit,
    /// Exploration reached its cap.
    ForcedCommit,
    /// No subset can afford a single exploitation sample.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRecord {
    #[serde(rename = "S")]
    pub subset: Subset,
    pub k1: f64,
    pub k2: f64,
    pub m_star: f64,
    pub rho: f64,
    pub eligible: bool,
}

impl From<&SubsetScore> for ScoreRecord {
    fn from(s: &SubsetScore) -> Self {
        Self {
            subset: s.subset,
            k1: s.k1_hat,
            k2: s.k2_hat,
            m_star: s.m_star_hat,
            rho: s.rho,
            eligible: s.eligible,
        }
    }
}

/// One loop round: the scores at exploration size `t` and the decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub t: usize,
    pub spend: f64,
    pub scores: Vec<ScoreRecord>,
    pub chosen: Option<Subset>,
    pub action: Action,
    pub next_t: usize,
}

#[derive(Debug, Clone)]
struct Commitment {
    subset: Subset,
    fit: FitResult,
}

/// Single-owner trajectory of one adaptive run.
#[derive(Debug, Clone)]
pub struct PolicyState {
    n: usize,
    width: usize,
    budget: f64,
    c_epr: f64,
    max_rounds: usize,
    cap: usize,
    log: Vec<f64>,
    spent: f64,
    phase: Phase,
    commitment: Option<Commitment>,
    trace: Vec<RoundRecord>,
}

/// Largest integer `k` with `k · cost ≤ amount`.
pub fn affordable_count(amount: f64, cost: f64) -> usize {
    if amount.is_nan() || amount < 0.0 {
        return 0;
    }
    let mut k = (amount / cost).floor().max(0.0) as usize;
    while k > 0 && k as f64 * cost > amount {
        k -= 1;
    }
    while (k + 1) as f64 * cost <= amount {
        k += 1;
    }
    k
}

impl PolicyState {
    /// Starts a run by drawing `n + 2` joint samples.
    pub fn start(suite: &ModelSuite, budget: f64, rng: &mut SuiteRng) -> Result<Self> {
        let initial = suite.n() + 2;
        let mut state = Self::empty(suite, budget, initial)?;
        state.explore_to(suite, initial, rng);
        Ok(state)
    }

    /// Starts a run with a fixed exploration size `m` (no adaptation).
    pub fn fixed(suite: &ModelSuite, budget: f64, m: usize, rng: &mut SuiteRng) -> Result<Self> {
        let mut state = Self::empty(suite, budget, m)?;
        state.cap = m;
        state.explore_to(suite, m, rng);
        Ok(state)
    }

    fn empty(suite: &ModelSuite, budget: f64, rounds: usize) -> Result<Self> {
        if !(budget.is_finite() && budget > 0.0) {
            return Err(Error::Config(format!("budget must be positive and finite, got {budget}")));
        }
        let c_epr = suite.c_epr();
        let max_rounds = affordable_count(budget, c_epr);
        if max_rounds < rounds {
            return Err(Error::BudgetExhausted { budget, rounds, c_epr });
        }
        let cheapest = suite.costs().iter().copied().fold(f64::INFINITY, f64::min);
        let cap = affordable_count(budget - cheapest, c_epr).clamp(rounds, max_rounds);
        Ok(Self {
            n: suite.n(),
            width: suite.n() + 1,
            budget,
            c_epr,
            max_rounds,
            cap,
            log: Vec::new(),
            spent: 0.0,
            phase: Phase::Exploring,
            commitment: None,
            trace: Vec::new(),
        })
    }

    fn explore_to(&mut self, suite: &ModelSuite, t: usize, rng: &mut SuiteRng) {
        let old = self.t();
        self.log.resize(t * self.width, 0.0);
        for row in self.log[old * self.width..].chunks_exact_mut(self.width) {
            suite.draw(rng, row);
        }
        self.spent = t as f64 * self.c_epr;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Current number of exploration draws.
    pub fn t(&self) -> usize {
        self.log.len() / self.width
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn c_epr(&self) -> f64 {
        self.c_epr
    }

    /// `M = ⌊B / c_epr⌋`.
    pub fn max_rounds(&self) -> usize {
        self.max_rounds
    }

    /// Exploration size at which commit is forced: the largest `t ≤ M` that
    /// still leaves room for one sample of the cheapest model.
    pub fn exploration_cap(&self) -> usize {
        self.cap
    }

    pub fn spent(&self) -> f64 {
        self.spent
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn chosen(&self) -> Option<Subset> {
        self.commitment.as_ref().map(|c| c.subset)
    }

    /// Exploration fit of the chosen subset.
    pub fn chosen_fit(&self) -> Option<&FitResult> {
        self.commitment.as_ref().map(|c| &c.fit)
    }

    pub fn trace(&self) -> &[RoundRecord] {
        &self.trace
    }

    /// Exploration draws `(y, x_1, .., x_n)`.
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.log.chunks_exact(self.width)
    }

    pub fn responses(&self) -> Vec<f64> {
        self.rows().map(|r| r[0]).collect()
    }

    /// Number of exploitation samples of `s` the remaining budget pays for.
    pub fn exploitation_count(&self, suite: &ModelSuite, s: Subset) -> usize {
        let explored = self.t() as f64 * self.c_epr;
        let cost = suite.c_ept(s);
        let mut count = affordable_count(self.budget - explored, cost);
        while count > 0 && explored + count as f64 * cost > self.budget {
            count -= 1;
        }
        count
    }

    /// Exploration design of `s` (intercept plus regressors).
    pub fn design(&self, suite: &ModelSuite, s: Subset) -> Result<DesignMatrix> {
        let features = suite.features_for(s);
        let mut flat = Vec::with_capacity(self.t() * features.len());
        for row in self.rows() {
            ModelSuite::eval_features(&features, &row[1..], &mut flat);
        }
        DesignMatrix::from_flat_features(&flat, features.len())
    }

    /// Commits to `s` without scoring (fixed-rate variant).
    pub fn commit_to(&mut self, suite: &ModelSuite, s: Subset) -> Result<()> {
        self.require(Phase::Exploring)?;
        if s.is_empty() || s.max_model() > self.n {
            return Err(Error::Config(format!("subset {s} is not a subset of 1..={}", self.n)));
        }
        if self.exploitation_count(suite, s) == 0 {
            return Err(self.infeasible(suite, s));
        }
        let fit = ols_fit(&self.design(suite, s)?, &self.responses())?;
        self.commitment = Some(Commitment { subset: s, fit });
        self.phase = Phase::Committed;
        Ok(())
    }

    fn require(&self, phase: Phase) -> Result<()> {
        if self.phase != phase {
            return Err(Error::Config(format!("policy is {:?}, expected {:?}", self.phase, phase)));
        }
        Ok(())
    }

    fn infeasible(&self, suite: &ModelSuite, s: Subset) -> Error {
        Error::InfeasibleExploitation {
            subset: s.to_string(),
            remaining: self.budget - self.spent,
            cost: suite.c_ept(s),
        }
    }

    /// One round of Algorithm 1: score, select `S*`, then double, average or
    /// commit.
    pub fn step(&mut self, suite: &ModelSuite, rng: &mut SuiteRng) -> Result<()> {
        self.require(Phase::Exploring)?;
        let t = self.t();
        let scores = score_subsets(self, suite);

        let best = argmin_rho(&scores);
        let exact = if best.is_none() {
            scores
                .iter()
                .filter(|s| s.zero_residual)
                .min_by(|a, b| suite.c_ept(a.subset).total_cmp(&suite.c_ept(b.subset)))
        } else {
            None
        };
        let star = best.or(exact);
        let m_star = match (best, exact) {
            (Some(b), _) => b.m_star_hat,
            (None, Some(_)) => f64::NEG_INFINITY,
            (None, None) => f64::INFINITY,
        };

        let tf = t as f64;
        let (mut action, target) = if m_star > 2.0 * tf {
            (Action::Double, 2 * t)
        } else if m_star > tf {
            (Action::Average, (((tf + m_star) / 2.0).floor() as usize).max(t + 1))
        } else {
            (Action::Commit, t)
        };
        let mut next_t = target.min(self.cap);
        if action != Action::Commit && next_t <= t {
            action = Action::ForcedCommit;
            next_t = t;
        }

        let mut chosen = star.map(|s| s.subset);
        let mut result = Ok(());
        if matches!(action, Action::Commit | Action::ForcedCommit) {
            match self.commit_choice(suite, &scores, star) {
                Some(s) => {
                    chosen = Some(s.subset);
                    let fit = s.fit.clone().expect("committed subset has a fit");
                    self.commitment = Some(Commitment { subset: s.subset, fit });
                    self.phase = Phase::Committed;
                }
                None => {
                    action = Action::Infeasible;
                    self.phase = Phase::Exhausted;
                    let s = chosen.unwrap_or_else(|| scores[0].subset);
                    result = Err(self.infeasible(suite, s));
                }
            }
        }
        self.trace.push(RoundRecord {
            t,
            spend: self.spent,
            scores: scores.iter().map(ScoreRecord::from).collect(),
            chosen,
            action,
            next_t,
        });
        if next_t > t {
            self.explore_to(suite, next_t, rng);
        }
        result
    }

    /// `S*` if it can pay for one exploitation sample, otherwise the best
    /// affordable fallback: eligible by `ρ`, then exact fits by cost, then any
    /// fitted subset by cost.
    fn commit_choice<'a>(
        &self,
        suite: &ModelSuite,
        scores: &'a [SubsetScore],
        star: Option<&'a SubsetScore>,
    ) -> Option<&'a SubsetScore> {
        let ok = |s: &SubsetScore| s.has_fit() && self.exploitation_count(suite, s.subset) >= 1;
        if let Some(s) = star.filter(|s| ok(s)) {
            return Some(s);
        }
        let affordable: Vec<SubsetScore> = scores.iter().filter(|s| ok(s)).cloned().collect();
        let by_cost = |pred: &dyn Fn(&SubsetScore) -> bool| {
            scores
                .iter()
                .filter(|s| ok(s) && pred(s))
                .min_by(|a, b| suite.c_ept(a.subset).total_cmp(&suite.c_ept(b.subset)))
        };
        if let Some(b) = argmin_rho(&affordable) {
            return scores.iter().find(|s| s.subset == b.subset);
        }
        by_cost(&|s| s.zero_residual).or_else(|| by_cost(&|_| true))
    }

    /// Runs rounds until commit (or infeasibility).
    pub fn run(&mut self, suite: &ModelSuite, rng: &mut SuiteRng) -> Result<()> {
        for _ in 0..MAX_ROUNDS {
            if self.phase != Phase::Exploring {
                return Ok(());
            }
            self.step(suite, rng)?;
        }
        Err(Error::Infeasible(format!("no commit after {MAX_ROUNDS} rounds")))
    }
}

/// First eligible subset (canonical order) with the smallest `ρ`.
fn argmin_rho(scores: &[SubsetScore]) -> Option<&SubsetScore> {
    scores
        .iter()
        .filter(|s| s.eligible)
        .fold(None, |best: Option<&SubsetScore>, s| match best {
            Some(b) if b.rho <= s.rho => Some(b),
            _ => Some(s),
        })
}

/// Starts a run and explores until commit.
pub fn run_aetc_d(suite: &ModelSuite, budget: f64, rng: &mut SuiteRng) -> Result<PolicyState> {
    let mut state = PolicyState::start(suite, budget, rng)?;
    state.run(suite, rng)?;
    Ok(state)
}

/// Final estimate of one run.
#[derive(Debug, Clone)]
pub struct Exploitation {
    pub estimate: EmpiricalMeasure,
    pub emulator: Emulator,
    pub subset: Subset,
    pub exploration: usize,
    pub exploitation: usize,
    pub spend: f64,
}

/// Spends the remaining budget on fresh samples of the chosen subset and
/// returns the emulated empirical measure of `Y`.
pub fn exploit(
    state: &mut PolicyState,
    suite: &ModelSuite,
    variant: ExploitVariant,
    quantile_levels: usize,
    rng: &mut SuiteRng,
) -> Result<Exploitation> {
    state.require(Phase::Committed)?;
    let commitment = state.commitment.clone().expect("committed state has a subset");
    let s = commitment.subset;
    let count = state.exploitation_count(suite, s);
    if count == 0 {
        return Err(state.infeasible(suite, s));
    }
    let design = state.design(suite, s)?;
    let emulator = Emulator::new(
        s,
        suite.features_for(s),
        &commitment.fit,
        variant,
        &design,
        &state.responses(),
        quantile_levels,
    )?;
    let mut buf = vec![0.0; state.width];
    let mut row = Vec::with_capacity(emulator.features().len() + 1);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        suite.draw(rng, &mut buf);
        emulator.design_row(&buf[1..], &mut row);
        values.push(emulator.sample_row(&row, rng));
    }
    let exploration = state.t();
    let spend = exploration as f64 * state.c_epr + count as f64 * suite.c_ept(s);
    state.spent = spend;
    state.phase = Phase::Exhausted;
    Ok(Exploitation {
        estimate: EmpiricalMeasure::from_samples(values)?,
        emulator,
        subset: s,
        exploration,
        exploitation: count,
        spend,
    })
}

/// Writes one JSON object per round.
pub fn write_trace_jsonl<W: Write>(trace: &[RoundRecord], mut out: W) -> Result<()> {
    for r in trace {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
