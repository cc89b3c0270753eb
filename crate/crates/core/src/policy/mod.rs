//! Adaptive explore-then-commit for distribution learning.
//!
//! Exploration draws joint samples of every model; after each block the
//! policy refits every candidate subset, estimates its loss surrogate
//! `Ĝ_S(m) = sqrt(k̂1/m) + sqrt(k̂2/(B − c_epr m))` and either grows the
//! exploration set (doubling, or halfway to the estimated optimum) or commits
//! to the subset with the smallest estimated loss and spends the remaining
//! budget sampling only that subset's models.

mod emulator;
mod oracle;
mod score;
mod state;
mod surrogate;

pub use emulator::{Emulator, EmulatorKind, ExploitVariant, DEFAULT_QUANTILE_LEVELS};
pub use oracle::{efficiency_ratio, oracle_optimum, pilot_constants, OracleOptimum, PilotConstants, SubsetConstants};
pub use score::{score_subsets, SubsetScore};
pub use state::{
    affordable_count, exploit, run_aetc_d, write_trace_jsonl, Action, Exploitation, Phase, PolicyState, RoundRecord,
    ScoreRecord,
};
pub use surrogate::{optimal_exploration, optimal_value, surrogate_loss};
