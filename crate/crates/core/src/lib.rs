//! Multifidelity distribution learning under a sampling budget.
//!
//! The crate estimates the full distribution of an expensive scalar output `Y`
//! from cheap correlated surrogates `X_1..X_n`. An adaptive explore-then-commit
//! policy ([`policy`]) spends part of the budget on joint samples to fit
//! linear emulators `Y ≈ X_Sᵀβ_S + ε_S`, balances exploration against
//! exploitation with a computable 1-Wasserstein loss surrogate, and then spends
//! the rest sampling only the chosen surrogates.

pub mod bench;
pub mod error;
pub mod measures;
pub mod models;
pub mod policy;
pub mod regress;
pub mod rng;

pub use error::{Error, Result};
