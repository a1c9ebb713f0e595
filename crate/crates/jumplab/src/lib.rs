//! Detection and classification of abnormal price jumps in minute-resolution
//! market data.
//!
//! The pipeline stages map onto the top-level modules:
//!
//! - [`data`]: LOB snapshot ingestion, mid-price construction, session
//!   filtering and log-return series with explicit missing-value semantics.
//! - [`detector`]: jump scores from rolling bipower volatility and two-pass
//!   intraday periodicity, plus the extreme-value detection threshold.
//! - [`cluster`]: grouping of jumps (and news) under a Bernoulli null,
//!   exogenous/endogenous labelling and the market-wide / contamination
//!   filters.
//! - [`profile`]: per-minute observables (score, excess volatility, trends,
//!   LOB sparsity) and aggregate event-aligned profiles with bootstrap bands.
//! - [`powerlaw`]: double power-law fits of volatility profiles (direct
//!   nonlinear least squares on cumulative sums, and a closed-form log-space
//!   solution with a shock-time grid search) plus the asymmetry measure.
//! - [`classify`]: logit/probit regression, AUC, k-NN and ARI utilities used
//!   to reconstruct the news-based labels from fitted shape features.
//! - [`hawkes`]: a near-critical Hawkes simulator with power-law kernel that
//!   emits synthetic panels exercising the full pipeline.
//! - [`stats`]: shared statistical utilities (Welch test, FDR, Kendall tau,
//!   Shapiro-Wilk, KS, bootstrap helpers).

pub mod cluster;
pub mod classify;
pub mod data;
pub mod detector;
pub mod error;
pub mod hawkes;
pub mod powerlaw;
pub mod profile;
pub mod stats;
pub mod timebase;

pub use error::{Error, Result};
