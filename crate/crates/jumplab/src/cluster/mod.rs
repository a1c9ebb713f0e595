//! Clustering of jumps and news under a Bernoulli null, with
//! exogenous/endogenous labelling and cross-sectional filters.
//!
//! Two consecutive same-day events are chained into one cluster when their
//! inter-time is improbably short for independent events of rate `p`: the
//! limit is `log(1 - eps) / log(1 - p) - 1` minutes. The rate is calibrated
//! per stock and calendar month so the null preserves each stock's monthly
//! event count on average.

mod filters;

pub use filters::{align_news, contamination_filter, market_wide_filter, MarketWideMode};

use std::collections::HashMap;

use crate::detector::JumpEvent;
use crate::error::{Error, Result};
use crate::stats::kendall_tau_descending;
use crate::timebase::{day_of, GlobalMinute};

/// Clustering parameters.
#[derive(Debug, Clone, Copy)]
pub struct ClusterConfig {
    /// Significance of the Bernoulli-null inter-time test.
    pub epsilon: f64,
    /// News alignment window: minutes before a news-cluster start.
    pub news_before: i64,
    /// News alignment window: minutes after a news-cluster start.
    pub news_after: i64,
    /// Overlapping-stock count above which a cluster is market-wide.
    pub market_wide_threshold: usize,
    /// Same-stock cluster starts closer than this are cross-contaminated.
    pub contamination_gap: i64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            news_before: 1,
            news_after: 4,
            market_wide_threshold: 30,
            contamination_gap: 100,
        }
    }
}

/// Cluster label after news alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Endo,
    Exo,
    Discarded,
}

/// Why a cluster was discarded; `None` for kept clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscardReason {
    None,
    MarketWide,
    Contamination,
    InsideNewsCluster,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Endo => "ENDO",
            Label::Exo => "EXO",
            Label::Discarded => "DISCARDED",
        })
    }
}

impl std::fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DiscardReason::None => "none",
            DiscardReason::MarketWide => "market_wide",
            DiscardReason::Contamination => "contamination",
            DiscardReason::InsideNewsCluster => "inside_news_cluster",
        })
    }
}

/// A maximal chain of same-day jumps with improbably short inter-times.
#[derive(Debug, Clone)]
pub struct JumpCluster {
    pub stock: usize,
    pub events: Vec<JumpEvent>,
    pub t_first: GlobalMinute,
    pub t_last: GlobalMinute,
    pub label: Label,
    pub reason: DiscardReason,
    pub kendall_tau: Option<f64>,
}

impl JumpCluster {
    pub fn size(&self) -> usize {
        self.events.len()
    }

    pub fn is_kept(&self) -> bool {
        self.label != Label::Discarded
    }
}

/// A cluster of news timestamps of one stock.
#[derive(Debug, Clone)]
pub struct NewsCluster {
    pub stock: usize,
    pub times: Vec<GlobalMinute>,
    pub t_first: GlobalMinute,
    pub t_last: GlobalMinute,
}

/// Per (stock, month) Bernoulli rates.
#[derive(Debug, Clone, Default)]
pub struct RateTable {
    rates: HashMap<(usize, u32), f64>,
}

impl RateTable {
    pub fn get(&self, stock: usize, month_key: u32) -> Option<f64> {
        self.rates.get(&(stock, month_key)).copied()
    }

    pub fn insert(&mut self, stock: usize, month_key: u32, p: f64) {
        self.rates.insert((stock, month_key), p);
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }
}

/// Calibrates `p` so the null preserves each stock-month's average event
/// count: `p = events / admitted minutes`, clamped inside (1e-9, 1 - 1e-9).
/// Stock-months with zero admitted minutes are skipped.
pub fn calibrate_p(
    counts: &HashMap<(usize, u32), usize>,
    minutes: &HashMap<(usize, u32), usize>,
) -> RateTable {
    let mut table = RateTable::default();
    for (&key, &mins) in minutes {
        if mins == 0 {
            continue;
        }
        let count = counts.get(&key).copied().unwrap_or(0);
        let p = (count as f64 / mins as f64).clamp(1e-9, 1.0 - 1e-9);
        table.rates.insert(key, p);
    }
    table
}

/// Maximum inter-time (in minutes) for two consecutive events to join the
/// same cluster: `log(1 - eps) / log(1 - p) - 1`.
pub fn cluster_limit(epsilon: f64, p: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "cluster_limit needs eps, p in (0, 1); got eps={epsilon} p={p}"
        )));
    }
    Ok((1.0 - epsilon).ln() / (1.0 - p).ln() - 1.0)
}

/// Single-linkage clustering of sorted event times. Consecutive events chain
/// when they fall on the same trading day and their inter-time is strictly
/// below the month's limit. Returns index ranges into `times`.
pub fn cluster_events<F>(times: &[GlobalMinute], limit_for: F) -> Vec<std::ops::Range<usize>>
where
    F: Fn(GlobalMinute) -> f64,
{
    let mut out = Vec::new();
    if times.is_empty() {
        return out;
    }
    debug_assert!(times.windows(2).all(|w| w[0] <= w[1]), "times must be sorted");
    let mut start = 0usize;
    for i in 1..times.len() {
        let joined = day_of(times[i]) == day_of(times[i - 1])
            && ((times[i] - times[i - 1]) as f64) < limit_for(times[i]);
        if !joined {
            out.push(start..i);
            start = i;
        }
    }
    out.push(start..times.len());
    out
}

/// Clusters the detected jumps of one stock. Events must be sorted by time.
pub fn cluster_jumps(
    stock: usize,
    events: &[JumpEvent],
    rates: &RateTable,
    epsilon: f64,
    month_of_day: &dyn Fn(usize) -> u32,
) -> Vec<JumpCluster> {
    let times: Vec<GlobalMinute> = events.iter().map(|e| e.minute).collect();
    let limit_for = |minute: GlobalMinute| {
        let month = month_of_day(day_of(minute));
        rates
            .get(stock, month)
            .and_then(|p| cluster_limit(epsilon, p).ok())
            .unwrap_or(-1.0)
    };
    cluster_events(&times, limit_for)
        .into_iter()
        .map(|range| {
            let members = events[range].to_vec();
            let amps: Vec<f64> = members.iter().map(|e| e.abs_score).collect();
            JumpCluster {
                stock,
                t_first: members.first().unwrap().minute,
                t_last: members.last().unwrap().minute,
                kendall_tau: kendall_tau_descending(&amps),
                events: members,
                label: Label::Endo,
                reason: DiscardReason::None,
            }
        })
        .collect()
}

/// Clusters the news events of one stock with the news-calibrated rates.
pub fn cluster_news(
    stock: usize,
    times: &[GlobalMinute],
    rates: &RateTable,
    epsilon: f64,
    month_of_day: &dyn Fn(usize) -> u32,
) -> Vec<NewsCluster> {
    let limit_for = |minute: GlobalMinute| {
        let month = month_of_day(day_of(minute));
        rates
            .get(stock, month)
            .and_then(|p| cluster_limit(epsilon, p).ok())
            .unwrap_or(-1.0)
    };
    cluster_events(times, limit_for)
        .into_iter()
        .map(|range| {
            let members = times[range].to_vec();
            NewsCluster {
                stock,
                t_first: *members.first().unwrap(),
                t_last: *members.last().unwrap(),
                times: members,
            }
        })
        .collect()
}
