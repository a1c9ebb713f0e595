//! News alignment and the cross-sectional cluster filters.

use rayon::prelude::*;

use super::{DiscardReason, JumpCluster, Label, NewsCluster};
use crate::stats::{quantile, seeded_rng, sub_seed};
use crate::timebase::{day_of, global_minute, same_day, GlobalMinute, SESSION_MINUTES};
use rand::Rng;

/// Labels jump clusters by proximity to news-cluster starts.
///
/// A cluster is exogenous when its first jump lies within
/// `[-before, +after]` minutes of the start of a same-day news cluster of
/// the same stock; otherwise it is endogenous. Endogenous clusters whose
/// first jump falls strictly inside a news cluster's span are discarded.
/// Already-discarded clusters keep their original reason.
pub fn align_news(clusters: &mut [JumpCluster], news: &[NewsCluster], before: i64, after: i64) {
    for c in clusters.iter_mut() {
        if c.label == Label::Discarded {
            continue;
        }
        let mut exo = false;
        let mut inside = false;
        for n in news.iter().filter(|n| n.stock == c.stock) {
            if !same_day(c.t_first, n.t_first) {
                continue;
            }
            let offset = c.t_first - n.t_first;
            if offset >= -before && offset <= after {
                exo = true;
                break;
            }
            if c.t_first > n.t_first && c.t_first < n.t_last {
                inside = true;
            }
        }
        if exo {
            c.label = Label::Exo;
        } else if inside {
            c.label = Label::Discarded;
            c.reason = DiscardReason::InsideNewsCluster;
        } else {
            c.label = Label::Endo;
        }
    }
}

/// How the market-wide overlap threshold is chosen.
#[derive(Debug, Clone, Copy)]
pub enum MarketWideMode {
    /// A fixed overlapping-stock count (30 by default, 10% of the pool).
    Fixed(usize),
    /// Per-cluster thresholds from a shuffle null: clusters are repositioned
    /// uniformly within their calendar month (lengths preserved, same-stock
    /// overlaps forbidden) and a cluster is flagged when its empirical
    /// overlap count exceeds the `1 - significance` quantile of the null.
    ShuffleNull { shuffles: usize, significance: f64, seed: u64 },
}

/// Number of *other* stocks with at least one cluster whose closed span
/// overlaps each cluster's span.
fn overlap_counts(spans: &[(usize, GlobalMinute, GlobalMinute)]) -> Vec<usize> {
    // Group cluster indices by day; spans never cross sessions.
    use std::collections::HashMap;
    let mut by_day: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &(_, t0, _)) in spans.iter().enumerate() {
        by_day.entry(day_of(t0)).or_default().push(i);
    }
    let mut counts = vec![0usize; spans.len()];
    for members in by_day.values() {
        for &i in members {
            let (stock_i, a0, a1) = spans[i];
            let mut stocks: Vec<usize> = members
                .iter()
                .filter(|&&j| {
                    let (stock_j, b0, b1) = spans[j];
                    stock_j != stock_i && b0 <= a1 && a0 <= b1
                })
                .map(|&j| spans[j].0)
                .collect();
            stocks.sort_unstable();
            stocks.dedup();
            counts[i] = stocks.len();
        }
    }
    counts
}

/// Flags market-wide clusters across the whole panel.
///
/// `admitted_days[stock]` lists the admitted session days of each stock and
/// is only used by the shuffle null to draw repositioned clusters;
/// `month_of_day` maps a day index to its calendar month key.
pub fn market_wide_filter(
    clusters: &mut [JumpCluster],
    mode: MarketWideMode,
    admitted_days: &[Vec<usize>],
    month_of_day: &(dyn Fn(usize) -> u32 + Sync),
) {
    let spans: Vec<(usize, GlobalMinute, GlobalMinute)> =
        clusters.iter().map(|c| (c.stock, c.t_first, c.t_last)).collect();
    let counts = overlap_counts(&spans);
    let flagged: Vec<bool> = match mode {
        MarketWideMode::Fixed(threshold) => {
            counts.iter().map(|&c| c > threshold).collect()
        }
        MarketWideMode::ShuffleNull { shuffles, significance, seed } => {
            let null_counts = shuffle_null_counts(&spans, admitted_days, month_of_day, shuffles, seed);
            (0..spans.len())
                .map(|i| {
                    let null: Vec<f64> = null_counts[i].iter().map(|&c| c as f64).collect();
                    let threshold = quantile(&null, 1.0 - significance);
                    counts[i] as f64 > threshold
                })
                .collect()
        }
    };
    for (c, f) in clusters.iter_mut().zip(flagged) {
        if f && c.reason == DiscardReason::None {
            c.label = Label::Discarded;
            c.reason = DiscardReason::MarketWide;
        }
    }
}

/// Null overlap counts per cluster over `shuffles` global repositionings.
/// Every cluster is moved uniformly within its calendar month; a cluster's
/// own position stays fixed when counting overlaps against the shuffled
/// positions of all other stocks' clusters.
fn shuffle_null_counts(
    spans: &[(usize, GlobalMinute, GlobalMinute)],
    admitted_days: &[Vec<usize>],
    month_of_day: &(dyn Fn(usize) -> u32 + Sync),
    shuffles: usize,
    seed: u64,
) -> Vec<Vec<usize>> {
    // Candidate days per (stock, month).
    let per_replicate: Vec<Vec<usize>> = (0..shuffles)
        .into_par_iter()
        .map(|rep| {
            let mut rng = seeded_rng(sub_seed(seed, "mw-shuffle", rep as u64));
            let mut shuffled: Vec<(usize, GlobalMinute, GlobalMinute)> = Vec::with_capacity(spans.len());
            for &(stock, t0, t1) in spans.iter() {
                let len = t1 - t0;
                let month = month_of_day(day_of(t0));
                let days: Vec<usize> = admitted_days
                    .get(stock)
                    .map(|ds| {
                        ds.iter().copied().filter(|&d| month_of_day(d) == month).collect()
                    })
                    .unwrap_or_default();
                let mut placed = None;
                if !days.is_empty() && len < SESSION_MINUTES as i64 {
                    // Rejection sampling against same-stock overlap.
                    for _ in 0..64 {
                        let day = days[rng.gen_range(0..days.len())];
                        let slot = rng.gen_range(0..(SESSION_MINUTES as i64 - len)) as u16;
                        let s0 = global_minute(day, slot);
                        let s1 = s0 + len;
                        let clash = shuffled
                            .iter()
                            .any(|&(s, b0, b1)| s == stock && b0 <= s1 && s0 <= b1);
                        if !clash {
                            placed = Some((stock, s0, s1));
                            break;
                        }
                    }
                }
                // A cluster that cannot be placed keeps its true position.
                shuffled.push(placed.unwrap_or((stock, t0, t1)));
            }
            // Count, for each original span, the shuffled other-stock overlaps.
            let mut counts = vec![0usize; spans.len()];
            for (i, &(stock_i, a0, a1)) in spans.iter().enumerate() {
                let mut stocks: Vec<usize> = shuffled
                    .iter()
                    .filter(|&&(s, b0, b1)| s != stock_i && b0 <= a1 && a0 <= b1)
                    .map(|&(s, _, _)| s)
                    .collect();
                stocks.sort_unstable();
                stocks.dedup();
                counts[i] = stocks.len();
            }
            counts
        })
        .collect();
    let mut out = vec![Vec::with_capacity(shuffles); spans.len()];
    for rep in per_replicate {
        for (i, c) in rep.into_iter().enumerate() {
            out[i].push(c);
        }
    }
    out
}

/// Discards any two same-stock, same-day clusters whose starts are closer
/// than `gap` minutes. Already-discarded clusters still contaminate their
/// neighbours but keep their original reason.
pub fn contamination_filter(clusters: &mut [JumpCluster], gap: i64) {
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by_key(|&i| (clusters[i].stock, clusters[i].t_first));
    let mut to_discard = Vec::new();
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if clusters[a].stock != clusters[b].stock {
            continue;
        }
        if !same_day(clusters[a].t_first, clusters[b].t_first) {
            continue;
        }
        if clusters[b].t_first - clusters[a].t_first < gap {
            to_discard.push(a);
            to_discard.push(b);
        }
    }
    for i in to_discard {
        if clusters[i].reason == DiscardReason::None {
            clusters[i].label = Label::Discarded;
            clusters[i].reason = DiscardReason::Contamination;
        }
    }
}
