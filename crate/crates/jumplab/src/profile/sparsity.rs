//! Instantaneous LOB sparsity and its normalized z-score.
//!
//! The raw sparsity uses the two best limit prices on each side and
//! discounts the thinner side's price gap by the opposing best volume:
//! `s = max[(ask1 - bid2) / (psi (1 + ln Vb)), (ask2 - bid1) / (psi (1 + ln Va))]`.
//! Working in integer ticks makes the `psi` normalization implicit. The
//! z-score divides by a rolling standard deviation and a slot factor, then
//! subtracts a rolling mean:
//! `S_t = s_t / (f_t sigma_t) - mu_t`.

use crate::data::CleanSession;
use crate::detector::JumpScoreSeries;
use crate::timebase::SESSION_MINUTES;

/// Slot factors and diagnostics of the sparsity normalization.
#[derive(Debug, Clone)]
pub struct SparsityModel {
    /// Mean of `s / sigma` per intra-day slot (1 where undefined).
    pub slot_factor: Vec<f64>,
}

/// Raw sparsity at one minute, in tick units; `None` when any required
/// level or volume is missing, or a volume discount is non-positive.
pub fn raw_sparsity(
    l1: Option<crate::data::EffectiveL1>,
    bid2: Option<i64>,
    ask2: Option<i64>,
) -> Option<f64> {
    let l1 = l1?;
    let bid2 = bid2?;
    let ask2 = ask2?;
    let vb = l1.bid_vol?;
    let va = l1.ask_vol?;
    if vb <= 0.0 || va <= 0.0 {
        return None; // log-undefined volume is a data anomaly
    }
    let den_b = 1.0 + vb.ln();
    let den_a = 1.0 + va.ln();
    if den_b <= 0.0 || den_a <= 0.0 {
        return None;
    }
    let gap_b = (l1.ask - bid2) as f64; // spans the bid side's depth
    let gap_a = (ask2 - l1.bid) as f64; // spans the ask side's depth
    Some((gap_b / den_b).max(gap_a / den_a))
}

/// Rolling mean/std over the most recent `k` present prior values, with the
/// scan capped at `2k` positions (mirrors the volatility window policy).
fn rolling_prior(values: &[Option<f64>], k: usize) -> Vec<Option<(f64, f64)>> {
    let n = values.len();
    let mut out = vec![None; n];
    let mut pos: Vec<usize> = Vec::new();
    let mut sum: Vec<f64> = vec![0.0];
    let mut sumsq: Vec<f64> = vec![0.0];
    let mut count_upto = vec![0usize; n + 1];
    for i in 0..n {
        count_upto[i + 1] = count_upto[i];
        if let Some(v) = values[i] {
            pos.push(i);
            sum.push(sum.last().unwrap() + v);
            sumsq.push(sumsq.last().unwrap() + v * v);
            count_upto[i + 1] += 1;
        }
    }
    for t in 1..n {
        let c = count_upto[t]; // values strictly before t
        if c < k {
            continue;
        }
        let first = c - k;
        if t - pos[first] > 2 * k {
            continue;
        }
        let s = sum[c] - sum[first];
        let s2 = sumsq[c] - sumsq[first];
        let mean = s / k as f64;
        let var = (s2 - s * s / k as f64) / (k as f64 - 1.0);
        out[t] = Some((mean, var.max(0.0).sqrt()));
    }
    out
}

/// Computes the normalized sparsity z-scores aligned with a score series.
pub fn sparsity_scores(
    scores: &JumpScoreSeries,
    cleaned: &[CleanSession],
    window: usize,
) -> Vec<Option<f64>> {
    let (z, _) = sparsity_scores_with_model(scores, cleaned, window);
    z
}

pub fn sparsity_scores_with_model(
    scores: &JumpScoreSeries,
    cleaned: &[CleanSession],
    window: usize,
) -> (Vec<Option<f64>>, SparsityModel) {
    let n = scores.len();
    let m = SESSION_MINUTES as usize;
    let mut raw = vec![None; n];
    for (pos, &day) in scores.days.iter().enumerate() {
        let Some(sess) = cleaned.iter().find(|c| c.day == day) else {
            continue;
        };
        for slot in 0..m {
            raw[pos * m + slot] = raw_sparsity(sess.l1[slot], sess.bid2[slot], sess.ask2[slot]);
        }
    }

    // Rolling dispersion of the raw sparsity.
    let sigma = rolling_prior(&raw, window);
    let ratio: Vec<Option<f64>> = (0..n)
        .map(|i| match (raw[i], sigma[i]) {
            (Some(s), Some((_, sd))) if sd > 0.0 => Some(s / sd),
            _ => None,
        })
        .collect();

    // Slot factor: mean of s/sigma per intra-day slot over the full sample.
    let mut acc = vec![0.0f64; m];
    let mut cnt = vec![0usize; m];
    for (i, r) in ratio.iter().enumerate() {
        if let Some(v) = r {
            acc[i % m] += v;
            cnt[i % m] += 1;
        }
    }
    let slot_factor: Vec<f64> = (0..m)
        .map(|s| if cnt[s] > 0 { acc[s] / cnt[s] as f64 } else { 1.0 })
        .collect();

    // Normalized level and its rolling mean.
    let level: Vec<Option<f64>> = (0..n)
        .map(|i| {
            let f = slot_factor[i % m];
            if f <= 0.0 {
                return None;
            }
            ratio[i].map(|v| v / f)
        })
        .collect();
    let mu = rolling_prior(&level, window);
    let z: Vec<Option<f64>> = (0..n)
        .map(|i| match (level[i], mu[i]) {
            (Some(v), Some((mean, _))) => Some(v - mean),
            _ => None,
        })
        .collect();
    (z, SparsityModel { slot_factor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::EffectiveL1;

    fn l1(bid: i64, ask: i64, bv: f64, av: f64) -> Option<EffectiveL1> {
        Some(EffectiveL1 { bid, ask, bid_vol: Some(bv), ask_vol: Some(av) })
    }

    #[test]
    fn raw_formula_example() {
        // Prices 10.02/9.99 and 10.03/10.00 with unit volumes: both gaps are
        // 3 ticks and log V = 0, so s = 3.
        let s = raw_sparsity(l1(1000, 1002, 1.0, 1.0), Some(999), Some(1003)).unwrap();
        assert_eq!(s, 3.0);
        // Larger ask volume discounts the ask-side gap.
        let s = raw_sparsity(l1(1000, 1002, 1.0, std::f64::consts::E), Some(999), Some(1003))
            .unwrap();
        assert_eq!(s, 3.0); // max(3/1, 3/2) = 3
        let s = raw_sparsity(
            l1(1000, 1002, std::f64::consts::E, std::f64::consts::E),
            Some(999),
            Some(1003),
        )
        .unwrap();
        assert_eq!(s, 1.5);
    }

    #[test]
    fn missing_components_give_missing() {
        assert_eq!(raw_sparsity(None, Some(999), Some(1003)), None);
        assert_eq!(raw_sparsity(l1(1000, 1002, 1.0, 1.0), None, Some(1003)), None);
        assert_eq!(raw_sparsity(l1(1000, 1002, 1.0, 1.0), Some(999), None), None);
        // Zero volume is treated as missing.
        assert_eq!(raw_sparsity(l1(1000, 1002, 0.0, 1.0), Some(999), Some(1003)), None);
        // Volumes below 1/e flip the discount sign: missing as well.
        assert_eq!(raw_sparsity(l1(1000, 1002, 0.2, 1.0), Some(999), Some(1003)), None);
    }

    #[test]
    fn rolling_prior_window_behaviour() {
        let values: Vec<Option<f64>> = (0..100).map(|i| Some(i as f64)).collect();
        let stats = rolling_prior(&values, 10);
        // At t = 50 the prior 10 values are 40..49: mean 44.5.
        let (mean, sd) = stats[50].unwrap();
        assert!((mean - 44.5).abs() < 1e-12);
        assert!(sd > 0.0);
        assert_eq!(stats[9], None, "warmup");
        assert!(stats[10].is_some());
        // Sparse data beyond the 2k cap goes missing.
        let sparse: Vec<Option<f64>> =
            (0..100).map(|i| if i % 3 == 0 { Some(1.0) } else { None }).collect();
        let stats = rolling_prior(&sparse, 10);
        assert!(stats.iter().all(|s| s.is_none()));
    }
}
