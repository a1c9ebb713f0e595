//! Two-pass intraday periodicity estimation.
//!
//! Returns standardized by the rolling volatility are grouped by intra-day
//! slot (minute of day). Each pass computes a weighted second-moment
//! statistic per slot, keeping only squared standardized returns below a
//! threshold `x`, then normalizes so the squared factors average to one over
//! the normalization window. The first pass uses `x = 16` (4 standard
//! deviations); the second pass re-estimates on returns divided by the
//! first-pass factor with `x = 6.635`, the 99% quantile of a chi-squared
//! with one degree of freedom.

use super::StockReturns;
use crate::timebase::SESSION_MINUTES;

const PASS1_THRESHOLD: f64 = 16.0;
const PASS2_THRESHOLD: f64 = 6.635;
const TRUNCATION_CONSTANT: f64 = 1.081;

/// Per-slot periodicity factors. `f0`/`f1` are NaN on slots with no usable
/// data; the final `f` falls back to 1 there.
#[derive(Debug, Clone)]
pub struct PeriodicityModel {
    pub f0: Vec<f64>,
    pub f1: Vec<f64>,
    pub f: Vec<f64>,
    /// Slots whose factor fell back to 1 (no observations or all weights 0).
    pub fallback_slots: Vec<u16>,
    /// Smallest per-slot observation count, for diagnostics (the estimator
    /// is designed for at least 30 observations per slot).
    pub min_slot_obs: usize,
}

/// Weighted second-moment statistic of one slot: squared values at or above
/// the threshold get weight 0. `None` when no weight survives.
fn w_stat(sq: &[f64], x: f64) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for &v in sq {
        if v < x {
            sum += v;
            count += 1;
        }
    }
    (count > 0).then(|| (TRUNCATION_CONSTANT * sum / count as f64).sqrt())
}

/// Normalizes slot statistics so squared factors average to one over a
/// trailing circular window of `t_window` slots. NaN slots are skipped in
/// the averages and stay NaN.
fn normalize(w: &[f64], t_window: usize) -> Vec<f64> {
    let m = w.len();
    let mut out = vec![f64::NAN; m];
    for i in 0..m {
        if w[i].is_nan() {
            continue;
        }
        let mut acc = 0.0;
        let mut count = 0usize;
        for j in 0..t_window {
            let idx = (i + m - j) % m;
            if !w[idx].is_nan() {
                acc += w[idx] * w[idx];
                count += 1;
            }
        }
        if count > 0 {
            out[i] = w[i] / (acc / count as f64).sqrt();
        }
    }
    out
}

/// Two-pass periodicity estimation over the admitted history of one stock.
pub fn periodicity_factors(
    track: &StockReturns,
    sigma: &[Option<f64>],
    t_window: usize,
) -> PeriodicityModel {
    let m = SESSION_MINUTES as usize;
    // Squared standardized returns grouped by slot.
    let mut slots: Vec<Vec<f64>> = vec![Vec::new(); m];
    for i in 0..track.n_minutes() {
        if let (Some(r), Some(s)) = (track.returns[i], sigma[i]) {
            if s > 0.0 {
                let v = r / s;
                slots[track.slot(i) as usize].push(v * v);
            }
        }
    }
    let min_slot_obs = slots.iter().map(|s| s.len()).min().unwrap_or(0);

    let w1: Vec<f64> = slots
        .iter()
        .map(|sq| w_stat(sq, PASS1_THRESHOLD).unwrap_or(f64::NAN))
        .collect();
    let f0 = normalize(&w1, t_window);

    let w2: Vec<f64> = slots
        .iter()
        .enumerate()
        .map(|(i, sq)| {
            let f0i = f0[i];
            if f0i.is_nan() || f0i <= 0.0 {
                return f64::NAN;
            }
            let rescaled: Vec<f64> = sq.iter().map(|v| v / (f0i * f0i)).collect();
            w_stat(&rescaled, PASS2_THRESHOLD).unwrap_or(f64::NAN)
        })
        .collect();
    let f1 = normalize(&w2, t_window);

    // Final factor: renormalized product, with undefined slots falling back
    // to 1 so downstream scoring never divides by NaN.
    let prod: Vec<f64> = (0..m).map(|i| f0[i] * f1[i]).collect();
    let mut acc = 0.0;
    let mut count = 0usize;
    for &p in &prod {
        if !p.is_nan() {
            acc += p * p;
            count += 1;
        }
    }
    let scale = if count > 0 { (acc / count as f64).sqrt() } else { 1.0 };
    let mut fallback_slots = Vec::new();
    let f: Vec<f64> = (0..m)
        .map(|i| {
            if prod[i].is_nan() || scale <= 0.0 {
                fallback_slots.push(i as u16);
                1.0
            } else {
                prod[i] / scale
            }
        })
        .collect();
    PeriodicityModel { f0, f1, f, fallback_slots, min_slot_obs }
}
