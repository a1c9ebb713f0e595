//! Jump detection: returns are standardized by rolling bipower volatility
//! and an intraday periodicity factor, then flagged against an extreme-value
//! threshold.

mod bipower;
mod periodicity;

pub use bipower::bipower_volatility;
pub use periodicity::{periodicity_factors, PeriodicityModel};

use crate::data::ReturnSeries;
use crate::error::{Error, Result};
use crate::timebase::{global_minute, GlobalMinute, SESSION_MINUTES};

/// Detector parameters.
#[derive(Debug, Clone, Copy)]
pub struct DetectorConfig {
    /// Rolling volatility window length (pairs of adjacent returns).
    pub window: usize,
    /// Statistical significance of the extreme-value threshold.
    pub alpha: f64,
    /// Minutes at the session open and close where jumps are discarded.
    /// Excluded minutes still feed the volatility and periodicity estimates.
    pub edge_exclusion: u16,
    /// Normalization window (in slots) for the periodicity factors.
    pub periodicity_window: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            window: SESSION_MINUTES as usize,
            alpha: 0.01,
            edge_exclusion: 15,
            periodicity_window: SESSION_MINUTES as usize,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::Domain("detector window must be >= 2".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain("alpha must lie in (0, 1)".into()));
        }
        if self.periodicity_window == 0 || self.periodicity_window > SESSION_MINUTES as usize {
            return Err(Error::Domain("periodicity window must lie in 1..=390".into()));
        }
        Ok(())
    }
}

/// Returns of one stock over its admitted sessions, concatenated
/// session-major so index `i` maps to `(days[i / 390], slot i % 390)`.
#[derive(Debug, Clone, Default)]
pub struct StockReturns {
    pub days: Vec<usize>,
    pub returns: Vec<Option<f64>>,
}

impl StockReturns {
    pub fn from_sessions(sessions: &[ReturnSeries]) -> Self {
        let mut days = Vec::with_capacity(sessions.len());
        let mut returns = Vec::with_capacity(sessions.len() * SESSION_MINUTES as usize);
        for s in sessions {
            days.push(s.day);
            returns.extend_from_slice(&s.returns);
        }
        Self { days, returns }
    }

    pub fn n_minutes(&self) -> usize {
        self.returns.len()
    }

    #[inline]
    pub fn slot(&self, i: usize) -> u16 {
        (i % SESSION_MINUTES as usize) as u16
    }

    /// Calendar minute of track index `i`.
    #[inline]
    pub fn minute(&self, i: usize) -> GlobalMinute {
        global_minute(self.days[i / SESSION_MINUTES as usize], self.slot(i))
    }
}

/// Per-minute jump scores with their components; `None` = MISSING.
#[derive(Debug, Clone)]
pub struct JumpScoreSeries {
    pub days: Vec<usize>,
    pub r: Vec<Option<f64>>,
    pub sigma: Vec<Option<f64>>,
    /// Slot periodicity factor, constant across days for a given slot.
    pub f: Vec<f64>,
    pub j: Vec<Option<f64>>,
}

impl JumpScoreSeries {
    #[inline]
    pub fn slot(&self, i: usize) -> u16 {
        (i % SESSION_MINUTES as usize) as u16
    }

    #[inline]
    pub fn minute(&self, i: usize) -> GlobalMinute {
        global_minute(self.days[i / SESSION_MINUTES as usize], self.slot(i))
    }

    /// Track index of a calendar minute, if that day is in the series.
    pub fn index_of(&self, minute: GlobalMinute) -> Option<usize> {
        let day = crate::timebase::day_of(minute);
        let pos = self.days.binary_search(&day).ok()?;
        Some(pos * SESSION_MINUTES as usize + crate::timebase::slot_of(minute) as usize)
    }

    pub fn len(&self) -> usize {
        self.j.len()
    }

    pub fn is_empty(&self) -> bool {
        self.j.is_empty()
    }
}

/// A detected threshold exceedance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub stock: usize,
    pub minute: GlobalMinute,
    pub score: f64,
    pub abs_score: f64,
    pub threshold: f64,
}

/// Extreme-value threshold for `|J|` under the no-jump null.
///
/// `C_K - S_K * log(log(1 / (1 - alpha)))` with
/// `S_K = (2 log K)^{-1/2}` and
/// `C_K = (2 log K)^{1/2} - (log pi + log log K) / (2 (2 log K)^{1/2})`.
pub fn gumbel_threshold(window: usize, alpha: f64) -> Result<f64> {
    if window < 2 {
        return Err(Error::Domain("window must be >= 2 for the threshold".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, 1)")));
    }
    let two_log_k = 2.0 * (window as f64).ln();
    let s_k = two_log_k.powf(-0.5);
    let c_k = two_log_k.sqrt()
        - (std::f64::consts::PI.ln() + (window as f64).ln().ln()) / (2.0 * two_log_k.sqrt());
    Ok(c_k - s_k * (1.0 / (1.0 - alpha)).ln().ln())
}

/// Assembles the jump-score series of one stock: `J_t = r_t / (sigma_t f_t)`.
pub fn jump_scores(track: &StockReturns, cfg: &DetectorConfig) -> Result<JumpScoreSeries> {
    cfg.validate()?;
    let sigma = bipower_volatility(&track.returns, cfg.window);
    let model = periodicity_factors(track, &sigma, cfg.periodicity_window);
    let n = track.n_minutes();
    let mut f = vec![1.0; n];
    let mut j = vec![None; n];
    for i in 0..n {
        let fi = model.f[track.slot(i) as usize];
        f[i] = fi;
        if let (Some(r), Some(s)) = (track.returns[i], sigma[i]) {
            if s > 0.0 {
                j[i] = Some(r / (s * fi));
            }
        }
    }
    Ok(JumpScoreSeries { days: track.days.clone(), r: track.returns.clone(), sigma, f, j })
}

/// Flags every minute with `|J| > threshold`, excluding the first and last
/// `edge_exclusion` minutes of each session.
pub fn detect_jumps(
    stock: usize,
    scores: &JumpScoreSeries,
    cfg: &DetectorConfig,
) -> Result<Vec<JumpEvent>> {
    let threshold = gumbel_threshold(cfg.window, cfg.alpha)?;
    let mut events = Vec::new();
    let edge = cfg.edge_exclusion;
    for i in 0..scores.len() {
        let slot = scores.slot(i);
        if slot < edge || slot >= SESSION_MINUTES - edge {
            continue;
        }
        if let Some(score) = scores.j[i] {
            if score.abs() > threshold {
                events.push(JumpEvent {
                    stock,
                    minute: scores.minute(i),
                    score,
                    abs_score: score.abs(),
                    threshold,
                });
            }
        }
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::seeded_rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn gumbel_threshold_matches_reported_value() {
        let t = gumbel_threshold(390, 0.01).unwrap();
        assert!((t - 4.36).abs() <= 0.01, "threshold {t}");
    }

    #[test]
    fn gumbel_threshold_k100() {
        // Frozen from a direct high-precision evaluation of the closed
        // formula with natural logarithms.
        let t = gumbel_threshold(100, 0.01).unwrap();
        assert!((t - 4.110426).abs() < 1e-5, "threshold {t}");
    }

    #[test]
    fn gumbel_threshold_monotonicity_and_limits() {
        // Decreasing in alpha.
        let mut prev = f64::INFINITY;
        for a in [0.001, 0.01, 0.05, 0.2, 0.5, 0.9, 0.999] {
            let t = gumbel_threshold(390, a).unwrap();
            assert!(t < prev);
            prev = t;
        }
        // The threshold diverges to -infinity as alpha -> 1 (everything
        // flagged); in f64 the closest representable alpha already drags it
        // far below the working 4.36 level.
        assert!(gumbel_threshold(390, 1.0 - 1e-12).unwrap() < 2.1);
        // Increasing in K.
        assert!(gumbel_threshold(390, 0.01).unwrap() > gumbel_threshold(100, 0.01).unwrap());
        assert!(gumbel_threshold(390, 1.0).is_err());
        assert!(gumbel_threshold(390, 0.0).is_err());
        assert!(gumbel_threshold(1, 0.01).is_err());
    }

    fn track_of(returns: Vec<Option<f64>>) -> StockReturns {
        let n_days = returns.len().div_ceil(SESSION_MINUTES as usize);
        let mut r = returns;
        r.resize(n_days * SESSION_MINUTES as usize, None);
        StockReturns { days: (0..n_days).collect(), returns: r }
    }

    #[test]
    fn scores_and_detection_edges() {
        // Constant-magnitude alternating returns give sigma = c sqrt(pi/2)
        // and f = 1; inject one large return inside the session and one in
        // the edge-exclusion zone.
        let c = 1e-3;
        let n = 390 * 4;
        let mut returns: Vec<Option<f64>> = (0..n)
            .map(|i| {
                if i % 390 == 0 {
                    None
                } else {
                    Some(if i % 2 == 0 { c } else { -c })
                }
            })
            .collect();
        let spike = 390 * 3 + 100;
        returns[spike] = Some(30.0 * c);
        let edge_spike = 390 * 3 + 5;
        returns[edge_spike] = Some(30.0 * c);
        let track = track_of(returns);
        let cfg = DetectorConfig::default();
        let scores = jump_scores(&track, &cfg).unwrap();
        let events = detect_jumps(7, &scores, &cfg).unwrap();
        assert!(events.iter().any(|e| e.minute == global_minute(3, 100)));
        assert!(
            !events.iter().any(|e| e.minute == global_minute(3, 5)),
            "edge-excluded minutes must not produce events"
        );
        for e in &events {
            assert_eq!(e.stock, 7);
            assert!(e.abs_score > e.threshold);
        }
    }

    #[test]
    fn scores_are_scale_invariant() {
        // Multiplying all returns by a power of two leaves J bit-identical.
        let mut rng = seeded_rng(3);
        let n = 390 * 4;
        let returns: Vec<Option<f64>> = (0..n)
            .map(|i| {
                if i % 390 == 0 || rng.gen::<f64>() < 0.02 {
                    None
                } else {
                    Some(rng.sample::<f64, _>(StandardNormal) * 1e-3)
                }
            })
            .collect();
        let scaled: Vec<Option<f64>> = returns.iter().map(|r| r.map(|x| x * 4.0)).collect();
        let cfg = DetectorConfig::default();
        let a = jump_scores(&track_of(returns), &cfg).unwrap();
        let b = jump_scores(&track_of(scaled), &cfg).unwrap();
        assert_eq!(a.j, b.j);
    }

    #[test]
    fn seasonality_suppression_at_daily_lag() {
        // With an injected U-shaped intraday profile, |J| must carry less
        // daily-lag autocorrelation than |r|.
        let mut rng = seeded_rng(17);
        let days = 30;
        let profile: Vec<f64> = (0..390)
            .map(|s| {
                let x = s as f64 / 389.0;
                1.0 + 3.0 * (2.0 * (x - 0.5)).powi(2)
            })
            .collect();
        let returns: Vec<Option<f64>> = (0..390 * days)
            .map(|i| {
                if i % 390 == 0 {
                    None
                } else {
                    Some(profile[i % 390] * rng.sample::<f64, _>(StandardNormal) * 1e-3)
                }
            })
            .collect();
        let track = track_of(returns.clone());
        let scores = jump_scores(&track, &DetectorConfig::default()).unwrap();

        let autocorr_daily = |xs: &[Option<f64>]| {
            let pairs: Vec<(f64, f64)> = (390..xs.len())
                .filter_map(|i| match (xs[i - 390], xs[i]) {
                    (Some(a), Some(b)) => Some((a.abs(), b.abs())),
                    _ => None,
                })
                .collect();
            let ax: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let bx: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let (ma, mb) = (crate::stats::mean(&ax), crate::stats::mean(&bx));
            let cov: f64 = pairs.iter().map(|(a, b)| (a - ma) * (b - mb)).sum::<f64>();
            let va: f64 = ax.iter().map(|a| (a - ma) * (a - ma)).sum::<f64>();
            let vb: f64 = bx.iter().map(|b| (b - mb) * (b - mb)).sum::<f64>();
            cov / (va * vb).sqrt()
        };
        let raw = autocorr_daily(&returns[390 * 3..]);
        let standardized = autocorr_daily(&scores.j[390 * 3..]);
        assert!(
            standardized < raw,
            "daily-lag autocorrelation: |J| {standardized} vs |r| {raw}"
        );
        assert!(raw > 0.15, "the injected seasonality must be visible in |r|");
        assert!(standardized < 0.1, "|J| should be nearly deseasonalized");
        assert!(standardized < raw / 2.0);
    }
}
