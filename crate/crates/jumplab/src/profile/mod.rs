//! Per-minute observables and event-aligned profile windows.
//!
//! Five observables are tracked per minute: the absolute jump score, an EMA
//! of past excess volatility, an EMA of past signed trend, a binarized trend
//! EMA, and a normalized LOB sparsity z-score. Windows of fixed width are
//! extracted around cluster starts and aggregated per class with bootstrap
//! bands, Welch tests against a pre-window baseline and FDR correction.

mod aggregate;
mod sparsity;

pub use aggregate::{aggregate, AggregateProfile, OffsetStats};
pub use sparsity::{sparsity_scores, SparsityModel};

use std::collections::HashSet;

use crate::data::CleanSession;
use crate::detector::{JumpEvent, JumpScoreSeries};
use crate::timebase::{day_of, slot_of, GlobalMinute, SESSION_MINUTES};

/// EMA weight (decay time of roughly 16 minutes at 0.12).
pub const DEFAULT_KAPPA: f64 = 0.12;
/// Default aligned-window width in minutes, centered on the first jump.
pub const DEFAULT_WINDOW: usize = 160;
/// Session minutes during which the freshly reset EMAs are unreliable.
pub const EMA_BURN_IN: u16 = 30;

/// Which observable a window or aggregate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    /// Instantaneous |J|.
    AbsScore,
    /// EMA of past |J| excluding jump minutes.
    ExcessVolatility,
    /// EMA of past signed J excluding jump minutes (windows use |T|).
    Trend,
    /// EMA of sign(J) on all minutes (windows use |B|).
    BinarizedTrend,
    /// Normalized LOB sparsity z-score.
    Sparsity,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::AbsScore,
        Observable::ExcessVolatility,
        Observable::Trend,
        Observable::BinarizedTrend,
        Observable::Sparsity,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Observable::AbsScore => "abs_j",
            Observable::ExcessVolatility => "sigma_ema",
            Observable::Trend => "trend",
            Observable::BinarizedTrend => "binarized_trend",
            Observable::Sparsity => "sparsity",
        }
    }
}

/// Per-minute observable values of one stock, aligned with the score series
/// indices; `None` = MISSING.
#[derive(Debug, Clone)]
pub struct ObservableSeries {
    pub days: Vec<usize>,
    pub abs_score: Vec<Option<f64>>,
    pub excess_volatility: Vec<Option<f64>>,
    pub trend: Vec<Option<f64>>,
    pub binarized_trend: Vec<Option<f64>>,
    pub sparsity: Vec<Option<f64>>,
}

impl ObservableSeries {
    pub fn get(&self, obs: Observable) -> &[Option<f64>] {
        match obs {
            Observable::AbsScore => &self.abs_score,
            Observable::ExcessVolatility => &self.excess_volatility,
            Observable::Trend => &self.trend,
            Observable::BinarizedTrend => &self.binarized_trend,
            Observable::Sparsity => &self.sparsity,
        }
    }

    /// Track index of a calendar minute, if present.
    pub fn index_of(&self, minute: GlobalMinute) -> Option<usize> {
        let day = day_of(minute);
        let pos = self.days.binary_search(&day).ok()?;
        Some(pos * SESSION_MINUTES as usize + slot_of(minute) as usize)
    }
}

/// Builds the observable series of one stock.
///
/// The EMAs reset to zero at each session open and are reported MISSING for
/// the first [`EMA_BURN_IN`] minutes of the session. Minutes flagged as
/// jumps are excluded from the excess-volatility and trend updates (the
/// previous value carries forward); the binarized trend updates on every
/// minute since only the sign of J enters. Minutes with MISSING J leave all
/// three EMAs untouched and MISSING in the output.
pub fn build_observables(
    scores: &JumpScoreSeries,
    jumps: &[JumpEvent],
    cleaned: &[CleanSession],
    kappa: f64,
    sparsity_window: usize,
) -> ObservableSeries {
    let n = scores.len();
    let jump_minutes: HashSet<GlobalMinute> = jumps.iter().map(|e| e.minute).collect();
    let mut abs_score = vec![None; n];
    let mut excess_volatility = vec![None; n];
    let mut trend = vec![None; n];
    let mut binarized = vec![None; n];

    let mut sigma_ema = 0.0f64;
    let mut trend_ema = 0.0f64;
    let mut bin_ema = 0.0f64;
    for i in 0..n {
        let slot = scores.slot(i);
        if slot == 0 {
            sigma_ema = 0.0;
            trend_ema = 0.0;
            bin_ema = 0.0;
        }
        let j = scores.j[i];
        if let Some(j) = j {
            abs_score[i] = Some(j.abs());
            let is_jump = jump_minutes.contains(&scores.minute(i));
            if !is_jump {
                sigma_ema = kappa * j.abs() + (1.0 - kappa) * sigma_ema;
                trend_ema = kappa * j + (1.0 - kappa) * trend_ema;
            }
            // sign contribution is 0 for J = 0.
            bin_ema = kappa * j.signum() * f64::from(j != 0.0) + (1.0 - kappa) * bin_ema;
            if slot >= EMA_BURN_IN {
                excess_volatility[i] = Some(sigma_ema);
                trend[i] = Some(trend_ema);
                binarized[i] = Some(bin_ema);
            }
        }
    }

    let sparsity = sparsity_scores(scores, cleaned, sparsity_window);
    ObservableSeries {
        days: scores.days.clone(),
        abs_score,
        excess_volatility,
        trend,
        binarized_trend: binarized,
        sparsity,
    }
}

/// One aligned window: `values[k]` sits at offset `k - width/2` relative to
/// the cluster's first jump (offset 0 = the first jump's minute).
#[derive(Debug, Clone)]
pub struct ProfileWindow {
    pub cluster_id: usize,
    pub values: Vec<Option<f64>>,
}

impl ProfileWindow {
    pub fn width(&self) -> usize {
        self.values.len()
    }

    pub fn offset_of(&self, k: usize) -> i64 {
        k as i64 - (self.width() / 2) as i64
    }
}

/// Extracts the aligned window of one observable around a cluster start.
///
/// Offsets map to `t_first - width/2 .. t_first + width/2`; offsets that
/// leave the session are MISSING, as are burn-in and otherwise-missing
/// minutes. The trend observables contribute absolute values.
pub fn extract_window(
    series: &ObservableSeries,
    obs: Observable,
    cluster_id: usize,
    t_first: GlobalMinute,
    width: usize,
) -> ProfileWindow {
    let half = (width / 2) as i64;
    let day = day_of(t_first);
    let base_slot = slot_of(t_first) as i64;
    let values = (0..width as i64)
        .map(|k| {
            let offset = k - half;
            let slot = base_slot + offset;
            if !(0..SESSION_MINUTES as i64).contains(&slot) {
                return None; // window crosses the session boundary
            }
            let minute = crate::timebase::global_minute(day, slot as u16);
            let idx = series.index_of(minute)?;
            let v = series.get(obs)[idx]?;
            Some(match obs {
                Observable::Trend | Observable::BinarizedTrend => v.abs(),
                _ => v,
            })
        })
        .collect();
    ProfileWindow { cluster_id, values }
}
