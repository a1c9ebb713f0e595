//! Market-data model: LOB snapshots, mid-price and return series, session
//! admission filters and news items.
//!
//! Prices are stored as integer multiples of the tick size so level-crossing
//! tests are exact; mid-prices use *half*-tick units so `(bid + ask) / 2`
//! never rounds. A value of `None` is the explicit MISSING marker used
//! throughout the pipeline.

mod clean;
pub mod io;

pub use clean::{build_mid_price, compute_returns, filter_sessions};

use crate::timebase::{Calendar, SESSION_MINUTES};

/// Price expressed in integer ticks.
pub type Ticks = i64;

/// One minute-sampled order-book snapshot (two levels per side).
/// Any field may be missing independently.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LobSnapshot {
    pub bid1: Option<Ticks>,
    pub bid2: Option<Ticks>,
    pub ask1: Option<Ticks>,
    pub ask2: Option<Ticks>,
    pub bid_vol1: Option<f64>,
    pub bid_vol2: Option<f64>,
    pub ask_vol1: Option<f64>,
    pub ask_vol2: Option<f64>,
}

impl LobSnapshot {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

/// One stock-session of raw snapshots, slot-indexed (always 390 entries).
#[derive(Debug, Clone)]
pub struct Session {
    pub day: usize,
    pub snapshots: Vec<LobSnapshot>,
}

impl Session {
    pub fn empty(day: usize) -> Self {
        Self { day, snapshots: vec![LobSnapshot::default(); SESSION_MINUTES as usize] }
    }
}

/// All sessions of one stock, sorted by day.
#[derive(Debug, Clone)]
pub struct StockPanel {
    pub ticker: String,
    pub sessions: Vec<Session>,
}

/// A full minute-sampled panel: the union calendar, the stock universe and
/// per-stock raw sessions.
#[derive(Debug, Clone)]
pub struct Panel {
    pub calendar: Calendar,
    /// Tick size in currency units (0.01 unless stated otherwise).
    pub tick_size: f64,
    pub stocks: Vec<StockPanel>,
}

impl Panel {
    pub fn stock_index(&self, ticker: &str) -> Option<usize> {
        self.stocks.iter().position(|s| s.ticker == ticker)
    }
}

/// Effective (forward-filled) best quotes at one minute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveL1 {
    pub bid: Ticks,
    pub ask: Ticks,
    pub bid_vol: Option<f64>,
    pub ask_vol: Option<f64>,
}

/// The cleaned view of one stock-session produced by [`build_mid_price`].
#[derive(Debug, Clone)]
pub struct CleanSession {
    pub day: usize,
    /// Mid-price in half-ticks (`bid + ask` in ticks); `None` = MISSING.
    pub mid_half_ticks: Vec<Option<i64>>,
    /// Effective best quotes; `None` when both raw best quotes were missing
    /// or the (possibly filled) book had an impossible level ordering.
    pub l1: Vec<Option<EffectiveL1>>,
    /// Raw (never forward-filled) second levels, for the sparsity observable.
    pub bid2: Vec<Option<Ticks>>,
    pub ask2: Vec<Option<Ticks>>,
    pub bid_vol2: Vec<Option<f64>>,
    pub ask_vol2: Vec<Option<f64>>,
}

/// Per-stock log-return series for one session.
#[derive(Debug, Clone)]
pub struct ReturnSeries {
    pub day: usize,
    /// `r_t = log(m_t / m_prev)`; `None` = MISSING. The first minute of a
    /// session is always MISSING (overnight returns are never formed).
    pub returns: Vec<Option<f64>>,
    /// Marks returns rescaled by `1/sqrt(gap)` after a missing run.
    pub gap_scaled: Vec<bool>,
}

/// Admission diagnostics for one session.
#[derive(Debug, Clone, Copy)]
pub struct SessionDiagnostics {
    pub day: usize,
    /// Minutes with a recorded mid-price movement.
    pub price_changes: usize,
    pub max_missing_run: usize,
    pub max_no_move_run: usize,
    pub admitted: bool,
}

/// Session admission report for one stock.
#[derive(Debug, Clone, Default)]
pub struct SessionCalendar {
    pub sessions: Vec<SessionDiagnostics>,
}

impl SessionCalendar {
    pub fn is_admitted(&self, day: usize) -> bool {
        self.sessions.iter().any(|s| s.day == day && s.admitted)
    }

    pub fn admitted_days(&self) -> Vec<usize> {
        self.sessions.iter().filter(|s| s.admitted).map(|s| s.day).collect()
    }
}

/// A stock-specific news event mapped onto the session timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NewsEvent {
    pub stock: usize,
    pub minute: crate::timebase::GlobalMinute,
}
