//! Session-time arithmetic.
//!
//! All analysis runs on regular-session minutes only (09:30-16:00, i.e. 390
//! one-minute bars per session). Internally a minute is addressed either as a
//! `(day index, slot)` pair or as a single [`GlobalMinute`] that concatenates
//! admitted sessions back to back; the two views convert losslessly.

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};

use crate::error::{Error, Result};

/// Number of one-minute bars in a regular trading session.
pub const SESSION_MINUTES: u16 = 390;

/// Minute of day at which the regular session opens (09:30).
pub const SESSION_OPEN_MINUTE: u32 = 9 * 60 + 30;

/// Minute index on the concatenated per-day timeline: `day * 390 + slot`.
pub type GlobalMinute = i64;

/// Intra-session slot, `0..390`.
pub type Slot = u16;

#[inline]
pub fn global_minute(day: usize, slot: Slot) -> GlobalMinute {
    day as i64 * SESSION_MINUTES as i64 + slot as i64
}

#[inline]
pub fn day_of(minute: GlobalMinute) -> usize {
    (minute / SESSION_MINUTES as i64) as usize
}

#[inline]
pub fn slot_of(minute: GlobalMinute) -> Slot {
    (minute % SESSION_MINUTES as i64) as u16
}

/// True when both minutes fall in the same trading session.
#[inline]
pub fn same_day(a: GlobalMinute, b: GlobalMinute) -> bool {
    day_of(a) == day_of(b)
}

/// Maps calendar dates to dense day indices shared by every stock in a run.
///
/// The market-wide filter compares cluster spans across stocks, so day
/// indices must agree panel-wide; they are assigned from the sorted union of
/// session dates observed in the input.
#[derive(Debug, Clone, Default)]
pub struct Calendar {
    dates: Vec<NaiveDate>,
}

impl Calendar {
    /// Builds a calendar from the set of dates present in a panel.
    /// Duplicates are collapsed; order is chronological.
    pub fn from_dates(mut dates: Vec<NaiveDate>) -> Self {
        dates.sort_unstable();
        dates.dedup();
        Self { dates }
    }

    /// Sequential weekday calendar for synthetic panels.
    pub fn synthetic(start: NaiveDate, n_days: usize) -> Self {
        let mut dates = Vec::with_capacity(n_days);
        let mut d = start;
        while dates.len() < n_days {
            let wd = d.weekday().num_days_from_monday();
            if wd < 5 {
                dates.push(d);
            }
            d += Duration::days(1);
        }
        Self { dates }
    }

    pub fn n_days(&self) -> usize {
        self.dates.len()
    }

    pub fn date(&self, day: usize) -> NaiveDate {
        self.dates[day]
    }

    pub fn day_index(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    /// Year*100+month key used for per-month rate calibration.
    pub fn month_key(&self, day: usize) -> u32 {
        let d = self.dates[day];
        d.year() as u32 * 100 + d.month()
    }

    /// Formats a global minute as `YYYY-MM-DD HH:MM`.
    pub fn format_minute(&self, minute: GlobalMinute) -> String {
        let date = self.date(day_of(minute));
        let mod_ = SESSION_OPEN_MINUTE + slot_of(minute) as u32;
        format!("{} {:02}:{:02}", date.format("%Y-%m-%d"), mod_ / 60, mod_ % 60)
    }

    /// Parses `YYYY-MM-DD HH:MM`; returns the date and the minute of day.
    pub fn parse_timestamp(ts: &str) -> Result<(NaiveDate, u32)> {
        let dt = NaiveDateTime::parse_from_str(ts.trim(), "%Y-%m-%d %H:%M")
            .map_err(|e| Error::InputFormat(format!("bad timestamp {ts:?}: {e}")))?;
        Ok((dt.date(), dt.hour() * 60 + dt.minute()))
    }
}

/// Converts a minute of day to a session slot, if inside the regular session.
pub fn slot_from_minute_of_day(mod_: u32) -> Option<Slot> {
    let rel = mod_.checked_sub(SESSION_OPEN_MINUTE)?;
    (rel < SESSION_MINUTES as u32).then_some(rel as u16)
}
