//! Delimited-text external formats.
//!
//! All files are comma-separated with a `#`-prefixed metadata preamble and a
//! header row; an empty field means MISSING. Prices are written as fixed
//! decimals derived from the integer tick representation, so a write/read
//! round trip is bit-identical on prices and timestamps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{LobSnapshot, NewsEvent, Panel, Session, StockPanel, Ticks};
use crate::error::{Error, Result};
use crate::timebase::{slot_from_minute_of_day, Calendar, SESSION_MINUTES};

pub const PANEL_HEADER: &str = "stock,ts,bid1,bidv1,bid2,bidv2,ask1,askv1,ask2,askv2";
pub const NEWS_HEADER: &str = "ts,tickers,title_match";

/// Number of decimal places for a power-of-ten tick size, if it is one.
fn tick_decimals(tick: f64) -> Option<u32> {
    for d in 0..=6u32 {
        if (tick * 10f64.powi(d as i32) - 1.0).abs() < 1e-9 {
            return Some(d);
        }
    }
    None
}

/// Formats a tick count as a fixed decimal price.
pub fn format_price(ticks: Ticks, tick_size: f64) -> String {
    match tick_decimals(tick_size) {
        Some(0) => format!("{ticks}"),
        Some(d) => {
            let scale = 10i64.pow(d);
            let sign = if ticks < 0 { "-" } else { "" };
            let a = ticks.abs();
            format!("{sign}{}.{:0width$}", a / scale, a % scale, width = d as usize)
        }
        None => format!("{}", ticks as f64 * tick_size),
    }
}

/// Formats a half-tick mid-price (one extra decimal of precision).
pub fn format_mid(half_ticks: i64, tick_size: f64) -> String {
    format_price(half_ticks * 5, tick_size / 10.0)
}

/// Parses a fixed-decimal price into ticks, exactly.
pub fn parse_price(s: &str, tick_size: f64) -> Result<Ticks> {
    let d = tick_decimals(tick_size)
        .ok_or_else(|| Error::Data(format!("tick size {tick_size} is not a power of ten")))?;
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if frac_part.len() > d as usize {
        return Err(Error::InputFormat(format!(
            "price {s:?} has more decimals than the tick size allows"
        )));
    }
    let int: i64 = int_part
        .parse()
        .map_err(|_| Error::InputFormat(format!("bad price {s:?}")))?;
    let mut frac: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part
            .parse()
            .map_err(|_| Error::InputFormat(format!("bad price {s:?}")))?
    };
    frac *= 10i64.pow(d - frac_part.len() as u32);
    Ok(sign * (int * 10i64.pow(d) + frac))
}

fn parse_opt_price(s: &str, tick: f64) -> Result<Option<Ticks>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_price(s, tick).map(Some)
    }
}

fn parse_opt_vol(s: &str) -> Result<Option<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(None);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| Error::InputFormat(format!("bad volume {s:?}")))?;
    if v < 0.0 {
        return Err(Error::Data(format!("negative volume {v}")));
    }
    Ok(Some(v))
}

fn fmt_opt_vol(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Writes key/value metadata, a header line, then rows.
pub struct TableWriter {
    out: BufWriter<File>,
}

impl TableWriter {
    pub fn create(path: &Path, meta: &[(&str, String)], header: &str) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        for (k, v) in meta {
            writeln!(out, "# {k} = {v}")?;
        }
        writeln!(out, "{header}")?;
        Ok(Self { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn raw_line(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// A parsed delimited table: preamble metadata plus rows of string fields.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub meta: BTreeMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        let mut t = Table::default();
        for line in BufReader::new(file).lines() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    t.meta.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if t.header.is_empty() {
                t.header = trimmed.split(',').map(|s| s.trim().to_string()).collect();
            } else {
                t.rows.push(line.split(',').map(|s| s.to_string()).collect());
            }
        }
        Ok(t)
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InputFormat(format!("missing column {name:?}")))
    }
}

/// Reads a LOB panel file. Rows outside the regular session are dropped;
/// duplicate or backwards timestamps within a stock are format errors.
pub fn read_panel(path: &Path) -> Result<Panel> {
    let table = Table::read(path)?;
    if table.header.join(",") != PANEL_HEADER {
        return Err(Error::InputFormat(format!(
            "unexpected panel header {:?}",
            table.header.join(",")
        )));
    }
    let tick_size: f64 = table
        .meta
        .get("tick_size")
        .map(|s| s.parse().map_err(|_| Error::InputFormat("bad tick_size".into())))
        .transpose()?
        .unwrap_or(0.01);

    // First pass: dates per stock, monotonicity check.
    let mut dates = Vec::new();
    let mut last_ts: BTreeMap<String, (chrono::NaiveDate, u32)> = BTreeMap::new();
    for row in &table.rows {
        if row.len() != 10 {
            return Err(Error::InputFormat(format!("expected 10 fields, got {}", row.len())));
        }
        let stock = row[0].trim();
        let (date, mod_) = Calendar::parse_timestamp(&row[1])?;
        if let Some(prev) = last_ts.get_mut(stock) {
            if (date, mod_) == *prev {
                return Err(Error::InputFormat(format!(
                    "duplicate timestamp {} for {stock}",
                    row[1]
                )));
            }
            if (date, mod_) < *prev {
                return Err(Error::InputFormat(format!(
                    "unsorted timestamp {} for {stock}",
                    row[1]
                )));
            }
            *prev = (date, mod_);
        } else {
            last_ts.insert(stock.to_string(), (date, mod_));
        }
        dates.push(date);
    }
    let calendar = Calendar::from_dates(dates);

    let mut stocks: BTreeMap<String, BTreeMap<usize, Session>> = BTreeMap::new();
    for row in &table.rows {
        let stock = row[0].trim().to_string();
        let (date, mod_) = Calendar::parse_timestamp(&row[1])?;
        let Some(slot) = slot_from_minute_of_day(mod_) else {
            continue; // outside the regular session
        };
        let day = calendar.day_index(date).expect("date from first pass");
        let snap = LobSnapshot {
            bid1: parse_opt_price(&row[2], tick_size)?,
            bid_vol1: parse_opt_vol(&row[3])?,
            bid2: parse_opt_price(&row[4], tick_size)?,
            bid_vol2: parse_opt_vol(&row[5])?,
            ask1: parse_opt_price(&row[6], tick_size)?,
            ask_vol1: parse_opt_vol(&row[7])?,
            ask2: parse_opt_price(&row[8], tick_size)?,
            ask_vol2: parse_opt_vol(&row[9])?,
        };
        let sessions = stocks.entry(stock).or_default();
        sessions
            .entry(day)
            .or_insert_with(|| Session::empty(day))
            .snapshots[slot as usize] = snap;
    }

    Ok(Panel {
        calendar,
        tick_size,
        stocks: stocks
            .into_iter()
            .map(|(ticker, sessions)| StockPanel {
                ticker,
                sessions: sessions.into_values().collect(),
            })
            .collect(),
    })
}

/// Writes a panel in the external format. Minutes whose snapshot is entirely
/// empty are still written (all value fields empty) so the minute grid stays
/// explicit.
pub fn write_panel(panel: &Panel, path: &Path) -> Result<()> {
    let mut w = TableWriter::create(
        path,
        &[("tick_size", format!("{}", panel.tick_size))],
        PANEL_HEADER,
    )?;
    let mut line = String::new();
    for stock in &panel.stocks {
        for session in &stock.sessions {
            for slot in 0..SESSION_MINUTES {
                let s = &session.snapshots[slot as usize];
                let ts = panel
                    .calendar
                    .format_minute(crate::timebase::global_minute(session.day, slot));
                line.clear();
                let p = |v: Option<Ticks>| {
                    v.map(|t| format_price(t, panel.tick_size)).unwrap_or_default()
                };
                let _ = write!(
                    line,
                    "{},{},{},{},{},{},{},{},{},{}",
                    stock.ticker,
                    ts,
                    p(s.bid1),
                    fmt_opt_vol(s.bid_vol1),
                    p(s.bid2),
                    fmt_opt_vol(s.bid_vol2),
                    p(s.ask1),
                    fmt_opt_vol(s.ask_vol1),
                    p(s.ask2),
                    fmt_opt_vol(s.ask_vol2),
                );
                w.raw_line(&line)?;
            }
        }
    }
    w.finish()
}

/// Raw news rows as written by the simulator or an external feed.
#[derive(Debug, Clone)]
pub struct NewsRow {
    pub ts: String,
    pub tickers: Vec<String>,
    pub title_match: bool,
}

pub fn write_news(rows: &[NewsRow], path: &Path) -> Result<()> {
    let mut w = TableWriter::create(path, &[], NEWS_HEADER)?;
    for r in rows {
        w.row(&[
            r.ts.clone(),
            r.tickers.join(";"),
            if r.title_match { "1" } else { "0" }.to_string(),
        ])?;
    }
    w.finish()
}

/// Reads and filters the news file against a panel's universe and calendar.
///
/// Only rows with `title_match = 1` and at least one in-universe ticker are
/// kept; each such row becomes one event per in-universe ticker. Rows outside
/// regular session minutes or on dates absent from the panel calendar are
/// dropped. The result is sorted by (stock, minute) and deduplicated.
pub fn read_news(path: &Path, panel: &Panel) -> Result<Vec<NewsEvent>> {
    let table = Table::read(path)?;
    if table.header.join(",") != NEWS_HEADER {
        return Err(Error::InputFormat(format!(
            "unexpected news header {:?}",
            table.header.join(",")
        )));
    }
    let mut events = Vec::new();
    for row in &table.rows {
        if row.len() != 3 {
            return Err(Error::InputFormat(format!("expected 3 fields, got {}", row.len())));
        }
        if row[2].trim() != "1" {
            continue;
        }
        let (date, mod_) = Calendar::parse_timestamp(&row[0])?;
        let (Some(day), Some(slot)) = (
            panel.calendar.day_index(date),
            slot_from_minute_of_day(mod_),
        ) else {
            continue;
        };
        for ticker in row[1].split(';') {
            if let Some(stock) = panel.stock_index(ticker.trim()) {
                events.push(NewsEvent {
                    stock,
                    minute: crate::timebase::global_minute(day, slot),
                });
            }
        }
    }
    events.sort_by_key(|e| (e.stock, e.minute));
    events.dedup();
    Ok(events)
}
