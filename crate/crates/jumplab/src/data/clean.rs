//! Cleaning rules: forward fill of best quotes, mid-price construction,
//! session admission filters and log-return construction.

use super::{CleanSession, EffectiveL1, ReturnSeries, Session, SessionCalendar, SessionDiagnostics};
use crate::error::{Error, Result};
use crate::timebase::SESSION_MINUTES;

/// Minimum number of minutes with a recorded price movement per session.
pub const MIN_PRICE_CHANGES: usize = 300;
/// Longest tolerated run of consecutive missing mid-prices.
pub const MAX_MISSING_RUN: usize = 25;
/// Longest tolerated run of consecutive minutes without a price movement.
pub const MAX_NO_MOVE_RUN: usize = 25;

/// Builds the mid-price series of one stock-session.
///
/// A missing best bid or best ask is replaced by the last observation of
/// that side within the session (price together with its volume). The mid is
/// MISSING when both raw best quotes are missing at the minute, or when the
/// effective book has an impossible level ordering (crossed best quotes, or
/// a best level at or beyond its own second level).
pub fn build_mid_price(session: &Session) -> CleanSession {
    let n = session.snapshots.len();
    debug_assert_eq!(n, SESSION_MINUTES as usize);
    let mut out = CleanSession {
        day: session.day,
        mid_half_ticks: vec![None; n],
        l1: vec![None; n],
        bid2: vec![None; n],
        ask2: vec![None; n],
        bid_vol2: vec![None; n],
        ask_vol2: vec![None; n],
    };
    let mut last_bid: Option<(i64, Option<f64>)> = None;
    let mut last_ask: Option<(i64, Option<f64>)> = None;
    for (t, snap) in session.snapshots.iter().enumerate() {
        out.bid2[t] = snap.bid2;
        out.ask2[t] = snap.ask2;
        out.bid_vol2[t] = snap.bid_vol2;
        out.ask_vol2[t] = snap.ask_vol2;

        if let Some(p) = snap.bid1 {
            last_bid = Some((p, snap.bid_vol1));
        }
        if let Some(p) = snap.ask1 {
            last_ask = Some((p, snap.ask_vol1));
        }
        if snap.bid1.is_none() && snap.ask1.is_none() {
            // Both best quotes missing: the mid is missing by definition,
            // no forward fill is attempted for this minute.
            continue;
        }
        let (Some((bid, bv)), Some((ask, av))) = (last_bid, last_ask) else {
            continue;
        };
        let crossed = bid >= ask;
        let bad_bid2 = snap.bid2.is_some_and(|b2| bid <= b2);
        let bad_ask2 = snap.ask2.is_some_and(|a2| ask >= a2);
        if crossed || bad_bid2 || bad_ask2 {
            continue;
        }
        out.l1[t] = Some(EffectiveL1 { bid, ask, bid_vol: bv, ask_vol: av });
        out.mid_half_ticks[t] = Some(bid + ask);
    }
    out
}

fn longest_run<F: Fn(usize) -> bool>(n: usize, pred: F) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for t in 0..n {
        if pred(t) {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// Computes admission diagnostics for a set of cleaned sessions of one stock.
///
/// A session is kept iff it has at least 300 minutes with a recorded price
/// movement, no run of more than 25 consecutive missing mids, and no run of
/// more than 25 consecutive minutes without a price movement. A minute
/// records a movement when its mid is present and differs from the last
/// present mid of the same session.
pub fn filter_sessions(sessions: &[CleanSession]) -> SessionCalendar {
    let mut cal = SessionCalendar::default();
    for s in sessions {
        let n = s.mid_half_ticks.len();
        // moved[t]: the mid at t is present and differs from the previous
        // present mid within the session.
        let mut moved = vec![false; n];
        let mut last: Option<i64> = None;
        for t in 0..n {
            if let Some(m) = s.mid_half_ticks[t] {
                if let Some(prev) = last {
                    moved[t] = m != prev;
                }
                last = Some(m);
            }
        }
        let price_changes = moved.iter().filter(|&&m| m).count();
        let max_missing_run = longest_run(n, |t| s.mid_half_ticks[t].is_none());
        let max_no_move_run = longest_run(n, |t| !moved[t]);
        let admitted = price_changes >= MIN_PRICE_CHANGES
            && max_missing_run <= MAX_MISSING_RUN
            && max_no_move_run <= MAX_NO_MOVE_RUN;
        cal.sessions.push(SessionDiagnostics {
            day: s.day,
            price_changes,
            max_missing_run,
            max_no_move_run,
            admitted,
        });
    }
    cal
}

/// Log-returns of one cleaned session.
///
/// `r_t = log(m_t / m_{t-1})` where both mids are present and adjacent. The
/// return bridging a missing run is rescaled by `1/sqrt(g)` with `g` the
/// minute span between the two present mids, so the squared bridging return
/// equals the squared unscaled return divided by the gap length. The first
/// minute of a session never has a return.
pub fn compute_returns(mids: &CleanSession) -> Result<ReturnSeries> {
    let n = mids.mid_half_ticks.len();
    let mut returns = vec![None; n];
    let mut gap_scaled = vec![false; n];
    let mut last: Option<(usize, i64)> = None;
    for t in 0..n {
        let Some(m) = mids.mid_half_ticks[t] else {
            continue;
        };
        if m <= 0 {
            return Err(Error::Data(format!(
                "non-positive mid-price at day {} slot {t}",
                mids.day
            )));
        }
        if let Some((t_prev, m_prev)) = last {
            let span = t - t_prev;
            let raw = (m as f64 / m_prev as f64).ln();
            if span == 1 {
                returns[t] = Some(raw);
            } else {
                returns[t] = Some(raw / (span as f64).sqrt());
                gap_scaled[t] = true;
            }
        }
        last = Some((t, m));
    }
    Ok(ReturnSeries { day: mids.day, returns, gap_scaled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{LobSnapshot, Session};

    fn snap(bid1: Option<i64>, ask1: Option<i64>) -> LobSnapshot {
        LobSnapshot { bid1, ask1, bid_vol1: Some(10.0), ask_vol1: Some(10.0), ..Default::default() }
    }

    fn session_with(snaps: Vec<(usize, LobSnapshot)>) -> Session {
        let mut s = Session::empty(0);
        for (t, sn) in snaps {
            s.snapshots[t] = sn;
        }
        s
    }

    #[test]
    fn mid_is_arithmetic_mean() {
        // bid 10.00, ask 10.02 with a 0.01 tick -> mid 10.01 (2002 half-ticks).
        let s = session_with(vec![(0, snap(Some(1000), Some(1002)))]);
        let clean = build_mid_price(&s);
        assert_eq!(clean.mid_half_ticks[0], Some(2002));
    }

    #[test]
    fn both_best_missing_gives_missing_mid() {
        let s = session_with(vec![
            (0, snap(Some(1000), Some(1002))),
            // minute 1 entirely empty: both best quotes missing.
        ]);
        let clean = build_mid_price(&s);
        assert_eq!(clean.mid_half_ticks[1], None);
        assert_eq!(clean.l1[1], None);
    }

    #[test]
    fn forward_fill_single_side() {
        let mut s = session_with(vec![(0, snap(Some(1000), Some(1002)))]);
        s.snapshots[1] = snap(Some(1001), None); // ask missing, filled from 1002
        let clean = build_mid_price(&s);
        assert_eq!(clean.mid_half_ticks[1], Some(2003));
        assert_eq!(clean.l1[1].unwrap().ask, 1002);
    }

    #[test]
    fn crossed_fill_marks_mid_missing() {
        let mut s = session_with(vec![(0, snap(Some(998), Some(999)))]);
        // Bid moves to 10.00 while the stale ask stays at 9.99: impossible.
        s.snapshots[1] = snap(Some(1000), None);
        let clean = build_mid_price(&s);
        assert_eq!(clean.mid_half_ticks[1], None);
        assert_eq!(clean.l1[1], None);
        // The stale ask does not poison later minutes once quotes reappear.
        s.snapshots[2] = snap(Some(1000), Some(1004));
        let clean = build_mid_price(&s);
        assert_eq!(clean.mid_half_ticks[2], Some(2004));
    }

    #[test]
    fn filled_best_conflicting_with_second_level_is_missing() {
        let mut s = session_with(vec![(0, snap(Some(1000), Some(1002)))]);
        let mut sn = snap(None, Some(1002));
        sn.bid2 = Some(1001); // second bid above the stale filled best bid
        s.snapshots[1] = sn;
        let clean = build_mid_price(&s);
        assert_eq!(clean.mid_half_ticks[1], None);
    }

    #[test]
    fn returns_worked_example_with_gap_scaling() {
        // Mids p0, p1, -, -, p4, p5.
        let mut s = Session::empty(0);
        let prices = [Some((1000, 1002)), Some((1004, 1006)), None, None, Some((1010, 1012)), Some((1008, 1010))];
        for (t, p) in prices.iter().enumerate() {
            if let Some((b, a)) = p {
                s.snapshots[t] = snap(Some(*b), Some(*a));
            }
        }
        let clean = build_mid_price(&s);
        let r = compute_returns(&clean).unwrap();
        let m = |t: usize| clean.mid_half_ticks[t].unwrap() as f64;
        assert!((r.returns[1].unwrap() - (m(1) / m(0)).ln()).abs() < 1e-15);
        assert_eq!(r.returns[2], None);
        assert_eq!(r.returns[3], None);
        let bridge = (m(4) / m(1)).ln() / 3f64.sqrt();
        assert!((r.returns[4].unwrap() - bridge).abs() < 1e-15);
        assert!(r.gap_scaled[4]);
        assert!(!r.gap_scaled[5]);
        assert!((r.returns[5].unwrap() - (m(5) / m(4)).ln()).abs() < 1e-15);
        assert_eq!(r.returns[0], None, "no overnight return");
        // Gap-scaling invariant: squared bridging return equals the squared
        // unscaled return divided by the gap length.
        let unscaled = (m(4) / m(1)).ln();
        assert!((r.returns[4].unwrap().powi(2) - unscaled * unscaled / 3.0).abs() < 1e-18);
    }

    #[test]
    fn constant_mids_give_zero_returns() {
        let mut s = Session::empty(0);
        for t in 0..390 {
            s.snapshots[t] = snap(Some(1000), Some(1002));
        }
        let r = compute_returns(&build_mid_price(&s)).unwrap();
        assert!(r.returns[1..].iter().all(|v| *v == Some(0.0)));
    }

    #[test]
    fn simple_return_value() {
        // p0 = 100, p1 = 101 -> r = ln(1.01).
        let mut s = Session::empty(0);
        s.snapshots[0] = snap(Some(9999), Some(10001));
        s.snapshots[1] = snap(Some(10099), Some(10101));
        let r = compute_returns(&build_mid_price(&s)).unwrap();
        assert!((r.returns[1].unwrap() - 1.01f64.ln()).abs() < 1e-12);
        assert!((r.returns[1].unwrap() - 0.00995).abs() < 1e-5);
    }

    #[test]
    fn non_positive_mid_is_a_data_error() {
        let mut s = Session::empty(0);
        s.snapshots[0] = snap(Some(-3), Some(2));
        assert!(compute_returns(&build_mid_price(&s)).is_err());
    }

    /// Builds a fully populated session whose mid alternates every minute.
    fn busy_session() -> Session {
        let mut s = Session::empty(0);
        for t in 0..390 {
            let b = if t % 2 == 0 { 1000 } else { 1001 };
            s.snapshots[t] = snap(Some(b), Some(b + 2));
        }
        s
    }

    #[test]
    fn session_filters_match_examples() {
        // Fully populated alternating session: 389 movements -> kept.
        let cal = filter_sessions(&[build_mid_price(&busy_session())]);
        assert!(cal.sessions[0].admitted);
        assert_eq!(cal.sessions[0].price_changes, 389);

        // Exactly 299 movements, short no-move runs, nothing missing:
        // rejected purely by the 300-changes rule. Freeze the mid on 90
        // scattered minutes (t = 4, 8, ..., 360) and flip it everywhere else.
        let mut s = Session::empty(0);
        let mut b = 1000;
        for t in 0..390 {
            let freeze = t > 0 && t % 4 == 0 && t <= 360;
            if t > 0 && !freeze {
                b = if b == 1000 { 1001 } else { 1000 };
            }
            s.snapshots[t] = snap(Some(b), Some(b + 2));
        }
        let cal = filter_sessions(&[build_mid_price(&s)]);
        assert_eq!(cal.sessions[0].price_changes, 299);
        assert!(cal.sessions[0].max_no_move_run <= 25);
        assert_eq!(cal.sessions[0].max_missing_run, 0);
        assert!(!cal.sessions[0].admitted);

        // 26 consecutive missing mids -> rejected.
        let mut s = busy_session();
        for t in 100..126 {
            s.snapshots[t] = LobSnapshot::default();
        }
        let cal = filter_sessions(&[build_mid_price(&s)]);
        assert_eq!(cal.sessions[0].max_missing_run, 26);
        assert!(!cal.sessions[0].admitted);

        // 25 consecutive missing mids -> still fine on that criterion. The
        // bridge minute must move, otherwise the no-move run reaches 26.
        let mut s = busy_session();
        for t in 100..125 {
            s.snapshots[t] = LobSnapshot::default();
        }
        s.snapshots[125] = snap(Some(1004), Some(1006));
        let cal = filter_sessions(&[build_mid_price(&s)]);
        assert_eq!(cal.sessions[0].max_missing_run, 25);
        assert_eq!(cal.sessions[0].max_no_move_run, 25);
        assert!(cal.sessions[0].admitted);

        // 26 minutes without a movement -> rejected.
        let mut s = busy_session();
        for t in 100..126 {
            s.snapshots[t] = snap(Some(1000), Some(1002));
        }
        let cal = filter_sessions(&[build_mid_price(&s)]);
        assert!(cal.sessions[0].max_no_move_run >= 26);
        assert!(!cal.sessions[0].admitted);
    }

    #[test]
    fn empty_session_excluded_without_error() {
        let cal = filter_sessions(&[build_mid_price(&Session::empty(3))]);
        assert!(!cal.sessions[0].admitted);
        assert_eq!(cal.sessions[0].price_changes, 0);
        assert_eq!(cal.sessions[0].max_missing_run, 390);
    }

    #[test]
    fn filters_are_monotone_under_data_removal() {
        // Removing data from a session never helps it pass a filter it
        // previously failed: check on a family of randomized deletions.
        use rand::Rng;
        let mut rng = crate::stats::seeded_rng(11);
        let base = busy_session();
        let base_diag = filter_sessions(&[build_mid_price(&base)]).sessions[0];
        for _ in 0..25 {
            let mut s = base.clone();
            for _ in 0..rng.gen_range(1..60) {
                let t = rng.gen_range(0..390);
                s.snapshots[t] = LobSnapshot::default();
            }
            let d = filter_sessions(&[build_mid_price(&s)]).sessions[0];
            assert!(d.price_changes <= base_diag.price_changes);
            assert!(d.max_missing_run >= base_diag.max_missing_run);
        }
    }
}
