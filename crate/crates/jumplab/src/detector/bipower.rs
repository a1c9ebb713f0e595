//! Rolling bipower variation, robust to jumps and missing values.

use std::f64::consts::PI;

/// Local volatility from products of adjacent absolute returns.
///
/// `sigma_t^2 = pi / (2K) * sum of the K most recent valid products
/// |r_a| |r_b|` over adjacent prior pairs `(a, b) = (j-1, j)` with `j <= t-1`.
/// A pair is valid when both returns are present; since the first minute of
/// every session carries no return, pairs never straddle a session boundary.
/// Invalid pairs are skipped and the window extends further back, up to a
/// lookback of `2K` pair positions; if fewer than `K` valid pairs fit inside
/// the lookback the estimate is MISSING.
///
/// Only strictly prior returns enter the window, so the estimator is causal
/// and `r_t` never feeds its own standardization.
pub fn bipower_volatility(returns: &[Option<f64>], window: usize) -> Vec<Option<f64>> {
    let n = returns.len();
    let k = window;
    let mut sigma = vec![None; n];
    if n == 0 {
        return sigma;
    }
    // valid_pos[m] = pair index j of the m-th valid pair (r[j-1], r[j]);
    // prefix[m+1] = sum of the first m+1 valid products.
    let mut valid_pos: Vec<usize> = Vec::with_capacity(n);
    let mut prefix: Vec<f64> = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    // count_before[j] = number of valid pairs with index <= j.
    let mut count_upto = vec![0usize; n];
    for j in 1..n {
        count_upto[j] = count_upto[j - 1];
        if let (Some(a), Some(b)) = (returns[j - 1], returns[j]) {
            valid_pos.push(j);
            prefix.push(prefix.last().unwrap() + a.abs() * b.abs());
            count_upto[j] += 1;
        }
    }
    let scale = PI / (2.0 * k as f64);
    for t in 0..n {
        if t == 0 {
            continue;
        }
        let c = count_upto[t - 1];
        if c < k {
            continue;
        }
        // Position of the K-th most recent valid pair.
        let first_needed = c - k; // zero-based index into valid_pos
        let j_far = valid_pos[first_needed];
        // Lookback cap: the scanned pair positions are j_far ..= t-1.
        if t - j_far > 2 * k {
            continue;
        }
        let sum = prefix[c] - prefix[first_needed];
        sigma[t] = Some((scale * sum).sqrt());
    }
    sigma
}
