//! Shared statistical utilities.
//!
//! Everything here is deterministic given its inputs; randomized procedures
//! take an explicit seed and use a counter-based ChaCha stream so results do
//! not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

/// Seeded RNG used throughout the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a stable sub-seed for a named stage / replicate index.
pub fn sub_seed(base: u64, tag: &str, k: u64) -> u64 {
    // FNV-1a over the tag, then a splitmix-style avalanche with base and k.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = base ^ h.rotate_left(17) ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[inline]
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Sample mean; NaN on empty input.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; NaN for fewer than two points.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Type-7 (linear interpolation) quantile of an unsorted sample.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    quantile_sorted(&v, q)
}

/// Type-7 quantile of an already sorted sample.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Median of an unsorted sample.
pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Welch's unequal-variance t-test result.
#[derive(Debug, Clone, Copy)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

/// Welch's t-test for equal means under unequal variances.
/// Returns `None` when either sample has fewer than two points or both
/// variances vanish.
pub fn welch_test(a: &[f64], b: &[f64]) -> Option<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (variance(a), variance(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se2 = va / na + vb / nb;
    if se2 <= 0.0 {
        return None;
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    let p = 2.0 * dist.cdf(-t.abs());
    Some(WelchTest { t, df, p })
}

/// Benjamini-Hochberg step-up procedure at rate `q`.
/// Entries with NaN p-values are never flagged. Returns one flag per input.
pub fn benjamini_hochberg(pvals: &[f64], q: f64) -> Vec<bool> {
    let mut idx: Vec<usize> = (0..pvals.len()).filter(|&i| pvals[i].is_finite()).collect();
    let m = idx.len();
    idx.sort_by(|&a, &b| pvals[a].partial_cmp(&pvals[b]).unwrap());
    let mut cutoff_rank = 0;
    for (rank, &i) in idx.iter().enumerate() {
        if pvals[i] <= q * (rank + 1) as f64 / m as f64 {
            cutoff_rank = rank + 1;
        }
    }
    let mut flags = vec![false; pvals.len()];
    for &i in idx.iter().take(cutoff_rank) {
        flags[i] = true;
    }
    flags
}

/// Tie-adjusted Kendall rank correlation (tau-b) between chronological order
/// and *descending* amplitude order.
///
/// `amplitudes` are given in time order; +1 means the first value is the
/// largest and values decrease monotonically in time.
pub fn kendall_tau_descending(amplitudes: &[f64]) -> Option<f64> {
    let n = amplitudes.len();
    if n < 2 {
        return None;
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    let mut tied = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            // (i earlier than j); concordant when the earlier value is larger.
            if amplitudes[i] > amplitudes[j] {
                concordant += 1;
            } else if amplitudes[i] < amplitudes[j] {
                discordant += 1;
            } else {
                tied += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    // Time ranks are distinct, so the time-side tie term is zero.
    let denom = ((n0 as f64) * (n0 - tied) as f64).sqrt();
    if denom == 0.0 {
        return None;
    }
    Some((concordant - discordant) as f64 / denom)
}

/// AUC in the Mann-Whitney form: probability that a random positive outscores
/// a random negative, ties counted one half. `None` if a class is absent.
pub fn auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    assert_eq!(scores.len(), labels.len());
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    // Midranks over the pooled sample.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_pos_sum = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks are 1-based; tied block [i, j] shares the midrank.
        let midrank = (i + 1 + j + 1) as f64 / 2.0;
        for &k in &order[i..=j] {
            if labels[k] {
                rank_pos_sum += midrank;
            }
        }
        i = j + 1;
    }
    let u = rank_pos_sum - (n_pos * (n_pos + 1) / 2) as f64;
    Some(u / (n_pos as f64 * n_neg as f64))
}

/// Adjusted Rand Index between two labelings of the same items.
/// Uses the pair-counting form; 0 expected for independent labelings,
/// 1 for identical partitions. `None` on empty input.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n == 0 {
        return None;
    }
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut cont = vec![0i64; ka * kb];
    let mut row = vec![0i64; ka];
    let mut col = vec![0i64; kb];
    for i in 0..n {
        cont[a[i] * kb + b[i]] += 1;
        row[a[i]] += 1;
        col[b[i]] += 1;
    }
    let c2 = |x: i64| x * (x - 1) / 2;
    let same_both: i64 = cont.iter().map(|&x| c2(x)).sum();
    let same_a: i64 = row.iter().map(|&x| c2(x)).sum();
    let same_b: i64 = col.iter().map(|&x| c2(x)).sum();
    let total = c2(n as i64);
    // Pair counts: pa = same in both, pb = same in `a` only,
    // pc = same in `b` only, pd = different in both.
    let pa = same_both;
    let pb = same_a - same_both;
    let pc = same_b - same_both;
    let pd = total - pa - pb - pc;
    let num = 2 * (pa as i128 * pd as i128 - pb as i128 * pc as i128);
    let den = (pa + pb) as i128 * (pb + pd) as i128 + (pa + pc) as i128 * (pc + pd) as i128;
    if den == 0 {
        // Degenerate marginals (all singletons or a single cluster on both
        // sides): identical partitions by convention score 1.
        return Some(if pb == 0 && pc == 0 { 1.0 } else { 0.0 });
    }
    Some(num as f64 / den as f64)
}

/// Shapiro-Wilk normality test (Royston's AS R94 approximation).
#[derive(Debug, Clone, Copy)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p: f64,
}

/// Shapiro-Wilk W and p-value for 3 <= n <= 5000.
/// Errors on out-of-range n and on constant samples (W undefined).
pub fn shapiro_wilk(xs: &[f64]) -> Result<ShapiroWilk> {
    let n = xs.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::Domain(format!(
            "shapiro-wilk requires 3 <= n <= 5000, got {n}"
        )));
    }
    let mut x: Vec<f64> = xs.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if x[n - 1] - x[0] <= 0.0 {
        return Err(Error::Numerical("shapiro-wilk on constant sample".into()));
    }

    // Expected normal order statistics (Blom approximation).
    let nf = n as f64;
    let mut m = vec![0.0f64; n];
    for (i, mi) in m.iter_mut().enumerate() {
        *mi = normal_quantile(((i + 1) as f64 - 0.375) / (nf + 0.25));
    }
    let ssq_m: f64 = m.iter().map(|v| v * v).sum();

    // Tail coefficients adjusted by Royston's polynomials in 1/sqrt(n).
    let rsn = 1.0 / nf.sqrt();
    let poly = |c: &[f64]| -> f64 {
        // c[0] + c[1]*rsn + c[2]*rsn^2 + ...
        c.iter().rev().fold(0.0, |acc, &ci| acc * rsn + ci)
    };
    let mut a = vec![0.0f64; n];
    let c_norm = ssq_m.sqrt();
    let an = if n == 3 {
        std::f64::consts::FRAC_1_SQRT_2
    } else {
        m[n - 1] / c_norm + poly(&[0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056])
    };
    if n == 3 {
        a[0] = -an;
        a[2] = an;
    } else {
        let (i_mid_lo, phi) = if n > 5 {
            let an1 = m[n - 2] / c_norm
                + poly(&[0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633]);
            a[n - 1] = an;
            a[n - 2] = an1;
            a[0] = -an;
            a[1] = -an1;
            let phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2])
                / (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
            (2, phi)
        } else {
            a[n - 1] = an;
            a[0] = -an;
            let phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an * an);
            (1, phi)
        };
        let phi_sqrt = phi.sqrt();
        for i in i_mid_lo..n - i_mid_lo {
            a[i] = m[i] / phi_sqrt;
        }
    }

    let xbar = mean(&x);
    let num: f64 = a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum();
    let den: f64 = x.iter().map(|xi| (xi - xbar) * (xi - xbar)).sum();
    let w = (num * num / den).min(1.0);

    let p = if n == 3 {
        let p = 6.0 / std::f64::consts::PI * ((w.sqrt()).asin() - (0.75f64).sqrt().asin());
        p.clamp(0.0, 1.0)
    } else if n <= 11 {
        let g = -2.273 + 0.459 * nf;
        let mu = 0.5440 - 0.39978 * nf + 0.025054 * nf * nf - 0.0006714 * nf * nf * nf;
        let sigma = (1.3822 - 0.77857 * nf + 0.062767 * nf * nf - 0.0020322 * nf * nf * nf).exp();
        let arg = g - (1.0 - w).ln();
        if arg <= 0.0 {
            0.0
        } else {
            let z = (-(arg.ln()) - mu) / sigma;
            1.0 - normal_cdf(z)
        }
    } else {
        let ln_n = nf.ln();
        let mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n * ln_n + 0.0038915 * ln_n * ln_n * ln_n;
        let sigma = (-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n * ln_n).exp();
        let z = ((1.0 - w).ln() - mu) / sigma;
        1.0 - normal_cdf(z)
    };
    Ok(ShapiroWilk { w, p })
}

/// Kolmogorov-Smirnov test against an exponential law with estimated rate
/// (Stephens' modified statistic for the composite exponential hypothesis).
#[derive(Debug, Clone, Copy)]
pub struct KsExponential {
    /// Plain two-sided KS distance against Exp(1/sample mean).
    pub d: f64,
    /// Stephens' modified statistic `(d - 0.2/n) * (sqrt(n) + 0.26 + 0.5/sqrt(n))`.
    pub t_mod: f64,
}

impl KsExponential {
    /// Upper percentage points of the modified statistic (Stephens 1974).
    const TABLE: [(f64, f64); 5] = [
        (0.15, 0.926),
        (0.10, 0.990),
        (0.05, 1.094),
        (0.025, 1.190),
        (0.01, 1.308),
    ];

    /// True when the exponential hypothesis is rejected at `alpha`.
    /// `alpha` must be one of 0.15, 0.10, 0.05, 0.025, 0.01.
    pub fn reject_at(&self, alpha: f64) -> bool {
        let crit = Self::TABLE
            .iter()
            .find(|(a, _)| (a - alpha).abs() < 1e-12)
            .map(|(_, c)| *c)
            .expect("unsupported KS significance level");
        self.t_mod > crit
    }
}

/// KS exponentiality test on a positive sample; rate fitted by the mean.
pub fn ks_exponential(xs: &[f64]) -> Result<KsExponential> {
    let n = xs.len();
    if n < 5 {
        return Err(Error::Domain("ks test needs at least 5 points".into()));
    }
    let m = mean(xs);
    if !(m > 0.0) {
        return Err(Error::Data("ks exponential needs positive mean".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = 1.0 - (-x / m).exp();
        let hi = (i + 1) as f64 / nf - f;
        let lo = f - i as f64 / nf;
        d = d.max(hi).max(lo);
    }
    let t_mod = (d - 0.2 / nf) * (nf.sqrt() + 0.26 + 0.5 / nf.sqrt());
    Ok(KsExponential { d, t_mod })
}

/// Ordinary least squares line fit; returns (intercept, slope).
pub fn ols_line(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let _ = n;
    Some((my - slope * mx, slope))
}

/// Slope of `log y` against `log x`, skipping non-positive pairs.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for (&xi, &yi) in x.iter().zip(y) {
        if xi > 0.0 && yi > 0.0 {
            lx.push(xi.ln());
            ly.push(yi.ln());
        }
    }
    ols_line(&lx, &ly).map(|(_, b)| b)
}

/// Percentile bootstrap bands of the mean of `values`.
/// Returns (lower, upper) at quantiles `band/2` and `1 - band/2` over
/// `n_boot` resamples drawn with the given seed.
pub fn bootstrap_mean_band(values: &[f64], n_boot: usize, band: f64, seed: u64) -> (f64, f64) {
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    let n = values.len();
    let mut means = Vec::with_capacity(n_boot);
    for _ in 0..n_boot {
        let mut s = 0.0;
        for _ in 0..n {
            s += values[rng.gen_range(0..n)];
        }
        means.push(s / n as f64);
    }
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (
        quantile_sorted(&means, band / 2.0),
        quantile_sorted(&means, 1.0 - band / 2.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn quantile_interpolates() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((quantile(&xs, 0.5) - 2.5).abs() < 1e-12);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
    }

    #[test]
    fn welch_matches_hand_computation() {
        // Equal sizes, shifted mean by one sigma with n=1000 each gives a
        // t-statistic near sqrt(n/2) ~ 22.4.
        let a: Vec<f64> = (0..1000).map(|i| (i % 7) as f64 / 7.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 1.0).collect();
        let sd = variance(&a).sqrt();
        let t = welch_test(&b, &a).unwrap();
        assert!((t.t - 1.0 / (sd * (2.0f64 / 1000.0).sqrt())).abs() < 1e-9);
        assert!(t.p < 1e-10);
    }

    #[test]
    fn bh_flags_leading_block() {
        let p = vec![0.001, 0.002, 0.9, 0.8, 0.003];
        let flags = benjamini_hochberg(&p, 0.05);
        assert_eq!(flags, vec![true, true, false, false, true]);
        // All-null inputs stay unflagged.
        let none = benjamini_hochberg(&[0.5, 0.9, 0.7], 0.05);
        assert!(none.iter().all(|f| !f));
    }

    #[test]
    fn kendall_tau_matches_examples() {
        assert_eq!(kendall_tau_descending(&[5.1, 4.8, 4.5]), Some(1.0));
        assert_eq!(kendall_tau_descending(&[4.5, 4.8, 5.1]), Some(-1.0));
        let t = kendall_tau_descending(&[5.0, 4.4, 4.7]).unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(kendall_tau_descending(&[1.0]), None);
        // All-tied amplitudes have no defined ordering.
        assert_eq!(kendall_tau_descending(&[2.0, 2.0, 2.0]), None);
    }

    /// Brute-force AUC over all positive/negative pairs.
    fn auc_brute(scores: &[f64], labels: &[bool]) -> Option<f64> {
        let mut num = 0.0f64;
        let mut pairs = 0u64;
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if labels[i] && !labels[j] {
                    pairs += 1;
                    if scores[i] > scores[j] {
                        num += 1.0;
                    } else if scores[i] == scores[j] {
                        num += 0.5;
                    }
                }
            }
        }
        (pairs > 0).then(|| num / pairs as f64)
    }

    #[test]
    fn auc_simple_cases() {
        assert_eq!(
            auc(&[0.9, 0.8, 0.1, 0.2], &[true, true, false, false]),
            Some(1.0)
        );
        assert_eq!(auc(&[0.5; 6], &[true, true, true, false, false, false]), Some(0.5));
        let v = auc(&[0.9, 0.4, 0.6, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(v, 0.75);
        assert_eq!(auc(&[1.0, 2.0], &[true, true]), None);
    }

    #[test]
    fn auc_equals_brute_force_exhaustively() {
        // Every score/label configuration up to n = 6 over a 3-level score
        // alphabet; values must agree exactly (acceptance uses n <= 8).
        let levels = [0.0, 0.5, 1.0];
        for n in 2..=6usize {
            for scores_code in 0..3usize.pow(n as u32) {
                let mut c = scores_code;
                let scores: Vec<f64> = (0..n)
                    .map(|_| {
                        let s = levels[c % 3];
                        c /= 3;
                        s
                    })
                    .collect();
                for label_code in 0..(1usize << n) {
                    let labels: Vec<bool> = (0..n).map(|i| label_code >> i & 1 == 1).collect();
                    assert_eq!(auc(&scores, &labels), auc_brute(&scores, &labels));
                }
            }
        }
    }

    /// Brute-force ARI via direct pair counting.
    fn ari_brute(a: &[usize], b: &[usize]) -> Option<f64> {
        let n = a.len();
        if n == 0 {
            return None;
        }
        let (mut pa, mut pb, mut pc, mut pd) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                match (a[i] == a[j], b[i] == b[j]) {
                    (true, true) => pa += 1,
                    (true, false) => pb += 1,
                    (false, true) => pc += 1,
                    (false, false) => pd += 1,
                }
            }
        }
        let num = 2 * (pa as i128 * pd as i128 - pb as i128 * pc as i128);
        let den = (pa + pb) as i128 * (pb + pd) as i128 + (pa + pc) as i128 * (pc + pd) as i128;
        if den == 0 {
            return Some(if pb == 0 && pc == 0 { 1.0 } else { 0.0 });
        }
        Some(num as f64 / den as f64)
    }

    #[test]
    fn ari_identical_and_flip() {
        let truth: Vec<usize> = (0..100).map(|i| (i >= 50) as usize).collect();
        assert_eq!(adjusted_rand_index(&truth, &truth), Some(1.0));
        let mut one_flip = truth.clone();
        one_flip[0] = 1;
        let v = adjusted_rand_index(&one_flip, &truth).unwrap();
        assert_eq!(Some(v), ari_brute(&one_flip, &truth));
        assert!((v - 0.96).abs() < 0.01, "one flip in 100 gives {v}");
    }

    #[test]
    fn ari_equals_brute_force_exhaustively() {
        for n in 1..=6usize {
            for code_a in 0..2usize.pow(n as u32) {
                let a: Vec<usize> = (0..n).map(|i| code_a >> i & 1).collect();
                for code_b in 0..2usize.pow(n as u32) {
                    let b: Vec<usize> = (0..n).map(|i| code_b >> i & 1).collect();
                    assert_eq!(adjusted_rand_index(&a, &b), ari_brute(&a, &b));
                }
            }
        }
    }

    #[test]
    fn ari_symmetry_on_random_labelings() {
        let mut rng = seeded_rng(7);
        for _ in 0..50 {
            let a: Vec<usize> = (0..40).map(|_| rng.gen_range(0..3)).collect();
            let b: Vec<usize> = (0..40).map(|_| rng.gen_range(0..4)).collect();
            assert_eq!(adjusted_rand_index(&a, &b), adjusted_rand_index(&b, &a));
        }
    }

    #[test]
    fn shapiro_wilk_normal_vs_uniform() {
        // Normal samples should rarely be rejected at 0.01; uniform samples
        // nearly always are (n = 500, 100 seeded trials each).
        let mut accept_normal = 0;
        let mut reject_uniform = 0;
        let trials = 100;
        for t in 0..trials {
            let mut rng = seeded_rng(1000 + t);
            let normal: Vec<f64> = (0..500).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            if shapiro_wilk(&normal).unwrap().p >= 0.01 {
                accept_normal += 1;
            }
            let unif: Vec<f64> = (0..500).map(|_| rng.gen::<f64>()).collect();
            if shapiro_wilk(&unif).unwrap().p < 0.01 {
                reject_uniform += 1;
            }
        }
        assert!(accept_normal >= 98, "normal accepted {accept_normal}/100");
        assert!(reject_uniform >= 99, "uniform rejected {reject_uniform}/100");
    }

    #[test]
    fn shapiro_wilk_domain() {
        assert!(shapiro_wilk(&[1.0, 2.0]).is_err());
        assert!(shapiro_wilk(&[3.0; 10]).is_err());
    }

    #[test]
    fn ks_exponential_accepts_exp_rejects_normal_abs() {
        let mut pass_exp = 0;
        let mut reject_powerlaw = 0;
        for t in 0..100u64 {
            let mut rng = seeded_rng(5000 + t);
            let exp: Vec<f64> = (0..400)
                .map(|_| -(1.0 - rng.gen::<f64>()).ln() * 3.0)
                .collect();
            if !ks_exponential(&exp).unwrap().reject_at(0.01) {
                pass_exp += 1;
            }
            // Pareto-like waiting times: heavy tail, far from exponential.
            let pl: Vec<f64> = (0..400)
                .map(|_| (1.0 - rng.gen::<f64>()).powf(-1.0 / 0.9) - 1.0 + 0.01)
                .collect();
            if ks_exponential(&pl).unwrap().reject_at(0.01) {
                reject_powerlaw += 1;
            }
        }
        assert!(pass_exp >= 95, "exp passed {pass_exp}/100");
        assert!(reject_powerlaw >= 99, "power law rejected {reject_powerlaw}/100");
    }

    #[test]
    fn bootstrap_band_brackets_mean_and_is_deterministic() {
        let xs: Vec<f64> = (0..200).map(|i| (i as f64) / 200.0).collect();
        let (lo, hi) = bootstrap_mean_band(&xs, 500, 0.01, 42);
        let m = mean(&xs);
        assert!(lo <= m && m <= hi);
        assert_eq!(bootstrap_mean_band(&xs, 500, 0.01, 42), (lo, hi));
        // Constant data gives zero-width bands.
        let (l2, h2) = bootstrap_mean_band(&[3.0; 50], 200, 0.01, 1);
        assert_eq!((l2, h2), (3.0, 3.0));
    }
}
