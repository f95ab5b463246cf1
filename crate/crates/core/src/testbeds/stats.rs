//! Small statistical utilities for the calibration harness.

use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};

/// Pointwise credible band for the empirical CDF of n Uniform(0,1) draws:
/// the k-th order statistic is Beta(k, n+1−k); returns its central `level`
/// interval for each k = 1..n.
pub fn uniform_order_statistic_band(n: usize, level: f64) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::invalid("band needs at least one point"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid("band level must be in (0, 1)"));
    }
    let tail = 0.5 * (1.0 - level);
    (1..=n)
        .map(|k| {
            let beta = Beta::new(k as f64, (n + 1 - k) as f64)
                .map_err(|e| Error::numerical(format!("beta parameters: {e}")))?;
            Ok((beta.inverse_cdf(tail), beta.inverse_cdf(1.0 - tail)))
        })
        .collect()
}

/// One-sample Kolmogorov-Smirnov statistic against Uniform(0,1).
/// `sorted` must be ascending with values in [0, 1].
pub fn ks_statistic_uniform(sorted: &[f64]) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::invalid("KS statistic needs data"));
    }
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &u) in sorted.iter().enumerate() {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::invalid(format!("KS input out of [0,1]: {u}")));
        }
        if i > 0 && sorted[i - 1] > u {
            return Err(Error::invalid("KS input must be sorted ascending"));
        }
        d = d.max(u - i as f64 / n).max((i as f64 + 1.0) / n - u);
    }
    Ok(d)
}

/// Asymptotic p-value of the one-sample KS test (Stephens' small-sample
/// correction applied to the Kolmogorov distribution).
pub fn ks_pvalue_uniform(sorted: &[f64]) -> Result<f64> {
    let d = ks_statistic_uniform(sorted)?;
    let n = sorted.len() as f64;
    let t = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0f64;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * t * t).exp();
        p += if k % 2 == 1 { 2.0 * term } else { -2.0 * term };
        if term < 1e-16 {
            break;
        }
    }
    Ok(p.clamp(0.0, 1.0))
}
