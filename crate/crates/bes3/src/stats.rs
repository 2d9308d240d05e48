//! Empirical-CDF statistics: Kolmogorov-Smirnov tests and Monte Carlo
//! confidence intervals.
//!
//! P-values are asymptotic (Kolmogorov distribution with effective sample
//! size `n m / (n + m)` for the two-sample statistic). Pass/fail decisions
//! in the verification suite use the asymptotic critical value
//! `c(alpha) sqrt((n + m) / (n m))` with `c(alpha) = sqrt(-ln(alpha/2)/2)`.

use crate::error::{Error, Result};

/// Result of a KS test. `m` is zero for the one-sample variant.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    pub m: usize,
    pub p_value: f64,
}

fn sorted_copy(xs: &[f64], what: &str) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::Usage(format!("{what}: sample must be non-empty")));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Usage(format!(
            "{what}: sample contains non-finite values"
        )));
    }
    let mut v = xs.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
    Ok(v)
}

/// Two-sample KS statistic `sup |F_x - F_y|` with asymptotic p-value.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> Result<KsResult> {
    let xs = sorted_copy(x, "ks_two_sample")?;
    let ys = sorted_copy(y, "ks_two_sample")?;
    let (n, m) = (xs.len(), ys.len());
    let (nf, mf) = (n as f64, m as f64);

    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / nf - j as f64 / mf).abs());
    }
    // Once one sample is exhausted the remaining gap only shrinks back to 0.

    let n_eff = nf * mf / (nf + mf);
    Ok(KsResult {
        statistic: d,
        n,
        m,
        p_value: kolmogorov_sf(n_eff.sqrt() * d),
    })
}

/// One-sample KS statistic against an analytic CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(x: &[f64], cdf: F) -> Result<KsResult> {
    let xs = sorted_copy(x, "ks_one_sample")?;
    let n = xs.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in xs.iter().enumerate() {
        let f = cdf(v);
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Usage(format!(
                "ks_one_sample: cdf({v}) = {f} is outside [0, 1]"
            )));
        }
        d = d.max(((i + 1) as f64 / nf - f).max(f - i as f64 / nf));
    }
    Ok(KsResult {
        statistic: d,
        n,
        m: 0,
        p_value: kolmogorov_sf(nf.sqrt() * d),
    })
}

/// `c(alpha) = sqrt(-ln(alpha / 2) / 2)`, the asymptotic KS quantile factor.
pub fn ks_quantile_factor(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Asymptotic two-sample critical value at level `alpha`.
pub fn ks_critical_two_sample(alpha: f64, n: usize, m: usize) -> f64 {
    ks_quantile_factor(alpha) * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Asymptotic one-sample critical value at level `alpha`.
pub fn ks_critical_one_sample(alpha: f64, n: usize) -> f64 {
    ks_quantile_factor(alpha) / (n as f64).sqrt()
}

/// Survival function of the Kolmogorov distribution,
/// `Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // Jacobi-theta form converges fast for small arguments.
        let y = -std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / x
            * ((y).exp() + (9.0 * y).exp() + (25.0 * y).exp() + (49.0 * y).exp());
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Sample mean and standard error (unbiased variance).
pub fn mc_mean_ci(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::Usage(
            "mc_mean_ci: at least 2 samples are required".into(),
        ));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let ss = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    let stderr = (ss / (n - 1.0) / n).sqrt();
    Ok((mean, stderr))
}
