//! Critical values for the limit law of the split-sample tests: the maximum
//! of the suprema of two independent Brownian bridges. Each supremum follows
//! the Kolmogorov distribution, so the level-alpha critical value solves
//! K(c)^2 = 1 - alpha.

use crate::error::{Error, Result};

/// Series truncation threshold for the Kolmogorov CDF.
const TERM_EPS: f64 = 1e-14;
/// Bisection tolerance for quantile inversion.
const ROOT_TOL: f64 = 1e-10;
/// Below this point K(x) < 1e-12, under the alternating series' own rounding
/// noise; report 0 so the CDF stays monotone.
const SMALL_X: f64 = 0.2;

/// CDF of sup_{0<=t<=1} |B(t)| for a Brownian bridge B, evaluated via the
/// alternating series 1 + 2 * sum_{k>=1} (-1)^k exp(-2 k^2 x^2), truncated
/// once a term drops below 1e-14 in magnitude.
pub fn kolmogorov_cdf(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::invalid(format!("kolmogorov_cdf requires x >= 0, got {x}")));
    }
    if x < SMALL_X {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut sign = -1.0;
    for k in 1..u32::MAX {
        let kf = f64::from(k);
        let term = (-2.0 * kf * kf * x * x).exp();
        if term < TERM_EPS {
            break;
        }
        sum += sign * term;
        sign = -sign;
    }
    Ok((1.0 + 2.0 * sum).clamp(0.0, 1.0))
}

/// Critical value c_alpha with P(max of two independent bridge suprema > c) = alpha,
/// i.e. the unique c with kolmogorov_cdf(c) = sqrt(1 - alpha).
pub fn critical_value(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "significance level must lie in (0, 1), got {alpha}"
        )));
    }
    let target = (1.0 - alpha).sqrt();
    let (mut lo, mut hi) = (0.0_f64, 10.0_f64);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Tail probability P(max of two independent bridge suprema > m) = 1 - K(m)^2.
pub fn p_value(statistic: f64) -> Result<f64> {
    let k = kolmogorov_cdf(statistic)?;
    Ok(1.0 - k * k)
}

/// Precomputed alpha -> c_alpha pairs, ordered by increasing alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalValueTable {
    entries: Vec<(f64, f64)>,
}

impl CriticalValueTable {
    /// Builds a table for the given levels (deduplicated, sorted ascending).
    pub fn for_alphas(alphas: &[f64]) -> Result<Self> {
        let mut sorted = alphas.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("levels must not be NaN"));
        sorted.dedup();
        let mut entries = Vec::with_capacity(sorted.len());
        for alpha in sorted {
            entries.push((alpha, critical_value(alpha)?));
        }
        Ok(CriticalValueTable { entries })
    }

    /// The four levels commonly reported: 1%, 2.5%, 5% and 10%.
    pub fn standard() -> Self {
        Self::for_alphas(&[0.01, 0.025, 0.05, 0.10]).expect("standard levels are valid")
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn lookup(&self, alpha: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|(a, _)| *a == alpha)
            .map(|&(_, c)| c)
    }
}
