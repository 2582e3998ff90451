//! Long-run variance and scale estimators, plus the robust autocorrelation
//! used to pick the subsampling block length.
//!
//! The split tests studentize each segment by an estimate computed on that
//! segment alone, so every routine here treats its input as a fresh sample.

use crate::error::{Error, Result};
use crate::series::Series;

/// Gaussian-consistency constant for the Qn scale estimator.
const QN_CONSTANT: f64 = 2.21914;

/// Which long-run estimator studentizes a test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VarianceKind {
    /// Kernel-weighted autocovariance sum; estimates the long-run variance
    /// of the observations (CUSUM test).
    Bartlett,
    /// Non-overlapping block subsampling estimator of the long-run variance
    /// of the observations (CUSUM test).
    CarlsteinCusum,
    /// Block estimator of the long-run *standard deviation* of the ranks,
    /// built on the empirical CDF (Wilcoxon test).
    CarlsteinWilcoxon,
}

/// Rule mapping an AR(1)-style lag-1 correlation to a block length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BlockRule {
    CarlsteinAr1,
}

/// How the lag-1 correlation feeding the block rule is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RhoSource {
    /// Ordinary sample autocorrelation; fine on clean data.
    SampleAcf,
    /// Qn-based estimator; keeps the block length sane under outliers.
    RobustQ,
}

/// Configuration of the long-run scale estimation inside a test procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarianceConfig {
    pub kind: VarianceKind,
    /// Bartlett bandwidth constant: q(n) = floor(bandwidth_c * log10(n)).
    pub bandwidth_c: f64,
    pub block_rule: BlockRule,
    pub rho_source: RhoSource,
    /// Overrides the block rule with a fixed block length.
    pub fixed_block: Option<usize>,
}

impl VarianceConfig {
    pub fn wilcoxon() -> Self {
        VarianceConfig {
            kind: VarianceKind::CarlsteinWilcoxon,
            ..Self::default()
        }
    }

    pub fn cusum_carlstein() -> Self {
        VarianceConfig {
            kind: VarianceKind::CarlsteinCusum,
            ..Self::default()
        }
    }

    pub fn cusum_bartlett() -> Self {
        VarianceConfig {
            kind: VarianceKind::Bartlett,
            ..Self::default()
        }
    }

    pub fn with_rho_source(mut self, source: RhoSource) -> Self {
        self.rho_source = source;
        self
    }

    pub fn with_fixed_block(mut self, block: usize) -> Self {
        self.fixed_block = Some(block);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_c > 0.0 && self.bandwidth_c.is_finite()) {
            return Err(Error::invalid(format!(
                "bandwidth constant must be positive and finite, got {}",
                self.bandwidth_c
            )));
        }
        if self.fixed_block == Some(0) {
            return Err(Error::invalid("fixed block length must be >= 1"));
        }
        Ok(())
    }

    /// Bartlett bandwidth for a sample of length `n`.
    pub fn bartlett_bandwidth(&self, n: usize) -> usize {
        (self.bandwidth_c * (n as f64).log10()).floor() as usize
    }
}

impl Default for VarianceConfig {
    fn default() -> Self {
        VarianceConfig {
            kind: VarianceKind::CarlsteinWilcoxon,
            bandwidth_c: 15.0,
            block_rule: BlockRule::CarlsteinAr1,
            rho_source: RhoSource::SampleAcf,
            fixed_block: None,
        }
    }
}

/// Mean-centered autocovariance at `lag` with divisor n at every lag.
fn autocovariance(vals: &[f64], mean: f64, lag: usize) -> f64 {
    let n = vals.len();
    let mut sum = 0.0;
    for i in 0..n - lag {
        sum += (vals[i] - mean) * (vals[i + lag] - mean);
    }
    sum / n as f64
}

/// Bartlett long-run variance estimate
///
///   s^2 = gamma(0) + 2 sum_{j=1..q} (1 - j/(q+1)) gamma(j).
///
/// The triangular weights make the estimate nonnegative; tiny negative
/// rounding residue is clamped to zero.
pub fn bartlett_lrv(x: &Series, q: usize) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::invalid(format!("Bartlett estimator needs n >= 2, got {n}")));
    }
    if q >= n {
        return Err(Error::invalid(format!(
            "Bartlett bandwidth q = {q} must be smaller than the sample length {n}"
        )));
    }
    let vals = x.values();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let mut s2 = autocovariance(vals, mean, 0);
    for j in 1..=q {
        let weight = 1.0 - j as f64 / (q + 1) as f64;
        s2 += 2.0 * weight * autocovariance(vals, mean, j);
    }
    Ok(s2.max(0.0))
}

/// Carlstein non-overlapping block estimate of the long-run variance:
/// the average over b = floor(n/block) blocks of
/// block^{-1} (block sum - block/n * total sum)^2.
pub fn carlstein_lrv(x: &Series, block: usize) -> Result<f64> {
    let sums = block_sums(x.values(), block, "long-run variance estimation")?;
    let n = x.len() as f64;
    let total: f64 = x.values().iter().sum();
    let share = block as f64 / n * total;
    let mean = sums
        .iter()
        .map(|s| (s - share) * (s - share) / block as f64)
        .sum::<f64>()
        / sums.len() as f64;
    Ok(mean)
}

/// Rank-based Carlstein estimate of the long-run standard deviation:
///
///   sigma_W = sqrt(pi/2) * avg_i block^{-1/2} |sum_block F_n(x_j) - block/n * sum_all F_n(x_j)|
///
/// with F_n the empirical CDF of the whole passed sample. Note this
/// estimates sigma, not sigma^2. Depends on the data only through ranks.
pub fn carlstein_wilcoxon_scale(x: &Series, block: usize) -> Result<f64> {
    let ecdf = ecdf_values(x.values());
    let sums = block_sums(&ecdf, block, "long-run scale estimation")?;
    let n = x.len() as f64;
    let total: f64 = ecdf.iter().sum();
    let share = block as f64 / n * total;
    let avg_abs = sums
        .iter()
        .map(|s| (s - share).abs() / (block as f64).sqrt())
        .sum::<f64>()
        / sums.len() as f64;
    Ok((std::f64::consts::PI / 2.0).sqrt() * avg_abs)
}

/// F_n(x_j) = n^{-1} #{i : x_i <= x_j} for every j; ties take the upper count.
fn ecdf_values(vals: &[f64]) -> Vec<f64> {
    let n = vals.len();
    let mut sorted = vals.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite by Series"));
    vals.iter()
        .map(|v| sorted.partition_point(|s| s <= v) as f64 / n as f64)
        .collect()
}

/// Sums of the floor(n/block) full blocks; the trailing partial block is
/// discarded. Errors unless at least two full blocks fit.
fn block_sums(vals: &[f64], block: usize, what: &'static str) -> Result<Vec<f64>> {
    if block < 1 {
        return Err(Error::invalid("block length must be >= 1"));
    }
    let n = vals.len();
    let blocks = n / block;
    if blocks < 2 {
        return Err(Error::DegenerateSegment {
            which: "sample",
            detail: format!(
                "{what} needs at least 2 blocks of length {block}, but n = {n} holds {blocks}"
            ),
        });
    }
    Ok(vals
        .chunks_exact(block)
        .map(|chunk| chunk.iter().sum())
        .collect())
}

/// Carlstein's AR(1) block-length rule
///
///   l = max(ceil(n^{1/3} (2 rho / (1 - rho^2))^{2/3}), 1),
///
/// read with |2 rho / (1 - rho^2)| so that a (slightly) negative estimated
/// correlation degrades to short blocks instead of a domain error.
pub fn block_length_ar1(rho: f64, n: usize) -> Result<usize> {
    if rho.is_nan() || rho.abs() >= 1.0 {
        return Err(Error::invalid(format!(
            "block rule needs |rho| < 1, got {rho}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("block rule needs n >= 1"));
    }
    let factor = (2.0 * rho / (1.0 - rho * rho)).abs().powf(2.0 / 3.0);
    let raw = ((n as f64).cbrt() * factor).ceil() as usize;
    Ok(raw.max(1))
}

/// Lag-1 sample autocorrelation with divisor-n autocovariances; always lies
/// in [-1, 1] by Cauchy-Schwarz.
pub fn sample_acf1(x: &Series) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "lag-1 autocorrelation needs n >= 2, got {n}"
        )));
    }
    let vals = x.values();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let gamma0 = autocovariance(vals, mean, 0);
    if gamma0 == 0.0 {
        return Err(Error::ZeroVariance(
            "constant series has no autocorrelation".into(),
        ));
    }
    Ok(autocovariance(vals, mean, 1) / gamma0)
}

/// Qn robust scale: 2.21914 times the k-th smallest of the n(n-1)/2
/// pairwise absolute differences, k = max(1, floor(C(n,2)/4)).
///
/// Plain pairwise enumeration with partial selection; quadratic, but it is
/// only run once per segment per replication at the sample sizes in play.
pub fn qn_scale(x: &Series) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::invalid(format!("Qn scale needs n >= 2, got {n}")));
    }
    let vals = x.values();
    let pairs = n * (n - 1) / 2;
    let mut dists = Vec::with_capacity(pairs);
    for i in 0..n {
        for j in (i + 1)..n {
            dists.push((vals[i] - vals[j]).abs());
        }
    }
    let k = (pairs / 4).max(1);
    let (_, kth, _) = dists.select_nth_unstable_by(k - 1, |a, b| {
        a.partial_cmp(b).expect("finite by Series")
    });
    Ok(QN_CONSTANT * *kth)
}

/// Lag-1 autocorrelation from Qn scales of the lagged sum and difference:
///
///   rho_Q = (Qn(u+v)^2 - Qn(u-v)^2) / (Qn(u+v)^2 + Qn(u-v)^2)
///
/// with u = (x_1..x_{n-1}), v = (x_2..x_n). Lies in [-1, 1] by construction
/// and shrugs off the gross outliers that wreck the sample autocorrelation.
pub fn robust_acf1(x: &Series) -> Result<f64> {
    let n = x.len();
    if n < 3 {
        return Err(Error::invalid(format!(
            "robust lag-1 autocorrelation needs n >= 3, got {n}"
        )));
    }
    let vals = x.values();
    let mut sums = Vec::with_capacity(n - 1);
    let mut diffs = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        sums.push(vals[i] + vals[i + 1]);
        diffs.push(vals[i] - vals[i + 1]);
    }
    let q_sum = qn_scale(&Series::new(sums)?)?;
    let q_diff = qn_scale(&Series::new(diffs)?)?;
    let denom = q_sum * q_sum + q_diff * q_diff;
    if denom == 0.0 {
        return Err(Error::ZeroScale(
            "both Qn scales vanish; lag-1 correlation is undefined".into(),
        ));
    }
    Ok((q_sum * q_sum - q_diff * q_diff) / denom)
}

/// Block length for a sample under `cfg`: the fixed override when present,
/// otherwise the AR(1) rule fed by the configured rho estimator, both
/// evaluated on the passed sample itself.
pub fn resolve_block(x: &Series, cfg: &VarianceConfig) -> Result<usize> {
    cfg.validate()?;
    if let Some(block) = cfg.fixed_block {
        return Ok(block);
    }
    let rho = match cfg.rho_source {
        RhoSource::SampleAcf => sample_acf1(x)?,
        RhoSource::RobustQ => robust_acf1(x)?,
    };
    match cfg.block_rule {
        BlockRule::CarlsteinAr1 => block_length_ar1(rho, x.len()),
    }
}
