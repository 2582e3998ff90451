//! The split-sample testing procedures. Both estimate the location of a
//! possible mean shift, split the sample there, apply the scaled maximum
//! statistic to each side, studentize by a per-segment long-run scale, and
//! compare the larger normalized statistic to the critical value of the
//! max-of-two-bridges law. Under short-range dependence with one shift both
//! segments behave like stationary samples; under long-range dependence the
//! statistic diverges.

use crate::cusum::{estimate_changepoint_cusum, t_statistic_cusum};
use crate::error::{Error, Result};
use crate::limit::critical_value;
use crate::series::Series;
use crate::variance::{
    bartlett_lrv, carlstein_lrv, carlstein_wilcoxon_scale, resolve_block, RhoSource,
    VarianceConfig, VarianceKind,
};
use crate::wilcoxon::{estimate_changepoint_wilcoxon, t_statistic_wilcoxon};

/// Which testing procedure produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Procedure {
    Wilcoxon,
    Cusum,
}

/// Outcome of one testing procedure on one sample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestReport {
    pub procedure: Procedure,
    /// Estimated split position (1-based, 1 <= k_hat < n).
    pub k_hat: usize,
    /// Unstudentized statistics of the pre- and post-split segments.
    pub t1: f64,
    pub t2: f64,
    /// Long-run scale estimates used to normalize t1 and t2.
    pub sigma1: f64,
    pub sigma2: f64,
    /// max(t1 / sigma1, t2 / sigma2).
    pub statistic: f64,
    pub alpha: f64,
    pub critical_value: f64,
    pub reject: bool,
}

const SEGMENT_NAMES: [&str; 2] = ["pre-split segment", "post-split segment"];

fn validate_inputs(x: &Series, alpha: f64, cfg: &VarianceConfig) -> Result<()> {
    cfg.validate()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "significance level must lie in (0, 1), got {alpha}"
        )));
    }
    if x.len() < 4 {
        return Err(Error::invalid(format!(
            "split testing needs n >= 4, got {}",
            x.len()
        )));
    }
    let first = x.values()[0];
    if x.values().iter().all(|&v| v == first) {
        return Err(Error::ZeroScale(
            "constant series: every long-run scale estimate is zero".into(),
        ));
    }
    Ok(())
}

/// Minimum segment length before the block rule can even be evaluated.
fn rho_min_len(cfg: &VarianceConfig) -> usize {
    if cfg.fixed_block.is_some() {
        2
    } else {
        match cfg.rho_source {
            RhoSource::SampleAcf => 2,
            RhoSource::RobustQ => 3,
        }
    }
}

fn checked_block(seg: &Series, cfg: &VarianceConfig, which: &'static str) -> Result<usize> {
    let len = seg.len();
    let min_len = rho_min_len(cfg);
    if len < min_len {
        return Err(Error::DegenerateSegment {
            which,
            detail: format!("length {len} cannot support block-length selection (needs {min_len})"),
        });
    }
    let block = resolve_block(seg, cfg)?;
    if len < 2 * block {
        return Err(Error::DegenerateSegment {
            which,
            detail: format!("length {len} holds fewer than 2 blocks of length {block}"),
        });
    }
    Ok(block)
}

fn wilcoxon_segment(seg: &Series, cfg: &VarianceConfig, which: &'static str) -> Result<(f64, f64)> {
    let block = checked_block(seg, cfg, which)?;
    let sigma = carlstein_wilcoxon_scale(seg, block)?;
    if sigma == 0.0 {
        return Err(Error::ZeroScale(format!(
            "{which}: rank-based long-run scale estimate is zero"
        )));
    }
    Ok((t_statistic_wilcoxon(seg)?, sigma))
}

fn cusum_segment(seg: &Series, cfg: &VarianceConfig, which: &'static str) -> Result<(f64, f64)> {
    let variance = match cfg.kind {
        VarianceKind::Bartlett => {
            let q = cfg.bartlett_bandwidth(seg.len());
            if q >= seg.len() {
                return Err(Error::DegenerateSegment {
                    which,
                    detail: format!(
                        "length {} cannot support Bartlett bandwidth {q}",
                        seg.len()
                    ),
                });
            }
            bartlett_lrv(seg, q)?
        }
        VarianceKind::CarlsteinCusum => {
            let block = checked_block(seg, cfg, which)?;
            carlstein_lrv(seg, block)?
        }
        VarianceKind::CarlsteinWilcoxon => unreachable!("rejected before splitting"),
    };
    let sigma = variance.sqrt();
    if sigma == 0.0 {
        return Err(Error::ZeroScale(format!(
            "{which}: long-run variance estimate is zero"
        )));
    }
    Ok((t_statistic_cusum(seg)?, sigma))
}

fn assemble(
    procedure: Procedure,
    k_hat: usize,
    (t1, sigma1): (f64, f64),
    (t2, sigma2): (f64, f64),
    alpha: f64,
) -> Result<TestReport> {
    let statistic = (t1 / sigma1).max(t2 / sigma2);
    let critical = critical_value(alpha)?;
    Ok(TestReport {
        procedure,
        k_hat,
        t1,
        t2,
        sigma1,
        sigma2,
        statistic,
        alpha,
        critical_value: critical,
        reject: statistic > critical,
    })
}

/// Wilcoxon-type procedure: split at the rank-statistic argmax, studentize
/// each segment's scaled maximum by the rank-based Carlstein scale.
pub fn test_wilcoxon(x: &Series, alpha: f64, cfg: &VarianceConfig) -> Result<TestReport> {
    if cfg.kind != VarianceKind::CarlsteinWilcoxon {
        return Err(Error::invalid(
            "the Wilcoxon procedure is studentized by the rank-based Carlstein scale",
        ));
    }
    validate_inputs(x, alpha, cfg)?;
    let n = x.len();
    let k_hat = estimate_changepoint_wilcoxon(x)?;
    let pre = x.segment(1, k_hat)?;
    let post = x.segment(k_hat + 1, n)?;
    let first = wilcoxon_segment(&pre, cfg, SEGMENT_NAMES[0])?;
    let second = wilcoxon_segment(&post, cfg, SEGMENT_NAMES[1])?;
    assemble(Procedure::Wilcoxon, k_hat, first, second, alpha)
}

/// CUSUM-type procedure: split at the CUSUM argmax, studentize by the
/// Bartlett or block-subsampling long-run standard deviation.
pub fn test_cusum(x: &Series, alpha: f64, cfg: &VarianceConfig) -> Result<TestReport> {
    if cfg.kind == VarianceKind::CarlsteinWilcoxon {
        return Err(Error::invalid(
            "the rank-based scale estimator studentizes the Wilcoxon procedure, not the CUSUM one",
        ));
    }
    validate_inputs(x, alpha, cfg)?;
    let n = x.len();
    let k_hat = estimate_changepoint_cusum(x)?;
    // C_{1,n}(n) = 0 exactly, so a non-flat profile never puts the argmax at
    // n; the flat profile is ruled out by the constant-series check.
    debug_assert!(k_hat < n);
    let pre = x.segment(1, k_hat)?;
    let post = x.segment(k_hat + 1, n)?;
    let first = cusum_segment(&pre, cfg, SEGMENT_NAMES[0])?;
    let second = cusum_segment(&post, cfg, SEGMENT_NAMES[1])?;
    assemble(Procedure::Cusum, k_hat, first, second, alpha)
}
