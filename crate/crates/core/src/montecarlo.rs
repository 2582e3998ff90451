//! Monte Carlo driver for the empirical size/power study. Replications run
//! in parallel; each derives its own counter-indexed RNG stream from
//! (seed, replication), so a cell's output is a pure function of its
//! configuration, independent of worker count and scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::procedure::{test_cusum, test_wilcoxon, TestReport};
use crate::series::Series;
use crate::simulate::{gen_ar1_changepoint, inject_outliers, Ar1Config, FgnConfig, FgnGenerator};
use crate::variance::VarianceConfig;

/// Data-generating process of one experiment cell.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Dgp {
    Ar1(Ar1Config),
    Fgn(FgnConfig),
}

impl Dgp {
    pub fn sample_len(&self) -> usize {
        match self {
            Dgp::Ar1(cfg) => cfg.n,
            Dgp::Fgn(cfg) => cfg.n,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Dgp::Ar1(cfg) => cfg.validate(),
            Dgp::Fgn(cfg) => cfg.validate(),
        }
    }
}

/// One experiment cell: a data-generating process, the tests to run on each
/// replication, and the replication budget.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McConfig {
    pub dgp: Dgp,
    pub outliers: bool,
    pub replications: u32,
    pub alpha: f64,
    pub seed: u64,
    /// Run the Wilcoxon test with this studentization when set.
    pub wilcoxon: Option<VarianceConfig>,
    /// Run the CUSUM test with this studentization when set.
    pub cusum: Option<VarianceConfig>,
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        self.dgp.validate()?;
        if self.replications < 1 {
            return Err(Error::invalid("at least one replication is required"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "significance level must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.wilcoxon.is_none() && self.cusum.is_none() {
            return Err(Error::invalid("no test selected"));
        }
        if let Some(cfg) = &self.wilcoxon {
            cfg.validate()?;
        }
        if let Some(cfg) = &self.cusum {
            cfg.validate()?;
        }
        Ok(())
    }
}

/// Rejection bookkeeping for one test across a cell's replications.
/// Replications whose test errors (degenerate segment, zero scale) are
/// excluded from the denominator and reported as failures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestTally {
    pub rejections: u32,
    pub failures: u32,
    pub replications_used: u32,
}

impl TestTally {
    pub fn rejection_rate(&self) -> f64 {
        if self.replications_used == 0 {
            0.0
        } else {
            f64::from(self.rejections) / f64::from(self.replications_used)
        }
    }

    fn record(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Reject => {
                self.rejections += 1;
                self.replications_used += 1;
            }
            Outcome::Accept => self.replications_used += 1,
            Outcome::Failure => self.failures += 1,
        }
    }
}

/// Result of one experiment cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McCell {
    pub wilcoxon: Option<TestTally>,
    pub cusum: Option<TestTally>,
}

#[derive(Debug, Clone, Copy)]
enum Outcome {
    Reject,
    Accept,
    Failure,
}

fn outcome(result: Result<TestReport>) -> Outcome {
    match result {
        Ok(report) if report.reject => Outcome::Reject,
        Ok(_) => Outcome::Accept,
        Err(_) => Outcome::Failure,
    }
}

/// RNG for replication `rep`: same key for the whole cell, the replication
/// index selects the ChaCha stream.
fn replication_rng(seed: u64, rep: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(rep) + 1);
    rng
}

fn generate(cfg: &McConfig, fgn: Option<&FgnGenerator>, rng: &mut ChaCha8Rng) -> Result<Series> {
    let base = match &cfg.dgp {
        Dgp::Ar1(ar1) => gen_ar1_changepoint(ar1, rng)?,
        Dgp::Fgn(_) => fgn.expect("generator prebuilt for fGn cells").sample(rng),
    };
    if cfg.outliers {
        inject_outliers(&base)
    } else {
        Ok(base)
    }
}

/// Runs one cell. The output depends only on `cfg` (including the seed);
/// reducing integer tallies over the index-ordered outcome vector keeps it
/// identical for any worker count.
pub fn run_mc(cfg: &McConfig) -> Result<McCell> {
    cfg.validate()?;
    let fgn = match &cfg.dgp {
        Dgp::Fgn(fgn_cfg) => Some(FgnGenerator::new(fgn_cfg)?),
        Dgp::Ar1(_) => None,
    };

    let outcomes: Vec<(Option<Outcome>, Option<Outcome>)> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(cfg.seed, rep);
            let series = match generate(cfg, fgn.as_ref(), &mut rng) {
                Ok(series) => series,
                Err(_) => {
                    let failed = Some(Outcome::Failure);
                    return (
                        cfg.wilcoxon.as_ref().and(failed),
                        cfg.cusum.as_ref().and(failed),
                    );
                }
            };
            let w = cfg
                .wilcoxon
                .as_ref()
                .map(|vc| outcome(test_wilcoxon(&series, cfg.alpha, vc)));
            let c = cfg
                .cusum
                .as_ref()
                .map(|vc| outcome(test_cusum(&series, cfg.alpha, vc)));
            (w, c)
        })
        .collect();

    let mut wilcoxon = cfg.wilcoxon.as_ref().map(|_| TestTally::default());
    let mut cusum = cfg.cusum.as_ref().map(|_| TestTally::default());
    for (w, c) in outcomes {
        if let (Some(tally), Some(out)) = (wilcoxon.as_mut(), w) {
            tally.record(out);
        }
        if let (Some(tally), Some(out)) = (cusum.as_mut(), c) {
            tally.record(out);
        }
    }
    Ok(McCell { wilcoxon, cusum })
}
