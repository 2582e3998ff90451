//! Data-generating processes for the size/power study: an AR(1) series with
//! a mean shift at a fixed fraction of the sample, exact fractional Gaussian
//! noise via circulant embedding, and the four-point outlier contamination.

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::series::Series;

/// Eigenvalues of the embedding below this are a hard error; values in
/// [-EIG_TOL, 0) are treated as rounding residue and clamped to zero.
const EIG_TOL: f64 = 1e-9;

/// AR(1) observations with a level shift:
/// Y_i = rho Y_{i-1} + eps_i, X_i = Y_i + mu + delta * 1{i > k*}, k* = floor(n * theta).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ar1Config {
    pub rho: f64,
    pub n: usize,
    /// Break fraction; the change point sits at floor(n * theta).
    pub theta: f64,
    /// Size of the level shift after the change point.
    pub delta: f64,
    pub mu: f64,
}

impl Ar1Config {
    pub fn new(rho: f64, n: usize, theta: f64, delta: f64) -> Self {
        Ar1Config { rho, n, theta, delta, mu: 0.0 }
    }

    pub fn changepoint(&self) -> usize {
        (self.n as f64 * self.theta).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho.is_nan() || self.rho.abs() >= 1.0 {
            return Err(Error::invalid(format!("AR(1) needs |rho| < 1, got {}", self.rho)));
        }
        if self.n < 1 {
            return Err(Error::invalid("AR(1) needs n >= 1"));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::invalid(format!(
                "break fraction theta must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if !self.delta.is_finite() || !self.mu.is_finite() {
            return Err(Error::invalid("delta and mu must be finite"));
        }
        Ok(())
    }
}

/// Fractional Gaussian noise with long-memory parameter d; the Hurst index
/// is H = d + 1/2. d = 0 (white noise) is admitted as a boundary case.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FgnConfig {
    pub d: f64,
    pub n: usize,
}

impl FgnConfig {
    pub fn new(d: f64, n: usize) -> Self {
        FgnConfig { d, n }
    }

    pub fn hurst(&self) -> f64 {
        self.d + 0.5
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d >= 0.0 && self.d < 0.5) {
            return Err(Error::invalid(format!(
                "long-memory parameter d must lie in [0, 1/2), got {}",
                self.d
            )));
        }
        if self.n < 1 {
            return Err(Error::invalid("fGn needs n >= 1"));
        }
        Ok(())
    }
}

/// Closed-form fGn autocovariance
/// gamma(k) = ((k+1)^{2H} - 2 k^{2H} + (k-1)^{2H}) / 2, gamma(0) = 1.
pub fn fgn_autocovariance(hurst: f64, lag: usize) -> f64 {
    if lag == 0 {
        return 1.0;
    }
    let k = lag as f64;
    let two_h = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h))
}

/// Exact fGn sampler: gamma(0..n) embedded in a circulant of size 2n whose
/// FFT gives nonnegative eigenvalues; a complex Gaussian spectrum weighted
/// by their square roots transforms back to a stationary Gaussian path with
/// exactly the fGn covariance. Eigenvalues are validated once at
/// construction, so every draw synthesizes from a checked spectrum.
pub struct FgnGenerator {
    n: usize,
    /// sqrt(lambda_j / m) scaled for the conjugate-symmetric spectrum, j = 0..=n.
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FgnGenerator {
    pub fn new(cfg: &FgnConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n;
        let m = 2 * n;
        let hurst = cfg.hurst();

        let mut first_row: Vec<Complex<f64>> = Vec::with_capacity(m);
        for j in 0..=n {
            first_row.push(Complex::new(fgn_autocovariance(hurst, j), 0.0));
        }
        for j in n + 1..m {
            first_row.push(Complex::new(fgn_autocovariance(hurst, m - j), 0.0));
        }

        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut first_row);

        let mut min_eig = f64::INFINITY;
        let mut eigenvalues = Vec::with_capacity(n + 1);
        for entry in first_row.iter().take(n + 1) {
            min_eig = min_eig.min(entry.re);
            eigenvalues.push(entry.re.max(0.0));
        }
        if min_eig < -EIG_TOL {
            return Err(Error::EmbeddingFailure { min_eigenvalue: min_eig });
        }

        let mf = m as f64;
        let weights = eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &lambda)| {
                if j == 0 || j == n {
                    (lambda / mf).sqrt()
                } else {
                    (lambda / (2.0 * mf)).sqrt()
                }
            })
            .collect();

        Ok(FgnGenerator { n, weights, fft })
    }

    /// Length of the paths this generator produces.
    pub fn path_len(&self) -> usize {
        self.n
    }

    /// One stationary path of length n. Consumes exactly 2n normals.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Series {
        let n = self.n;
        let m = 2 * n;
        let mut spectrum = vec![Complex::new(0.0, 0.0); m];

        let z0: f64 = rng.sample(StandardNormal);
        spectrum[0] = Complex::new(self.weights[0] * z0, 0.0);
        for j in 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let w = self.weights[j];
            spectrum[j] = Complex::new(w * re, w * im);
            spectrum[m - j] = Complex::new(w * re, -(w * im));
        }
        let zn: f64 = rng.sample(StandardNormal);
        spectrum[n] = Complex::new(self.weights[n] * zn, 0.0);

        self.fft.process(&mut spectrum);
        let values: Vec<f64> = spectrum.iter().take(n).map(|c| c.re).collect();
        Series::new(values).expect("synthesized path is finite")
    }
}

/// One-shot fGn draw; building [`FgnGenerator`] once is cheaper when many
/// paths of the same length are needed.
pub fn gen_fgn<R: Rng + ?Sized>(cfg: &FgnConfig, rng: &mut R) -> Result<Series> {
    Ok(FgnGenerator::new(cfg)?.sample(rng))
}

/// AR(1) path with a mean shift. The recursion starts from the exact
/// stationary law Y_0 ~ N(0, 1/(1-rho^2)), so no burn-in is needed.
pub fn gen_ar1_changepoint<R: Rng + ?Sized>(cfg: &Ar1Config, rng: &mut R) -> Result<Series> {
    cfg.validate()?;
    let kstar = cfg.changepoint();
    let mut y: f64 = rng.sample::<f64, _>(StandardNormal) / (1.0 - cfg.rho * cfg.rho).sqrt();
    let mut values = Vec::with_capacity(cfg.n);
    for i in 1..=cfg.n {
        let eps: f64 = rng.sample(StandardNormal);
        y = cfg.rho * y + eps;
        let shift = if i > kstar { cfg.delta } else { 0.0 };
        values.push(y + cfg.mu + shift);
    }
    Series::new(values)
}

/// Multiplies the observations at 1-based positions floor(0.2n), floor(0.4n),
/// floor(0.6n), floor(0.8n) by 50; everything else is copied bit-identically.
pub fn inject_outliers(x: &Series) -> Result<Series> {
    let n = x.len();
    if n < 5 {
        return Err(Error::invalid(format!(
            "outlier injection needs n >= 5 so all four positions are >= 1, got {n}"
        )));
    }
    let mut values = x.values().to_vec();
    for numerator in [2, 4, 6, 8] {
        let pos = numerator * n / 10;
        values[pos - 1] *= 50.0;
    }
    Series::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn sample_autocov(v: &[f64], lag: usize) -> f64 {
        let m = mean(v);
        v.iter()
            .zip(&v[lag..])
            .map(|(a, b)| (a - m) * (b - m))
            .sum::<f64>()
            / v.len() as f64
    }

    // For fGn the mean is zero by construction; centering would shift every
    // autocovariance down by Var of the sample mean, which for long memory
    // decays only like n^{2H-2} and would swamp the tolerance.
    fn zero_mean_autocov(v: &[f64], lag: usize) -> f64 {
        v.iter().zip(&v[lag..]).map(|(a, b)| a * b).sum::<f64>() / v.len() as f64
    }

    #[test]
    fn ar1_config_validation() {
        assert!(Ar1Config::new(1.0, 10, 0.5, 0.0).validate().is_err());
        assert!(Ar1Config::new(0.4, 10, 0.0, 0.0).validate().is_err());
        assert!(Ar1Config::new(0.4, 10, 1.0, 0.0).validate().is_err());
        assert!(Ar1Config::new(0.4, 0, 0.5, 0.0).validate().is_err());
        assert!(Ar1Config::new(0.4, 10, 0.5, 1.0).validate().is_ok());
        assert_eq!(Ar1Config::new(0.4, 1000, 0.25, 1.0).changepoint(), 250);
    }

    #[test]
    fn iid_case_has_unit_moments() {
        let cfg = Ar1Config::new(0.0, 5000, 0.5, 0.0);
        let x = gen_ar1_changepoint(&cfg, &mut rng(1)).unwrap();
        let v = x.values();
        let n = v.len() as f64;
        assert!(mean(v).abs() < 4.0 / n.sqrt(), "mean = {}", mean(v));
        let var = sample_autocov(v, 0);
        assert!((var - 1.0).abs() < 0.1, "var = {var}");
    }

    #[test]
    fn ar1_lag1_correlation_near_rho() {
        let cfg = Ar1Config::new(0.4, 5000, 0.5, 0.0);
        let x = gen_ar1_changepoint(&cfg, &mut rng(2)).unwrap();
        let v = x.values();
        let rho_hat = sample_autocov(v, 1) / sample_autocov(v, 0);
        assert!((rho_hat - 0.4).abs() < 0.03, "rho_hat = {rho_hat}");
    }

    #[test]
    fn large_shift_moves_segment_means() {
        let cfg = Ar1Config { rho: 0.4, n: 2000, theta: 0.5, delta: 10.0, mu: -3.0 };
        let x = gen_ar1_changepoint(&cfg, &mut rng(3)).unwrap();
        let v = x.values();
        let gap = mean(&v[1000..]) - mean(&v[..1000]);
        assert!((gap - 10.0).abs() < 0.2, "gap = {gap}");
    }

    #[test]
    fn fgn_config_validation() {
        assert!(FgnConfig::new(-0.01, 10).validate().is_err());
        assert!(FgnConfig::new(0.5, 10).validate().is_err());
        assert!(FgnConfig::new(0.4, 0).validate().is_err());
        assert!(FgnConfig::new(0.0, 10).validate().is_ok());
        assert_eq!(FgnConfig::new(0.4, 10).hurst(), 0.9);
    }

    #[test]
    fn fgn_closed_form_autocovariance() {
        assert_eq!(fgn_autocovariance(0.9, 0), 1.0);
        assert!((fgn_autocovariance(0.9, 1) - 0.74110).abs() < 1e-5);
        // H = 1/2 is white noise: every positive lag vanishes.
        assert!(fgn_autocovariance(0.5, 1).abs() < 1e-15);
        assert!(fgn_autocovariance(0.5, 7).abs() < 1e-15);
    }

    #[test]
    fn fgn_boundary_case_is_white() {
        let gen = FgnGenerator::new(&FgnConfig::new(0.0, 5000)).unwrap();
        let mut r = rng(4);
        let mut rho1 = 0.0;
        let mut var = 0.0;
        for _ in 0..5 {
            let x = gen.sample(&mut r);
            let v = x.values();
            rho1 += zero_mean_autocov(v, 1) / zero_mean_autocov(v, 0);
            var += zero_mean_autocov(v, 0);
        }
        rho1 /= 5.0;
        var /= 5.0;
        assert!(rho1.abs() < 0.03, "rho1 = {rho1}");
        assert!((var - 1.0).abs() < 0.1, "var = {var}");
    }

    #[test]
    fn fgn_matches_closed_form_covariances() {
        let gen = FgnGenerator::new(&FgnConfig::new(0.4, 5000)).unwrap();
        let mut r = rng(5);
        let reps = 50;
        let mut acov = [0.0; 6];
        for _ in 0..reps {
            let x = gen.sample(&mut r);
            for (lag, acc) in acov.iter_mut().enumerate() {
                *acc += zero_mean_autocov(x.values(), lag);
            }
        }
        for (lag, acc) in acov.iter().enumerate() {
            let avg = acc / f64::from(reps);
            let expected = fgn_autocovariance(0.9, lag);
            assert!(
                (avg - expected).abs() < 0.05,
                "lag {lag}: avg = {avg}, closed form = {expected}"
            );
        }
    }

    #[test]
    fn fgn_draw_is_deterministic_in_the_stream() {
        let gen = FgnGenerator::new(&FgnConfig::new(0.3, 64)).unwrap();
        let a = gen.sample(&mut rng(9));
        let b = gen.sample(&mut rng(9));
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn outliers_hit_exactly_four_positions() {
        let x = Series::new(vec![1.0; 10]).unwrap();
        let y = inject_outliers(&x).unwrap();
        assert_eq!(
            y.values(),
            &[1.0, 50.0, 1.0, 50.0, 1.0, 50.0, 1.0, 50.0, 1.0, 1.0]
        );

        let n = 500;
        let base = Series::new((0..n).map(|i| i as f64 + 1.0).collect()).unwrap();
        let hit = inject_outliers(&base).unwrap();
        let changed: Vec<usize> = base
            .values()
            .iter()
            .zip(hit.values())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i + 1)
            .collect();
        assert_eq!(changed, vec![100, 200, 300, 400]);

        assert!(inject_outliers(&Series::new(vec![1.0; 4]).unwrap()).is_err());
    }

    #[test]
    fn outlier_injection_composes_multiplicatively() {
        let x = Series::new(vec![2.0; 10]).unwrap();
        let twice = inject_outliers(&inject_outliers(&x).unwrap()).unwrap();
        assert_eq!(twice.values()[1], 2.0 * 2500.0);
        assert_eq!(twice.values()[0], 2.0);
    }

    #[test]
    fn ar1_windows_share_moments_under_no_shift() {
        // Strict stationarity check at Monte Carlo resolution: mean and
        // variance agree across window positions.
        let cfg = Ar1Config::new(0.4, 600, 0.5, 0.0);
        let reps = 300;
        let mut m = [0.0; 3];
        let mut v = [0.0; 3];
        let mut r = rng(6);
        for _ in 0..reps {
            let x = gen_ar1_changepoint(&cfg, &mut r).unwrap();
            for (w, offset) in [0usize, 200, 400].iter().enumerate() {
                let win = &x.values()[*offset..offset + 200];
                m[w] += mean(win);
                v[w] += sample_autocov(win, 0);
            }
        }
        for w in 1..3 {
            assert!((m[w] - m[0]).abs() / f64::from(reps) < 0.05);
            assert!((v[w] - v[0]).abs() / f64::from(reps) < 0.08);
        }
    }
}
