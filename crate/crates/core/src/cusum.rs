//! CUSUM change-point statistic
//!
//!   C_{m,n}(k) = sum_{i=m..k} x_i - (k-m+1)/nbar * sum_{i=m..n} x_i
//!
//! where nbar = n-m+1 is the subsample length: a subsample is treated as a
//! fresh sample of its own length, which is how the split test applies the
//! statistic to each side of the estimated break.

use crate::error::{Error, Result};
use crate::series::{check_range, Series};

/// Profile of C_{m,n}(k) for k = m..=n, computed in one pass over a prefix
/// sum. The final entry is exactly zero by construction.
pub fn cusum_profile(x: &Series, m: usize, n: usize) -> Result<Vec<f64>> {
    check_range(x.len(), m, n)?;
    let vals = &x.values()[m - 1..n];
    let len = vals.len() as f64;
    let total: f64 = vals.iter().sum();
    let mut out = Vec::with_capacity(vals.len());
    let mut prefix = 0.0;
    for (t, v) in vals.iter().enumerate() {
        prefix += v;
        let frac = (t + 1) as f64 / len;
        out.push(prefix - frac * total);
    }
    Ok(out)
}

/// Smallest k in 1..=n at which |C_{1,n}(k)| attains its maximum.
///
/// C_{1,n}(n) = 0, so k = n can only win when the profile is identically
/// zero, in which case the tie-break returns 1 anyway.
pub fn estimate_changepoint_cusum(x: &Series) -> Result<usize> {
    let n = x.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "change-point estimation needs n >= 2, got {n}"
        )));
    }
    let profile = cusum_profile(x, 1, n)?;
    let mut best_k = 1;
    let mut best = profile[0].abs();
    for (idx, c) in profile.iter().enumerate().skip(1) {
        if c.abs() > best {
            best = c.abs();
            best_k = idx + 1;
        }
    }
    Ok(best_k)
}

/// n^{-1/2} max_{1<=k<=n} |C_{1,n}(k)|, the unstudentized CUSUM statistic of
/// a sample; dividing by a long-run standard deviation yields the
/// CUSUM-type test statistic.
pub fn t_statistic_cusum(x: &Series) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "the scaled maximum statistic needs n >= 2, got {n}"
        )));
    }
    let profile = cusum_profile(x, 1, n)?;
    let max = profile.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
    Ok(max / (n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn series(vals: &[f64]) -> Series {
        Series::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn three_point_profile_by_hand() {
        let x = series(&[1.0, 2.0, 3.0]);
        let p = cusum_profile(&x, 1, 3).unwrap();
        assert!((p[0] - (-1.0)).abs() < 1e-15);
        assert!((p[1] - (-1.0)).abs() < 1e-15);
        assert_eq!(p[2], 0.0);
    }

    #[test]
    fn constant_series_profile_is_zero() {
        let x = series(&[3.5; 7]);
        for c in cusum_profile(&x, 1, 7).unwrap() {
            assert!(c.abs() < 1e-12);
        }
        assert_eq!(estimate_changepoint_cusum(&x).unwrap(), 1);
    }

    #[test]
    fn last_entry_is_exactly_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(1..=400);
            let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1e6..1e6)).collect();
            let p = cusum_profile(&series(&vals), 1, n).unwrap();
            assert_eq!(*p.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn matches_naive_resummation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 500;
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let x = series(&vals);
        let m = 37;
        let hi = 460;
        let p = cusum_profile(&x, m, hi).unwrap();
        let sub = &vals[m - 1..hi];
        let nbar = sub.len() as f64;
        let total: f64 = sub.iter().sum();
        let scale = nbar * vals.iter().map(|v| v.abs()).fold(0.0_f64, f64::max);
        for (idx, c) in p.iter().enumerate() {
            let naive: f64 =
                sub[..=idx].iter().sum::<f64>() - (idx + 1) as f64 / nbar * total;
            assert!(
                (c - naive).abs() <= 1e-9 * scale.max(1.0),
                "k={} fast={} naive={}",
                idx + 1,
                c,
                naive
            );
        }
    }

    #[test]
    fn location_invariance_within_float_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200;
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let shift = 123.25;
        let shifted: Vec<f64> = vals.iter().map(|v| v + shift).collect();
        let a = cusum_profile(&series(&vals), 1, n).unwrap();
        let b = cusum_profile(&series(&shifted), 1, n).unwrap();
        let tol = 1e-9 * n as f64 * shift.abs();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= tol);
        }
    }

    #[test]
    fn block_shift_estimate_and_value() {
        let x = series(&[0.0, 0.0, 0.0, 10.0, 10.0, 10.0]);
        let p = cusum_profile(&x, 1, 6).unwrap();
        // prefix(3) = 0, share = (3/6)*30 = 15.
        assert!((p[2] - (-15.0)).abs() < 1e-12);
        assert_eq!(estimate_changepoint_cusum(&x).unwrap(), 3);
    }

    #[test]
    fn t_statistic_of_block_shift() {
        let x = series(&[0.0, 0.0, 0.0, 10.0, 10.0, 10.0]);
        let t = t_statistic_cusum(&x).unwrap();
        assert!((t - 15.0 / 6.0_f64.sqrt()).abs() < 1e-12);
        assert!(t_statistic_cusum(&series(&[1.0])).is_err());
    }
}
