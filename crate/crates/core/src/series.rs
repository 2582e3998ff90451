use crate::error::{Error, Result};

/// An ordered sample of real observations.
///
/// Construction validates that the sample is non-empty and every entry is
/// finite, so downstream code can rely on `partial_cmp` never failing.
/// Index arguments elsewhere in the crate (`m`, `n`, `k`) are 1-based,
/// matching the usual change-point notation X_1, ..., X_n.
#[derive(Debug, Clone, PartialEq)]
pub struct Series(Vec<f64>);

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("series must contain at least one value"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "series entry {} is not finite: {}",
                pos + 1,
                values[pos]
            )));
        }
        Ok(Series(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Sub-series covering 1-based positions `m..=n`.
    pub fn segment(&self, m: usize, n: usize) -> Result<Series> {
        check_range(self.len(), m, n)?;
        Ok(Series(self.0[m - 1..n].to_vec()))
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Series {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Validates a 1-based subrange `m..=n` against a series of length `len`.
pub(crate) fn check_range(len: usize, m: usize, n: usize) -> Result<()> {
    if m < 1 || m > n || n > len {
        return Err(Error::invalid(format!(
            "subrange m={m}, n={n} is not within 1 <= m <= n <= {len}"
        )));
    }
    Ok(())
}
