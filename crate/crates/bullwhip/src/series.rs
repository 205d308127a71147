//! Time series container and contiguous equal-size partitions.
//!
//! [`Series`] is the input type for every analysis in this crate. Its
//! constructor enforces the two invariants the numeric code relies on:
//! at least one observation, and every observation finite. Variances use a
//! single-pass updating scheme that avoids the cancellation a naive
//! sum-of-squares approach suffers on large means.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which variance denominator to use.
///
/// Every decomposition and ratio in this crate is defined in terms of
/// population variance; the sample mode exists for callers that want the
/// unbiased estimate of the same data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarianceMode {
    /// Divide by the number of observations.
    Population,
    /// Divide by one less than the number of observations.
    Sample,
}

/// Ordered sequence of per-period observations (demand or order volumes).
///
/// Invariants: non-empty, all values finite. Serialized as a plain JSON
/// array of numbers; deserialization re-validates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    /// Validates and wraps a vector of observations.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSeries {
                reason: "series must contain at least one value".into(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries {
                reason: format!("non-finite value at index {pos}"),
            });
        }
        Ok(Self { values })
    }

    /// Convenience constructor copying from a slice.
    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    /// Observations in period order.
    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of observations. Always at least 1.
    #[must_use]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; the constructor rejects empty input. Provided so the
    /// type follows the usual `len`/`is_empty` convention.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Arithmetic mean.
    #[must_use]
    pub fn mean(&self) -> f64 {
        self.moments().0
    }

    /// Population variance: mean squared deviation from the mean.
    ///
    /// Returns 0 for a single observation.
    #[must_use]
    pub fn population_variance(&self) -> f64 {
        let (_, m2) = self.moments();
        m2 / self.values.len() as f64
    }

    /// Variance under the chosen denominator convention.
    ///
    /// In sample mode a single observation yields 0 rather than an
    /// undefined 0/0.
    #[must_use]
    pub fn variance(&self, mode: VarianceMode) -> f64 {
        let n = self.values.len();
        let (_, m2) = self.moments();
        match mode {
            VarianceMode::Population => m2 / n as f64,
            VarianceMode::Sample if n > 1 => m2 / (n - 1) as f64,
            VarianceMode::Sample => 0.0,
        }
    }

    /// Single-pass mean and centered sum of squares (Welford update).
    fn moments(&self) -> (f64, f64) {
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for (i, &x) in self.values.iter().enumerate() {
            let delta = x - mean;
            mean += delta / (i + 1) as f64;
            m2 += delta * (x - mean);
        }
        (mean, m2)
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Series> for Vec<f64> {
    fn from(series: Series) -> Self {
        series.values
    }
}

/// Contiguous equal-size split of a series into `subset_count` blocks of
/// `subset_size` consecutive observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    subset_size: usize,
    dropped: usize,
    subsets: Vec<Series>,
}

impl Partition {
    /// Number of subsets (`M` in the decomposition identities).
    #[must_use]
    pub fn subset_count(&self) -> usize {
        self.subsets.len()
    }

    /// Observations per subset (`k`).
    #[must_use]
    pub fn subset_size(&self) -> usize {
        self.subset_size
    }

    /// Trailing observations discarded to reach a multiple of `k`.
    /// Zero unless the partition was built with [`partition_truncating`].
    #[must_use]
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// The subsets, in period order.
    #[must_use]
    pub fn subsets(&self) -> &[Series] {
        &self.subsets
    }
}

/// Splits `series` into consecutive subsets of exactly `k` observations.
///
/// Fails with [`Error::IndivisibleLength`] when the length is not a
/// multiple of `k`.
pub fn partition(series: &Series, k: usize) -> Result<Partition> {
    let len = series.len();
    if k == 0 {
        return Err(Error::InvalidArgument {
            reason: "subset size k must be at least 1".into(),
        });
    }
    if !len.is_multiple_of(k) {
        return Err(Error::IndivisibleLength { len, k });
    }
    build_partition(series, k, 0)
}

/// Like [`partition`], but drops up to `k - 1` trailing observations so the
/// remainder always divides. Fails only when fewer than `k` observations
/// exist at all.
pub fn partition_truncating(series: &Series, k: usize) -> Result<Partition> {
    let len = series.len();
    if k == 0 {
        return Err(Error::InvalidArgument {
            reason: "subset size k must be at least 1".into(),
        });
    }
    if len < k {
        return Err(Error::IndivisibleLength { len, k });
    }
    build_partition(series, k, len % k)
}

fn build_partition(series: &Series, k: usize, dropped: usize) -> Result<Partition> {
    let kept = series.len() - dropped;
    let subsets = series.values()[..kept]
        .chunks_exact(k)
        .map(|chunk| Series::from_slice(chunk).expect("chunk of validated series is valid"))
        .collect();
    Ok(Partition {
        subset_size: k,
        dropped,
        subsets,
    })
}

/// Population variance of a bare slice. Used where intermediate values
/// (subset means, aggregated sums) are produced without a `Series` wrapper.
#[must_use]
pub(crate) fn population_variance_of(values: &[f64]) -> f64 {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    if values.is_empty() {
        0.0
    } else {
        m2 / values.len() as f64
    }
}
