//! Variance decomposition over contiguous partitions and bullwhip ratios.
//!
//! For a series split into `M` consecutive subsets of `k` observations, the
//! population variance of the whole series splits exactly into
//!
//! ```text
//! total = within + between
//! within  = mean over subsets of the subset population variance
//! between = population variance of the subset means
//! ```
//!
//! The bullwhip ratio of an (orders, demands) pair is the plain variance
//! ratio Var(orders) / Var(demands). [`subset_ratios_weighted`] relates the
//! per-subset ratios to the within-level ratio: weighting each subset ratio
//! by its share of within-subset demand variance recovers
//! `within_orders / within_demands` exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{partition, population_variance_of, Series};

/// Exact split of a series' population variance across a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceDecomposition {
    /// Observations per subset.
    pub k: usize,
    /// Number of subsets.
    pub subset_count: usize,
    /// Population variance of the full series.
    pub total: f64,
    /// Mean of the subset population variances.
    pub within: f64,
    /// Population variance of the subset means.
    pub between: f64,
    /// Population variance of each subset, in period order.
    pub subset_variances: Vec<f64>,
    /// Mean of each subset, in period order.
    pub subset_means: Vec<f64>,
}

/// Per-subset bullwhip ratios together with the demand-variance weights
/// that tie them to the within-level ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetBullwhip {
    /// Observations per subset.
    pub k: usize,
    /// Var(order subset j) / Var(demand subset j), in period order.
    pub subset_ratios: Vec<f64>,
    /// Demand-variance share of each subset; sums to 1.
    pub weights: Vec<f64>,
    /// Weighted average of `subset_ratios` under `weights`. Equals
    /// `within_orders / within_demands` up to rounding.
    pub weighted_ratio: f64,
}

/// Splits the population variance of `series` across contiguous subsets of
/// size `k`.
///
/// `total` is computed directly from the full series; the identity
/// `total = within + between` then holds analytically and is verified by
/// tests rather than enforced by construction.
pub fn decompose_variance(series: &Series, k: usize) -> Result<VarianceDecomposition> {
    let parts = partition(series, k)?;
    let subset_variances: Vec<f64> = parts
        .subsets()
        .iter()
        .map(Series::population_variance)
        .collect();
    let subset_means: Vec<f64> = parts.subsets().iter().map(Series::mean).collect();
    let m = parts.subset_count() as f64;
    let within = subset_variances.iter().sum::<f64>() / m;
    let between = population_variance_of(&subset_means);
    Ok(VarianceDecomposition {
        k,
        subset_count: parts.subset_count(),
        total: series.population_variance(),
        within,
        between,
        subset_variances,
        subset_means,
    })
}

/// Var(orders) / Var(demands) over the full horizon.
///
/// The two series must have equal length; demand variance must be nonzero.
pub fn bullwhip_ratio(orders: &Series, demands: &Series) -> Result<f64> {
    check_lengths(orders, demands)?;
    let var_d = demands.population_variance();
    if var_d == 0.0 {
        return Err(Error::DegenerateDemand {
            context: "full-horizon demand variance".into(),
        });
    }
    Ok(orders.population_variance() / var_d)
}

/// Per-subset ratios and their demand-variance weights for subsets of
/// size `k`.
///
/// Every demand subset must have nonzero variance, otherwise its ratio is
/// undefined and the offending subset index is reported.
pub fn subset_ratios_weighted(
    orders: &Series,
    demands: &Series,
    k: usize,
) -> Result<SubsetBullwhip> {
    check_lengths(orders, demands)?;
    let order_parts = partition(orders, k)?;
    let demand_parts = partition(demands, k)?;

    let demand_vars: Vec<f64> = demand_parts
        .subsets()
        .iter()
        .map(Series::population_variance)
        .collect();
    if let Some(index) = demand_vars.iter().position(|&v| v == 0.0) {
        return Err(Error::DegenerateSubset { index });
    }

    let total_demand_var: f64 = demand_vars.iter().sum();
    let subset_ratios: Vec<f64> = order_parts
        .subsets()
        .iter()
        .zip(&demand_vars)
        .map(|(o, &vd)| o.population_variance() / vd)
        .collect();
    let weights: Vec<f64> = demand_vars.iter().map(|&v| v / total_demand_var).collect();
    let weighted_ratio = subset_ratios.iter().zip(&weights).map(|(r, w)| r * w).sum();

    Ok(SubsetBullwhip {
        k,
        subset_ratios,
        weights,
        weighted_ratio,
    })
}

pub(crate) fn check_lengths(orders: &Series, demands: &Series) -> Result<()> {
    if orders.len() != demands.len() {
        return Err(Error::LengthMismatch {
            left: orders.len(),
            right: demands.len(),
        });
    }
    Ok(())
}
