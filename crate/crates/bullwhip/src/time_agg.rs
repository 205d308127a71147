//! Bullwhip behaviour under time aggregation.
//!
//! Aggregating `k` consecutive periods into one turns a series of length
//! `T = M * k` into the `M` subset sums. The ratio of aggregated variances
//! equals the ratio of subset-mean variances (`r_agg = r_avg`, the factor
//! `k^2` cancels), and the non-aggregated ratio always lies between the
//! within-level ratio `r_within` and `r_avg`. Aggregation therefore raises
//! the measured ratio exactly when `r_avg > r_within`, lowers it when
//! `r_avg < r_within`, and keeps it when the two coincide.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{partition, Series};
use crate::stats::{check_lengths, decompose_variance, VarianceDecomposition};

/// Strictness threshold used for [`AggregationReport::strict_effect`] and
/// the default for CLI classification.
pub const STRICT_MAINTAIN_EPS: f64 = 1e-9;

/// Direction in which time aggregation moves the measured bullwhip ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AggregationEffect {
    /// Aggregated ratio exceeds the non-aggregated ratio.
    Increase,
    /// Aggregated ratio falls below the non-aggregated ratio.
    Decrease,
    /// The two ratios agree within the tolerance band.
    Maintain,
}

impl std::fmt::Display for AggregationEffect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            AggregationEffect::Increase => "Increase",
            AggregationEffect::Decrease => "Decrease",
            AggregationEffect::Maintain => "Maintain",
        };
        f.write_str(label)
    }
}

/// Everything measured about one aggregation level `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationReport {
    /// Periods merged per aggregated observation.
    pub k: usize,
    /// Aggregated observations (`M = T / k`).
    pub subset_count: usize,
    /// Var(orders) / Var(demands) on the raw series.
    pub r_non_agg: f64,
    /// Var(aggregated orders) / Var(aggregated demands).
    pub r_agg: f64,
    /// Ratio of between-subset variances (variance of subset means).
    /// Coincides with `r_agg` analytically.
    pub r_avg: f64,
    /// Ratio of within-subset variances.
    pub r_within: f64,
    /// Full decomposition of the demand series at this `k`.
    pub demand_decomposition: VarianceDecomposition,
    /// Full decomposition of the order series at this `k`.
    pub order_decomposition: VarianceDecomposition,
    /// Classification at `maintain_eps`.
    pub effect: AggregationEffect,
    /// Classification at the fixed [`STRICT_MAINTAIN_EPS`] band.
    pub strict_effect: AggregationEffect,
    /// Relative half-width of the band treated as "no change".
    pub maintain_eps: f64,
    /// Whether `effect` agrees with a direct comparison of `r_agg`
    /// against `r_non_agg` at the same tolerance. Holds analytically;
    /// recorded so downstream consumers can audit rounding behaviour.
    pub consistent: bool,
}

/// Sums each block of `k` consecutive observations.
///
/// The result has `T / k` observations; the length must divide exactly.
pub fn aggregate_series(series: &Series, k: usize) -> Result<Series> {
    let parts = partition(series, k)?;
    let sums: Vec<f64> = parts
        .subsets()
        .iter()
        .map(|s| s.values().iter().sum())
        .collect();
    Series::new(sums)
}

/// Bullwhip ratio of the `k`-aggregated series pair.
///
/// Aggregation can collapse a varying series to a constant one (and always
/// does at `k = T`), in which case the aggregated demand variance is zero
/// and the ratio is undefined.
pub fn aggregated_bullwhip(orders: &Series, demands: &Series, k: usize) -> Result<f64> {
    check_lengths(orders, demands)?;
    let agg_orders = aggregate_series(orders, k)?;
    let agg_demands = aggregate_series(demands, k)?;
    let var_d = agg_demands.population_variance();
    if var_d == 0.0 {
        return Err(Error::DegenerateDemand {
            context: format!("aggregated demand variance at k={k}"),
        });
    }
    Ok(agg_orders.population_variance() / var_d)
}

/// Classifies what aggregating `k` periods does to the bullwhip ratio.
///
/// `maintain_eps` is the relative half-width of the "no change" band:
/// the effect is `Maintain` when
/// `|r_avg - r_within| <= maintain_eps * max(r_avg, r_within)`.
/// The report also carries the classification at the strict default band
/// so that a widened band never hides the underlying direction.
pub fn classify_aggregation_effect(
    orders: &Series,
    demands: &Series,
    k: usize,
    maintain_eps: f64,
) -> Result<AggregationReport> {
    if !maintain_eps.is_finite() || maintain_eps < 0.0 {
        return Err(Error::InvalidArgument {
            reason: format!("maintain_eps must be finite and non-negative, got {maintain_eps}"),
        });
    }
    check_lengths(orders, demands)?;
    let demand_decomposition = decompose_variance(demands, k)?;
    let order_decomposition = decompose_variance(orders, k)?;

    if demand_decomposition.within == 0.0 {
        return Err(Error::DegenerateDemand {
            context: format!("within-subset demand variance at k={k}"),
        });
    }
    if demand_decomposition.between == 0.0 {
        return Err(Error::DegenerateDemand {
            context: format!("between-subset demand variance at k={k}"),
        });
    }

    let r_non_agg = order_decomposition.total / demand_decomposition.total;
    let r_within = order_decomposition.within / demand_decomposition.within;
    let r_avg = order_decomposition.between / demand_decomposition.between;
    // Computed from the actual subset sums rather than derived from r_avg,
    // so the analytic identity between the two stays observable.
    let r_agg = aggregated_bullwhip(orders, demands, k)?;

    let effect = classify(r_avg, r_within, maintain_eps);
    let strict_effect = classify(r_avg, r_within, STRICT_MAINTAIN_EPS);
    let consistent = effect == classify(r_agg, r_non_agg, maintain_eps);

    Ok(AggregationReport {
        k,
        subset_count: demand_decomposition.subset_count,
        r_non_agg,
        r_agg,
        r_avg,
        r_within,
        demand_decomposition,
        order_decomposition,
        effect,
        strict_effect,
        maintain_eps,
        consistent,
    })
}

fn classify(upper: f64, lower: f64, eps: f64) -> AggregationEffect {
    let band = eps * upper.max(lower);
    if (upper - lower).abs() <= band {
        AggregationEffect::Maintain
    } else if upper > lower {
        AggregationEffect::Increase
    } else {
        AggregationEffect::Decrease
    }
}

/// Result of one aggregation level inside [`sweep_aggregation`].
#[derive(Debug)]
pub struct SweepOutcome {
    /// Aggregation level attempted.
    pub k: usize,
    /// Trailing observations dropped before classification.
    pub dropped: usize,
    /// Classification, or the per-level error (indivisible length,
    /// degenerate variance) that prevented it.
    pub result: Result<AggregationReport>,
}

/// Runs [`classify_aggregation_effect`] across several aggregation levels.
///
/// With `truncate` set, each level first drops `T mod k` trailing
/// observations from both series so any `k <= T` is admissible. Per-level
/// failures are collected, not propagated, so one bad level cannot mask
/// the others.
pub fn sweep_aggregation(
    orders: &Series,
    demands: &Series,
    ks: &[usize],
    maintain_eps: f64,
    truncate: bool,
) -> Vec<SweepOutcome> {
    ks.iter()
        .map(|&k| {
            let result = sweep_one(orders, demands, k, maintain_eps, truncate);
            match result {
                Ok((dropped, report)) => SweepOutcome {
                    k,
                    dropped,
                    result: Ok(report),
                },
                Err(err) => SweepOutcome {
                    k,
                    dropped: 0,
                    result: Err(err),
                },
            }
        })
        .collect()
}

fn sweep_one(
    orders: &Series,
    demands: &Series,
    k: usize,
    maintain_eps: f64,
    truncate: bool,
) -> Result<(usize, AggregationReport)> {
    check_lengths(orders, demands)?;
    if !truncate || k == 0 || orders.len().is_multiple_of(k) {
        return Ok((
            0,
            classify_aggregation_effect(orders, demands, k, maintain_eps)?,
        ));
    }
    if orders.len() < k {
        return Err(Error::IndivisibleLength {
            len: orders.len(),
            k,
        });
    }
    let dropped = orders.len() % k;
    let kept = orders.len() - dropped;
    let orders_cut = Series::from_slice(&orders.values()[..kept])?;
    let demands_cut = Series::from_slice(&demands.values()[..kept])?;
    let report = classify_aggregation_effect(&orders_cut, &demands_cut, k, maintain_eps)?;
    Ok((dropped, report))
}
