//! Seasonal structure and its effect on the bullwhip ratio.
//!
//! The decomposition is the classic dummy-variable one: the seasonal
//! component repeats the centered phase means, the adjusted component is
//! the remainder. Fitted this way the two components are exactly
//! uncorrelated in sample, so the input variance splits additively. When
//! orders and demand carry the same seasonal component, the full-series
//! ratio is a variance-weighted mediant of the adjusted ratio and 1, which
//! pulls every measured ratio toward 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;
use crate::stats::check_lengths;

/// Relative tolerance for calling the adjusted ratio exactly 1.
pub const RELATION_EPS: f64 = 1e-9;

/// One series split into a repeating seasonal part and the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalDecomposition {
    /// Length of the repeating pattern.
    pub period: usize,
    /// Centered phase means, one per phase; sums to zero.
    pub indices: Vec<f64>,
    /// The seasonal component: `indices[t % period]` at every `t`.
    pub seasonal: Series,
    /// Input minus seasonal.
    pub adjusted: Series,
    /// Population variance of the seasonal component.
    pub var_seasonal: f64,
    /// Population variance of the adjusted component.
    pub var_adjusted: f64,
}

/// Where the full-series ratio sits relative to the adjusted ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeasonalRelation {
    /// Adjusted ratio above 1: shared seasonality drags the ratio down
    /// toward 1.
    TowardOneFromAbove,
    /// Adjusted ratio below 1: shared seasonality lifts the ratio up
    /// toward 1.
    TowardOneFromBelow,
    /// Adjusted ratio indistinguishable from 1; seasonality changes
    /// nothing.
    ExactlyOne,
}

impl std::fmt::Display for SeasonalRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            SeasonalRelation::TowardOneFromAbove => "TowardOneFromAbove",
            SeasonalRelation::TowardOneFromBelow => "TowardOneFromBelow",
            SeasonalRelation::ExactlyOne => "ExactlyOne",
        };
        f.write_str(label)
    }
}

/// Seasonal comparison of an (orders, demand) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalityReport {
    /// Length of the repeating pattern.
    pub period: usize,
    /// Whether orders were adjusted with the demand-fitted seasonal
    /// component (the model this crate's identities assume) or with their
    /// own fit.
    pub shared_seasonal: bool,
    /// Var(orders) / Var(demand) on the raw series.
    pub r_all: f64,
    /// Ratio of the seasonally adjusted series.
    pub r_adjusted: f64,
    /// Seasonal variance of the demand fit.
    pub var_seasonal_demand: f64,
    /// Adjusted demand variance.
    pub var_adjusted_demand: f64,
    /// Seasonal variance of the orders' own fit; only present in
    /// per-series mode.
    pub var_seasonal_orders: Option<f64>,
    /// Adjusted order variance.
    pub var_adjusted_orders: f64,
    /// The mediant `(r_adjusted * var_adjusted_demand + var_seasonal) /
    /// (var_adjusted_demand + var_seasonal)`; only present in shared mode,
    /// where the identity is meaningful.
    pub predicted_r_all: Option<f64>,
    /// Classification of `r_adjusted` against 1.
    pub relation: SeasonalRelation,
    /// Whether `r_all` indeed lies between `r_adjusted` and 1 (inclusive,
    /// up to [`RELATION_EPS`]). Guaranteed when both series truly share
    /// one seasonal pattern; sampling noise in real data can break it,
    /// which is worth surfacing rather than asserting away.
    pub relation_consistent: bool,
}

/// Splits a series into a `period`-repeating component and the remainder.
///
/// Requires `period >= 2` and at least two full cycles of data. The two
/// components are exactly uncorrelated in sample, so
/// `var_seasonal + var_adjusted` reproduces the input variance.
pub fn seasonal_decompose(series: &Series, period: usize) -> Result<SeasonalDecomposition> {
    if period < 2 {
        return Err(Error::InvalidPeriod { period });
    }
    let t = series.len();
    if t < 2 * period {
        return Err(Error::InsufficientData {
            required: 2 * period,
            actual: t,
        });
    }

    let values = series.values();
    let mut phase_means = vec![0.0_f64; period];
    for (q, mean) in phase_means.iter_mut().enumerate() {
        let phase: Vec<f64> = values.iter().skip(q).step_by(period).copied().collect();
        *mean = phase.iter().sum::<f64>() / phase.len() as f64;
    }
    // Centering by the mean of the phase means keeps the indices summing
    // to zero even when the horizon is not a whole number of cycles.
    let center = phase_means.iter().sum::<f64>() / period as f64;
    let indices: Vec<f64> = phase_means.iter().map(|m| m - center).collect();

    let seasonal_values: Vec<f64> = (0..t).map(|i| indices[i % period]).collect();
    let adjusted_values: Vec<f64> = values
        .iter()
        .zip(&seasonal_values)
        .map(|(x, s)| x - s)
        .collect();
    let seasonal = Series::new(seasonal_values)?;
    let adjusted = Series::new(adjusted_values)?;
    let var_seasonal = seasonal.population_variance();
    let var_adjusted = adjusted.population_variance();
    Ok(SeasonalDecomposition {
        period,
        indices,
        seasonal,
        adjusted,
        var_seasonal,
        var_adjusted,
    })
}

/// Full-series ratio implied by an adjusted ratio and a shared seasonal
/// variance.
///
/// The result is a weighted mediant of `r_adjusted` and 1: equal to
/// `r_adjusted` at `var_seasonal = 0` and approaching 1 as the seasonal
/// share grows.
pub fn seasonality_effect(
    r_adjusted: f64,
    var_seasonal: f64,
    var_adjusted_demand: f64,
) -> Result<f64> {
    if !r_adjusted.is_finite() || r_adjusted < 0.0 {
        return Err(Error::InvalidArgument {
            reason: format!("r_adjusted must be a finite non-negative number, got {r_adjusted}"),
        });
    }
    if !var_seasonal.is_finite() || var_seasonal < 0.0 {
        return Err(Error::InvalidArgument {
            reason: format!(
                "var_seasonal must be a finite non-negative number, got {var_seasonal}"
            ),
        });
    }
    if !var_adjusted_demand.is_finite() || var_adjusted_demand <= 0.0 {
        return Err(Error::DegenerateDemand {
            context: "adjusted demand variance must be positive".into(),
        });
    }
    Ok((r_adjusted * var_adjusted_demand + var_seasonal) / (var_adjusted_demand + var_seasonal))
}

/// Compares the raw ratio of a pair against its seasonally adjusted ratio.
///
/// With `shared_seasonal` set (the default in the CLI), orders are
/// adjusted by the demand-fitted seasonal component, matching the model in
/// which both sides carry the same pattern. Otherwise each series gets its
/// own fit.
pub fn classify_seasonality(
    orders: &Series,
    demands: &Series,
    period: usize,
    shared_seasonal: bool,
) -> Result<SeasonalityReport> {
    check_lengths(orders, demands)?;
    let demand_fit = seasonal_decompose(demands, period)?;
    if demand_fit.var_adjusted == 0.0 {
        return Err(Error::DegenerateDemand {
            context: "seasonally adjusted demand variance".into(),
        });
    }

    let (order_adjusted, var_seasonal_orders) = if shared_seasonal {
        let values: Vec<f64> = orders
            .values()
            .iter()
            .zip(demand_fit.seasonal.values())
            .map(|(o, s)| o - s)
            .collect();
        (Series::new(values)?, None)
    } else {
        let order_fit = seasonal_decompose(orders, period)?;
        (order_fit.adjusted, Some(order_fit.var_seasonal))
    };

    let var_adjusted_orders = order_adjusted.population_variance();
    let r_adjusted = var_adjusted_orders / demand_fit.var_adjusted;
    let var_demand = demands.population_variance();
    if var_demand == 0.0 {
        return Err(Error::DegenerateDemand {
            context: "full-horizon demand variance".into(),
        });
    }
    let r_all = orders.population_variance() / var_demand;
    let predicted_r_all = if shared_seasonal {
        Some(seasonality_effect(
            r_adjusted,
            demand_fit.var_seasonal,
            demand_fit.var_adjusted,
        )?)
    } else {
        None
    };

    let tol = RELATION_EPS * r_adjusted.max(1.0);
    let relation = if (r_adjusted - 1.0).abs() <= tol {
        SeasonalRelation::ExactlyOne
    } else if r_adjusted > 1.0 {
        SeasonalRelation::TowardOneFromAbove
    } else {
        SeasonalRelation::TowardOneFromBelow
    };
    let lo = r_adjusted.min(1.0) - tol;
    let hi = r_adjusted.max(1.0) + tol;
    let relation_consistent = r_all >= lo && r_all <= hi;

    Ok(SeasonalityReport {
        period,
        shared_seasonal,
        r_all,
        r_adjusted,
        var_seasonal_demand: demand_fit.var_seasonal,
        var_adjusted_demand: demand_fit.var_adjusted,
        var_seasonal_orders,
        var_adjusted_orders,
        predicted_r_all,
        relation,
        relation_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alternating_series_splits_completely() {
        let s = Series::from_slice(&[10.0, 0.0, 10.0, 0.0]).unwrap();
        let fit = seasonal_decompose(&s, 2).unwrap();
        assert_eq!(fit.indices, vec![5.0, -5.0]);
        assert_eq!(fit.seasonal.values(), &[5.0, -5.0, 5.0, -5.0]);
        assert_eq!(fit.adjusted.values(), &[5.0, 5.0, 5.0, 5.0]);
        assert_relative_eq!(fit.var_seasonal, 25.0, max_relative = 1e-12);
        assert_eq!(fit.var_adjusted, 0.0);
    }

    #[test]
    fn decomposition_invariants_with_partial_last_cycle() {
        // 11 observations, period 4: phases have unequal counts.
        let values = [12.0, 3.0, 7.0, 9.0, 14.0, 2.0, 8.0, 11.0, 13.0, 4.0, 6.0];
        let s = Series::from_slice(&values).unwrap();
        let fit = seasonal_decompose(&s, 4).unwrap();

        // Indices sum to zero by construction.
        assert!(fit.indices.iter().sum::<f64>().abs() < 1e-12);

        // Reconstruction is elementwise exact up to one rounding step.
        for ((x, sv), av) in values
            .iter()
            .zip(fit.seasonal.values())
            .zip(fit.adjusted.values())
        {
            assert!((x - (sv + av)).abs() <= 1e-12);
        }

        // Components are uncorrelated in sample, so variances add.
        let total = s.population_variance();
        assert_relative_eq!(
            fit.var_seasonal + fit.var_adjusted,
            total,
            max_relative = 1e-12
        );
        let t = values.len() as f64;
        let mean_s = fit.seasonal.mean();
        let mean_a = fit.adjusted.mean();
        let cov: f64 = fit
            .seasonal
            .values()
            .iter()
            .zip(fit.adjusted.values())
            .map(|(a, b)| (a - mean_s) * (b - mean_a))
            .sum::<f64>()
            / t;
        assert!(cov.abs() <= 1e-9 * total.max(1.0));
    }

    #[test]
    fn decompose_preconditions() {
        let s = Series::from_slice(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            seasonal_decompose(&s, 1),
            Err(Error::InvalidPeriod { period: 1 })
        ));
        assert!(matches!(
            seasonal_decompose(&s, 3),
            Err(Error::InsufficientData {
                required: 6,
                actual: 4
            })
        ));
    }

    #[test]
    fn effect_formula_hand_values() {
        // Equal adjusted and seasonal variance halves the distance to 1.
        assert_relative_eq!(
            seasonality_effect(2.0, 1.0, 1.0).unwrap(),
            1.5,
            max_relative = 1e-12
        );
        // No seasonality leaves the ratio alone.
        assert_relative_eq!(
            seasonality_effect(2.0, 0.0, 1.0).unwrap(),
            2.0,
            max_relative = 1e-12
        );
        // Overwhelming seasonality pushes toward 1 from either side.
        assert!((seasonality_effect(4.0, 1.0e9, 1.0).unwrap() - 1.0).abs() < 1e-8);
        assert!((seasonality_effect(0.25, 1.0e9, 1.0).unwrap() - 1.0).abs() < 1e-8);

        assert!(seasonality_effect(2.0, 1.0, 0.0).is_err());
        assert!(seasonality_effect(-1.0, 1.0, 1.0).is_err());
        assert!(seasonality_effect(2.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn shared_pattern_classification() {
        // Demand: a base with zero phase means plus a period-3 pattern.
        // Orders: the base amplified threefold plus the same pattern, so
        // the adjusted ratio is exactly 9 and the raw ratio must sit
        // between 1 and 9.
        let base = [1.0, -2.0, 0.5, 2.0, -1.5, 0.0, -3.0, 3.5, -0.5];
        let pattern = [6.0, -3.0, -3.0];
        let demand: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(i, b)| 10.0 + b + pattern[i % 3])
            .collect();
        let orders: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(i, b)| 10.0 + 3.0 * b + pattern[i % 3])
            .collect();
        let demand = Series::new(demand).unwrap();
        let orders = Series::new(orders).unwrap();

        let report = classify_seasonality(&orders, &demand, 3, true).unwrap();
        assert_eq!(report.relation, SeasonalRelation::TowardOneFromAbove);
        assert!(report.relation_consistent);
        assert!(report.r_all > 1.0 && report.r_all < report.r_adjusted);
        assert_relative_eq!(report.r_adjusted, 9.0, max_relative = 1e-9);
        // The base has zero phase means, so the demand fit recovers the
        // injected pattern exactly and the mediant identity is exact.
        assert_relative_eq!(
            report.predicted_r_all.unwrap(),
            report.r_all,
            max_relative = 1e-9
        );
        assert!(report.var_seasonal_orders.is_none());

        // Dampened orders approach 1 from below.
        let damped: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(i, b)| 10.0 + 0.5 * b + pattern[i % 3])
            .collect();
        let damped = Series::new(damped).unwrap();
        let report = classify_seasonality(&damped, &demand, 3, true).unwrap();
        assert_eq!(report.relation, SeasonalRelation::TowardOneFromBelow);
        assert!(report.relation_consistent);
    }

    #[test]
    fn identical_series_are_exactly_one() {
        let values = [9.0, 5.0, 8.0, 6.0, 7.0, 9.0, 8.0, 6.0];
        let s = Series::from_slice(&values).unwrap();
        let report = classify_seasonality(&s, &s, 2, true).unwrap();
        assert_eq!(report.relation, SeasonalRelation::ExactlyOne);
        assert!(report.relation_consistent);
        assert_relative_eq!(report.r_all, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn per_series_mode_reports_the_order_fit() {
        let demand = Series::from_slice(&[10.0, 2.0, 11.0, 1.0, 9.0, 3.0]).unwrap();
        let orders = Series::from_slice(&[14.0, -2.0, 16.0, -4.0, 12.0, 0.0]).unwrap();
        let report = classify_seasonality(&orders, &demand, 2, false).unwrap();
        assert!(report.var_seasonal_orders.is_some());
        assert!(report.predicted_r_all.is_none());
        assert!(report.var_seasonal_orders.unwrap() > report.var_seasonal_demand);
    }

    #[test]
    fn degenerate_adjusted_demand_errors() {
        // Purely seasonal demand: adjusting removes everything.
        let demand = Series::from_slice(&[10.0, 0.0, 10.0, 0.0]).unwrap();
        let orders = Series::from_slice(&[9.0, 1.0, 8.0, 2.0]).unwrap();
        let err = classify_seasonality(&orders, &demand, 2, true).unwrap_err();
        assert!(matches!(err, Error::DegenerateDemand { .. }));
        assert!(err.to_string().contains("adjusted"));
    }

    mod proptests {
        use super::*;
        use proptest::prelude::*;

        fn series_with_period() -> impl Strategy<Value = (Vec<f64>, usize)> {
            (2usize..=12).prop_flat_map(|period| {
                (
                    prop::collection::vec(-1.0e3..1.0e3_f64, (2 * period)..=120),
                    Just(period),
                )
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(300))]

            #[test]
            fn decomposition_is_exact_and_orthogonal((values, period) in series_with_period()) {
                let s = Series::new(values.clone()).unwrap();
                let fit = seasonal_decompose(&s, period).unwrap();

                for ((x, sv), av) in values
                    .iter()
                    .zip(fit.seasonal.values())
                    .zip(fit.adjusted.values())
                {
                    prop_assert!((x - (sv + av)).abs() <= 1e-9 * x.abs().max(1.0));
                }

                let total = s.population_variance();
                let split = fit.var_seasonal + fit.var_adjusted;
                prop_assert!((split - total).abs() <= 1e-9 * total.max(1.0),
                    "variance split {split} vs total {total}");

                // Seasonal part repeats with the requested period.
                for (i, v) in fit.seasonal.values().iter().enumerate() {
                    prop_assert_eq!(*v, fit.indices[i % period]);
                }
            }

            #[test]
            fn effect_is_between_the_ratio_and_one(
                r in 0.01..100.0_f64,
                var_s in 0.0..1.0e4_f64,
                var_d in 0.001..1.0e4_f64,
            ) {
                let out = seasonality_effect(r, var_s, var_d).unwrap();
                let lo = r.min(1.0) - 1e-12;
                let hi = r.max(1.0) + 1e-12;
                prop_assert!(out >= lo && out <= hi, "{out} outside [{lo}, {hi}]");
            }

            #[test]
            fn effect_is_monotone_in_seasonal_share(
                r in 0.01..100.0_f64,
                var_d in 0.001..1.0e4_f64,
            ) {
                // Increasing seasonal variance moves the result strictly
                // toward 1 for any ratio away from 1.
                let grid: Vec<f64> = (0..50).map(|i| i as f64 * 3.0).collect();
                let outs: Vec<f64> = grid
                    .iter()
                    .map(|&s| seasonality_effect(r, s, var_d).unwrap())
                    .collect();
                for pair in outs.windows(2) {
                    if r > 1.0 {
                        prop_assert!(pair[1] <= pair[0] + 1e-12);
                    } else if r < 1.0 {
                        prop_assert!(pair[1] >= pair[0] - 1e-12);
                    }
                }
            }
        }
    }
}
