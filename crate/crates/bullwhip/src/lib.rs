//! Variance analytics for order and demand series.
//!
//! The central quantity is the bullwhip ratio, the variance of orders
//! divided by the variance of the demand that drove them. This crate
//! measures how that ratio responds to three ways of pooling data:
//!
//! - time aggregation: summing each series over blocks of `k` periods
//!   ([`time_agg`]), grounded in an exact split of variance into
//!   within-subset and between-subset parts ([`stats`]);
//! - product aggregation: pooling several products into one series
//!   ([`product_agg`]), with eigenvalue bounds on the pooled ratio
//!   ([`eigen`]);
//! - seasonal adjustment: removing a periodic component before taking
//!   the ratio ([`seasonality`]).
//!
//! [`simulation`] generates AR(1) demand and order-up-to orders for
//! studying the effects on synthetic data, and [`report`] handles CSV
//! input and JSON/table output for the `bullwhip` binary.
//!
//! All variances are population variances unless a
//! [`VarianceMode`] says otherwise.
//!
//! # Example
//!
//! ```
//! use bullwhip::{classify_aggregation_effect, Series, STRICT_MAINTAIN_EPS};
//!
//! let orders = Series::from_slice(&[9.0, 5.0, 8.0, 6.0, 7.0, 10.0])?;
//! let demand = Series::from_slice(&[9.0, 5.0, 8.0, 6.0, 7.0, 9.0])?;
//! let report = classify_aggregation_effect(&orders, &demand, 2, STRICT_MAINTAIN_EPS)?;
//! assert!(report.r_non_agg > 1.0);
//! # Ok::<(), bullwhip::Error>(())
//! ```

pub mod eigen;
pub mod error;
pub mod product_agg;
pub mod replicate;
pub mod report;
pub mod seasonality;
pub mod series;
pub mod simulation;
pub mod stats;
pub mod time_agg;

pub use eigen::{symmetric_eigenvalues, SquareMatrix};
pub use error::{Error, Result};
pub use product_agg::{
    aggregate_products, covariance_matrix, covariance_pair, eigen_bounds, product_report,
    weighted_average_ratio, CovariancePair, EigenBounds, PanelDataset, ProductAggregate,
    ProductRatios, ProductReport,
};
pub use replicate::{verify_reference_tables, ReferenceCheck};
pub use report::{
    load_csv_reader, load_csv_str, parse_report, render_report, require_single_product, sha256_hex,
    OutputFormat, Report, ReportBody, ReportMeta,
};
pub use seasonality::{
    classify_seasonality, seasonal_decompose, seasonality_effect, SeasonalDecomposition,
    SeasonalRelation, SeasonalityReport,
};
pub use series::{Partition, Series, VarianceMode};
pub use simulation::{
    gen_ar1_demand, monte_carlo_regimes, order_up_to_orders, run_simulation, RegimeCounts,
    RegimeTable, SimConfig, SimRun, WARMUP_WINDOWS,
};
pub use stats::{
    bullwhip_ratio, decompose_variance, subset_ratios_weighted, SubsetBullwhip,
    VarianceDecomposition,
};
pub use time_agg::{
    aggregate_series, aggregated_bullwhip, classify_aggregation_effect, sweep_aggregation,
    AggregationEffect, AggregationReport, SweepOutcome, STRICT_MAINTAIN_EPS,
};
