//! Bullwhip behaviour when several products are pooled into one series.
//!
//! For products whose demand (and order) series are pairwise uncorrelated,
//! the ratio of the pooled series is the demand-variance-weighted average
//! of the per-product ratios, so pooling can never leave the band spanned
//! by the individual ratios. With cross-correlations the pooled ratio is a
//! Rayleigh quotient of the two covariance matrices and is instead confined
//! by their extreme eigenvalues. Both bounds are computed here, alongside
//! flags recording whether the data respects them.

use serde::{Deserialize, Serialize};

use crate::eigen::{symmetric_eigenvalues, SquareMatrix};
use crate::error::{Error, Result};
use crate::series::Series;

/// Fraction of the largest demand eigenvalue below which the smallest is
/// treated as numerically zero, making the upper eigen bound unbounded.
pub const EIGEN_ZERO_TOL: f64 = 1e-10;

/// Demand and order series for several products over a common horizon.
///
/// Invariants: at least one product, unique product identifiers, one
/// demand and one order series per product, all series equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    products: Vec<String>,
    demand: Vec<Series>,
    orders: Vec<Series>,
}

impl PanelDataset {
    /// Validates and assembles a panel.
    pub fn new(products: Vec<String>, demand: Vec<Series>, orders: Vec<Series>) -> Result<Self> {
        if products.is_empty() {
            return Err(Error::InvalidArgument {
                reason: "panel must contain at least one product".into(),
            });
        }
        if products.len() != demand.len() || products.len() != orders.len() {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "panel has {} products but {} demand and {} order series",
                    products.len(),
                    demand.len(),
                    orders.len()
                ),
            });
        }
        for (i, id) in products.iter().enumerate() {
            if products[..i].contains(id) {
                return Err(Error::InvalidArgument {
                    reason: format!("duplicate product identifier `{id}`"),
                });
            }
        }
        let len = demand[0].len();
        for series in demand.iter().chain(orders.iter()) {
            if series.len() != len {
                return Err(Error::LengthMismatch {
                    left: len,
                    right: series.len(),
                });
            }
        }
        Ok(Self {
            products,
            demand,
            orders,
        })
    }

    /// Product identifiers, in input order.
    #[must_use]
    pub fn products(&self) -> &[String] {
        &self.products
    }

    /// Demand series, aligned with [`PanelDataset::products`].
    #[must_use]
    pub fn demand(&self) -> &[Series] {
        &self.demand
    }

    /// Order series, aligned with [`PanelDataset::products`].
    #[must_use]
    pub fn orders(&self) -> &[Series] {
        &self.orders
    }

    /// Number of products.
    #[must_use]
    pub fn product_count(&self) -> usize {
        self.products.len()
    }

    /// Common series length.
    #[must_use]
    pub fn period_count(&self) -> usize {
        self.demand[0].len()
    }
}

/// Pooled series and their variance ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductAggregate {
    /// Period-wise sum of all order series.
    pub orders: Series,
    /// Period-wise sum of all demand series.
    pub demand: Series,
    /// Var(pooled orders) / Var(pooled demand).
    pub ratio: f64,
}

/// Per-product ratios and the demand-variance weights that combine them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRatios {
    /// Var(orders_n) / Var(demand_n) per product.
    pub ratios: Vec<f64>,
    /// Demand-variance share per product; sums to 1.
    pub weights: Vec<f64>,
    /// Dot product of `ratios` and `weights`.
    pub weighted_ratio: f64,
    /// Sum of order variances over sum of demand variances. Agrees with
    /// `weighted_ratio` up to rounding.
    pub sum_ratio: f64,
}

/// Covariance matrices of the two sides of a panel with their spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariancePair {
    /// Population covariance matrix of the order series.
    pub orders: SquareMatrix,
    /// Population covariance matrix of the demand series.
    pub demand: SquareMatrix,
    /// Eigenvalues of `orders`, ascending.
    pub orders_eigenvalues: Vec<f64>,
    /// Eigenvalues of `demand`, ascending.
    pub demand_eigenvalues: Vec<f64>,
}

/// Eigenvalue envelope for the pooled ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenBounds {
    /// Smallest order eigenvalue over largest demand eigenvalue. Can dip
    /// a rounding error below zero when the order matrix is singular.
    pub lower: f64,
    /// Largest order eigenvalue over smallest demand eigenvalue, or `None`
    /// when the demand matrix is numerically singular and no finite upper
    /// bound exists.
    pub upper: Option<f64>,
}

/// Everything measured about pooling one panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductReport {
    /// Product identifiers, in input order.
    pub products: Vec<String>,
    /// Per-product ratios with demand-variance weights.
    pub per_product: ProductRatios,
    /// Ratio of the pooled series.
    pub aggregated_ratio: f64,
    /// Ratio of covariance entry sums; equals `aggregated_ratio` up to
    /// rounding and is recorded as an audit value.
    pub quadratic_form_ratio: f64,
    /// Covariance matrices and spectra behind the eigen bounds.
    pub covariance: CovariancePair,
    /// Eigenvalue envelope for the pooled ratio.
    pub bounds: EigenBounds,
    /// Whether the pooled ratio left the band spanned by the per-product
    /// ratios. Possible only through nonzero sample cross-covariances.
    pub escapes_uncorrelated_bounds: bool,
    /// Whether the pooled ratio respects the eigenvalue envelope.
    pub within_eigen_bounds: bool,
}

/// Population covariance matrix of a family of equal-length series.
pub fn covariance_matrix(series: &[Series]) -> Result<SquareMatrix> {
    if series.is_empty() {
        return Err(Error::InvalidArgument {
            reason: "covariance matrix needs at least one series".into(),
        });
    }
    let len = series[0].len();
    for s in series {
        if s.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: s.len(),
            });
        }
    }
    let n = series.len();
    let t = len as f64;
    let means: Vec<f64> = series.iter().map(Series::mean).collect();
    let mut m = SquareMatrix::zeros(n)?;
    for i in 0..n {
        for j in i..n {
            let cov = series[i]
                .values()
                .iter()
                .zip(series[j].values())
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum::<f64>()
                / t;
            m.set(i, j, cov);
            m.set(j, i, cov);
        }
    }
    Ok(m)
}

/// Pools the panel period-wise and measures the resulting ratio.
///
/// Pooling can cancel all demand variability when products are negatively
/// correlated; that surfaces as [`Error::DegenerateDemand`].
pub fn aggregate_products(panel: &PanelDataset) -> Result<ProductAggregate> {
    let orders = sum_series(panel.orders());
    let demand = sum_series(panel.demand());
    let var_d = demand.population_variance();
    if var_d == 0.0 {
        return Err(Error::DegenerateDemand {
            context: "pooled demand variance".into(),
        });
    }
    let ratio = orders.population_variance() / var_d;
    Ok(ProductAggregate {
        orders,
        demand,
        ratio,
    })
}

fn sum_series(all: &[Series]) -> Series {
    let len = all[0].len();
    let mut sums = vec![0.0; len];
    for series in all {
        for (acc, v) in sums.iter_mut().zip(series.values()) {
            *acc += v;
        }
    }
    Series::new(sums).expect("sums of finite values are finite")
}

/// Combines per-product variance pairs into the weighted-average ratio.
///
/// Every demand variance must be strictly positive; the weights are the
/// demand-variance shares, making the weighted average identical to the
/// ratio of variance sums.
pub fn weighted_average_ratio(
    order_variances: &[f64],
    demand_variances: &[f64],
) -> Result<ProductRatios> {
    if order_variances.is_empty() {
        return Err(Error::InvalidArgument {
            reason: "need at least one variance pair".into(),
        });
    }
    if order_variances.len() != demand_variances.len() {
        return Err(Error::LengthMismatch {
            left: order_variances.len(),
            right: demand_variances.len(),
        });
    }
    for (i, &v) in order_variances.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidArgument {
                reason: format!("order variance {i} is not a finite non-negative number: {v}"),
            });
        }
    }
    for (i, &v) in demand_variances.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidArgument {
                reason: format!("demand variance {i} is not a finite non-negative number: {v}"),
            });
        }
        if v == 0.0 {
            return Err(Error::DegenerateDemand {
                context: format!("demand variance of product index {i}"),
            });
        }
    }

    let demand_total: f64 = demand_variances.iter().sum();
    let order_total: f64 = order_variances.iter().sum();
    let ratios: Vec<f64> = order_variances
        .iter()
        .zip(demand_variances)
        .map(|(o, d)| o / d)
        .collect();
    let weights: Vec<f64> = demand_variances.iter().map(|v| v / demand_total).collect();
    let weighted_ratio = ratios.iter().zip(&weights).map(|(r, w)| r * w).sum();
    Ok(ProductRatios {
        ratios,
        weights,
        weighted_ratio,
        sum_ratio: order_total / demand_total,
    })
}

/// Builds both covariance matrices and their spectra.
pub fn covariance_pair(panel: &PanelDataset) -> Result<CovariancePair> {
    let orders = covariance_matrix(panel.orders())?;
    let demand = covariance_matrix(panel.demand())?;
    let orders_eigenvalues = symmetric_eigenvalues(&orders)?;
    let demand_eigenvalues = symmetric_eigenvalues(&demand)?;
    Ok(CovariancePair {
        orders,
        demand,
        orders_eigenvalues,
        demand_eigenvalues,
    })
}

/// Eigenvalue envelope for the pooled ratio.
///
/// The pooled ratio is the quadratic form of the all-ones vector under
/// each matrix, so it lies between `min eig(orders) / max eig(demand)` and
/// `max eig(orders) / min eig(demand)`. A numerically singular demand
/// matrix (smallest eigenvalue at most [`EIGEN_ZERO_TOL`] times the
/// largest) yields no finite upper bound.
pub fn eigen_bounds(pair: &CovariancePair) -> Result<EigenBounds> {
    let o_min = pair.orders_eigenvalues[0];
    let o_max = *pair.orders_eigenvalues.last().expect("non-empty spectrum");
    let d_min = pair.demand_eigenvalues[0];
    let d_max = *pair.demand_eigenvalues.last().expect("non-empty spectrum");
    if d_max <= 0.0 {
        return Err(Error::DegenerateDemand {
            context: "demand covariance matrix has no positive eigenvalue".into(),
        });
    }
    let upper = if d_min <= EIGEN_ZERO_TOL * d_max {
        None
    } else {
        Some(o_max / d_min)
    };
    Ok(EigenBounds {
        lower: o_min / d_max,
        upper,
    })
}

/// Full pooling analysis of a panel.
pub fn product_report(panel: &PanelDataset) -> Result<ProductReport> {
    let covariance = covariance_pair(panel)?;
    let n = panel.product_count();
    let order_vars: Vec<f64> = (0..n).map(|i| covariance.orders.get(i, i)).collect();
    let demand_vars: Vec<f64> = (0..n).map(|i| covariance.demand.get(i, i)).collect();
    for (i, &v) in demand_vars.iter().enumerate() {
        if v == 0.0 {
            return Err(Error::DegenerateDemand {
                context: format!("demand variance of product `{}`", panel.products()[i]),
            });
        }
    }

    let per_product = weighted_average_ratio(&order_vars, &demand_vars)?;
    let pooled = aggregate_products(panel)?;
    let bounds = eigen_bounds(&covariance)?;

    let quadratic_form_ratio = covariance.orders.entry_sum() / covariance.demand.entry_sum();
    let r = pooled.ratio;
    let tol = 1e-9 * r.abs().max(1.0);
    let min_ratio = per_product
        .ratios
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let max_ratio = per_product
        .ratios
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let escapes_uncorrelated_bounds = r < min_ratio - tol || r > max_ratio + tol;
    let within_eigen_bounds = r >= bounds.lower - tol && bounds.upper.is_none_or(|u| r <= u + tol);

    Ok(ProductReport {
        products: panel.products().to_vec(),
        per_product,
        aggregated_ratio: r,
        quadratic_form_ratio,
        covariance,
        bounds,
        escapes_uncorrelated_bounds,
        within_eigen_bounds,
    })
}
