//! C interface for the bullwhip analytics library.
//!
//! Everything crossing the boundary is either a plain number, a caller
//! buffer, or an opaque handle created and destroyed here. Fallible calls
//! return a [`BwStatus`]; on failure a thread-local message is readable
//! through [`bw_last_error_message`] until the next failing call on the
//! same thread. Value getters take a handle and return the value
//! directly, with a documented sentinel on a null handle.
//!
//! The committed header `include/bullwhip.h` is maintained by hand and
//! mirrors this file; keep the two in sync when the surface changes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use bullwhip::{
    bullwhip_ratio, classify_aggregation_effect, classify_seasonality, decompose_variance,
    product_report, run_simulation, AggregationEffect, AggregationReport, Error, PanelDataset,
    SeasonalRelation, SeasonalityReport, Series, SimConfig, SimRun,
};

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSeries = 3,
    IndivisibleLength = 4,
    LengthMismatch = 5,
    DegenerateDemand = 6,
    InsufficientData = 7,
    NumericFailure = 8,
    ParseError = 9,
    IoError = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn remember(message: &str) {
    let owned = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a nul byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = owned);
}

fn fail(err: &Error) -> BwStatus {
    remember(&err.to_string());
    match err {
        Error::InvalidSeries { .. } => BwStatus::InvalidSeries,
        Error::InvalidArgument { .. }
        | Error::InvalidConfig { .. }
        | Error::InvalidPeriod { .. } => BwStatus::InvalidArgument,
        Error::IndivisibleLength { .. } => BwStatus::IndivisibleLength,
        Error::LengthMismatch { .. } => BwStatus::LengthMismatch,
        Error::DegenerateDemand { .. } | Error::DegenerateSubset { .. } => {
            BwStatus::DegenerateDemand
        }
        Error::InsufficientData { .. } => BwStatus::InsufficientData,
        Error::NotSymmetric { .. } | Error::ConvergenceFailure { .. } => BwStatus::NumericFailure,
        Error::MissingColumn { .. }
        | Error::DuplicateRow { .. }
        | Error::GapInPeriods { .. }
        | Error::NonNumericValue { .. }
        | Error::EmptyDataset
        | Error::MalformedCsv { .. }
        | Error::ReportParse { .. } => BwStatus::ParseError,
        Error::Io(_) => BwStatus::IoError,
    }
}

fn null_pointer(what: &str) -> BwStatus {
    remember(&format!("null pointer: {what}"));
    BwStatus::NullPointer
}

/// Observation series handle.
pub struct BwSeries(Series);

/// Time-aggregation comparison handle.
pub struct BwAggregation(AggregationReport);

/// Seasonal comparison handle.
pub struct BwSeasonality(SeasonalityReport);

/// Simulation run handle.
pub struct BwSimRun(SimRun);

/// Multi-product panel under construction.
#[derive(Default)]
pub struct BwPanel {
    names: Vec<String>,
    demand: Vec<Series>,
    orders: Vec<Series>,
}

/// Simulation parameters, plain-old-data for the boundary.
/// `seasonal_period == 0` means no seasonal term; `truncate_negative_orders`
/// is a boolean flag (0 or 1).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BwSimConfig {
    pub horizon: usize,
    pub phi: f64,
    pub mu: f64,
    pub sigma: f64,
    pub forecast_window: usize,
    pub lead_time: usize,
    pub seed: u64,
    pub seasonal_amplitude: f64,
    pub seasonal_period: usize,
    pub truncate_negative_orders: i32,
}

impl From<&BwSimConfig> for SimConfig {
    fn from(c: &BwSimConfig) -> Self {
        SimConfig {
            horizon: c.horizon,
            phi: c.phi,
            mu: c.mu,
            sigma: c.sigma,
            forecast_window: c.forecast_window,
            lead_time: c.lead_time,
            seed: c.seed,
            seasonal_amplitude: c.seasonal_amplitude,
            seasonal_period: (c.seasonal_period > 0).then_some(c.seasonal_period),
            truncate_negative_orders: c.truncate_negative_orders != 0,
        }
    }
}

/// Crate version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn bw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the most recent failure on this thread, empty before the
/// first failure. The pointer stays valid until the next failing call on
/// the same thread.
#[no_mangle]
pub extern "C" fn bw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Creates a series from `len` doubles starting at `values`.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be a valid
/// destination for one pointer. On `BW_OK` the caller owns the handle and
/// must release it with [`bw_series_free`].
#[no_mangle]
pub unsafe extern "C" fn bw_series_new(
    values: *const f64,
    len: usize,
    out: *mut *mut BwSeries,
) -> BwStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    if values.is_null() {
        return null_pointer("values");
    }
    let slice = std::slice::from_raw_parts(values, len);
    match Series::from_slice(slice) {
        Ok(series) => {
            *out = Box::into_raw(Box::new(BwSeries(series)));
            BwStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Releases a series handle. Null is a no-op.
///
/// # Safety
/// `series` must be a handle from [`bw_series_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_series_free(series: *mut BwSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of observations; 0 on a null handle.
///
/// # Safety
/// `series` must be null or a live series handle.
#[no_mangle]
pub unsafe extern "C" fn bw_series_len(series: *const BwSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Copies up to `cap` observations into `buf`, returning how many were
/// copied.
///
/// # Safety
/// `series` must be null or a live handle; `buf` must have room for `cap`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn bw_series_copy(
    series: *const BwSeries,
    buf: *mut f64,
    cap: usize,
) -> usize {
    let Some(series) = series.as_ref() else {
        return 0;
    };
    if buf.is_null() {
        return 0;
    }
    let n = cap.min(series.0.len());
    std::ptr::copy_nonoverlapping(series.0.values().as_ptr(), buf, n);
    n
}

/// Var(orders) / Var(demand) into `out`.
///
/// # Safety
/// `orders` and `demand` must be live series handles; `out` must be a
/// valid destination for one double.
#[no_mangle]
pub unsafe extern "C" fn bw_bullwhip_ratio(
    orders: *const BwSeries,
    demand: *const BwSeries,
    out: *mut f64,
) -> BwStatus {
    let (Some(orders), Some(demand)) = (orders.as_ref(), demand.as_ref()) else {
        return null_pointer("orders or demand");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    match bullwhip_ratio(&orders.0, &demand.0) {
        Ok(r) => {
            *out = r;
            BwStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Splits the series variance over contiguous subsets of size `k`. Each
/// of `total`, `within`, `between` may be null to skip that component.
///
/// # Safety
/// `series` must be a live handle; non-null out-pointers must be valid
/// destinations for one double each.
#[no_mangle]
pub unsafe extern "C" fn bw_decompose(
    series: *const BwSeries,
    k: usize,
    total: *mut f64,
    within: *mut f64,
    between: *mut f64,
) -> BwStatus {
    let Some(series) = series.as_ref() else {
        return null_pointer("series");
    };
    match decompose_variance(&series.0, k) {
        Ok(d) => {
            if !total.is_null() {
                *total = d.total;
            }
            if !within.is_null() {
                *within = d.within;
            }
            if !between.is_null() {
                *between = d.between;
            }
            BwStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Compares ratios before and after aggregating over blocks of `k`
/// periods; `maintain_eps` is the relative half-width of the band treated
/// as no movement.
///
/// # Safety
/// `orders` and `demand` must be live series handles; `out` must be a
/// valid destination for one pointer. On `BW_OK` the caller owns the
/// handle and must release it with [`bw_aggregation_free`].
#[no_mangle]
pub unsafe extern "C" fn bw_aggregation_new(
    orders: *const BwSeries,
    demand: *const BwSeries,
    k: usize,
    maintain_eps: f64,
    out: *mut *mut BwAggregation,
) -> BwStatus {
    let (Some(orders), Some(demand)) = (orders.as_ref(), demand.as_ref()) else {
        return null_pointer("orders or demand");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    match classify_aggregation_effect(&orders.0, &demand.0, k, maintain_eps) {
        Ok(report) => {
            *out = Box::into_raw(Box::new(BwAggregation(report)));
            BwStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Releases an aggregation handle. Null is a no-op.
///
/// # Safety
/// `report` must be a handle from [`bw_aggregation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_aggregation_free(report: *mut BwAggregation) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

unsafe fn aggregation_value(
    report: *const BwAggregation,
    get: impl Fn(&AggregationReport) -> f64,
) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| get(&r.0))
}

/// Ratio on the raw series; NaN on a null handle.
///
/// # Safety
/// `report` must be null or a live aggregation handle.
#[no_mangle]
pub unsafe extern "C" fn bw_aggregation_r_non_agg(report: *const BwAggregation) -> f64 {
    aggregation_value(report, |r| r.r_non_agg)
}

/// Ratio on the aggregated series; NaN on a null handle.
///
/// # Safety
/// `report` must be null or a live aggregation handle.
#[no_mangle]
pub unsafe extern "C" fn bw_aggregation_r_agg(report: *const BwAggregation) -> f64 {
    aggregation_value(report, |r| r.r_agg)
}

/// Ratio of between-subset components; NaN on a null handle.
///
/// # Safety
/// `report` must be null or a live aggregation handle.
#[no_mangle]
pub unsafe extern "C" fn bw_aggregation_r_avg(report: *const BwAggregation) -> f64 {
    aggregation_value(report, |r| r.r_avg)
}

/// Ratio of within-subset components; NaN on a null handle.
///
/// # Safety
/// `report` must be null or a live aggregation handle.
#[no_mangle]
pub unsafe extern "C" fn bw_aggregation_r_within(report: *const BwAggregation) -> f64 {
    aggregation_value(report, |r| r.r_within)
}

/// Direction of the ratio under aggregation: 1 increase, -1 decrease,
/// 0 maintain; `INT32_MIN` on a null handle.
///
/// # Safety
/// `report` must be null or a live aggregation handle.
#[no_mangle]
pub unsafe extern "C" fn bw_aggregation_effect(report: *const BwAggregation) -> i32 {
    report.as_ref().map_or(i32::MIN, |r| match r.0.effect {
        AggregationEffect::Increase => 1,
        AggregationEffect::Decrease => -1,
        AggregationEffect::Maintain => 0,
    })
}

/// Fits a seasonal pattern of the given period and compares raw against
/// adjusted ratios. Nonzero `shared` removes the demand-fitted pattern
/// from both series; zero fits each series separately.
///
/// # Safety
/// `orders` and `demand` must be live series handles; `out` must be a
/// valid destination for one pointer. On `BW_OK` the caller owns the
/// handle and must release it with [`bw_seasonality_free`].
#[no_mangle]
pub unsafe extern "C" fn bw_seasonality_new(
    orders: *const BwSeries,
    demand: *const BwSeries,
    period: usize,
    shared: i32,
    out: *mut *mut BwSeasonality,
) -> BwStatus {
    let (Some(orders), Some(demand)) = (orders.as_ref(), demand.as_ref()) else {
        return null_pointer("orders or demand");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    match classify_seasonality(&orders.0, &demand.0, period, shared != 0) {
        Ok(report) => {
            *out = Box::into_raw(Box::new(BwSeasonality(report)));
            BwStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Releases a seasonality handle. Null is a no-op.
///
/// # Safety
/// `report` must be a handle from [`bw_seasonality_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_seasonality_free(report: *mut BwSeasonality) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Ratio on the raw series; NaN on a null handle.
///
/// # Safety
/// `report` must be null or a live seasonality handle.
#[no_mangle]
pub unsafe extern "C" fn bw_seasonality_r_all(report: *const BwSeasonality) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.r_all)
}

/// Ratio on the seasonally adjusted series; NaN on a null handle.
///
/// # Safety
/// `report` must be null or a live seasonality handle.
#[no_mangle]
pub unsafe extern "C" fn bw_seasonality_r_adjusted(report: *const BwSeasonality) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.r_adjusted)
}

/// Side the adjusted ratio sits on: 1 above one, -1 below one, 0 equal;
/// `INT32_MIN` on a null handle.
///
/// # Safety
/// `report` must be null or a live seasonality handle.
#[no_mangle]
pub unsafe extern "C" fn bw_seasonality_relation(report: *const BwSeasonality) -> i32 {
    report.as_ref().map_or(i32::MIN, |r| match r.0.relation {
        SeasonalRelation::TowardOneFromAbove => 1,
        SeasonalRelation::TowardOneFromBelow => -1,
        SeasonalRelation::ExactlyOne => 0,
    })
}

/// Fills `out` with the default simulation parameters.
///
/// # Safety
/// `out` must be a valid destination for one `BwSimConfig`.
#[no_mangle]
pub unsafe extern "C" fn bw_sim_config_default(out: *mut BwSimConfig) -> BwStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    let d = SimConfig::default();
    *out = BwSimConfig {
        horizon: d.horizon,
        phi: d.phi,
        mu: d.mu,
        sigma: d.sigma,
        forecast_window: d.forecast_window,
        lead_time: d.lead_time,
        seed: d.seed,
        seasonal_amplitude: d.seasonal_amplitude,
        seasonal_period: d.seasonal_period.unwrap_or(0),
        truncate_negative_orders: d.truncate_negative_orders as i32,
    };
    BwStatus::Ok
}

/// Runs the demand and ordering simulation described by `config`.
///
/// # Safety
/// `config` must point to a readable `BwSimConfig`; `out` must be a valid
/// destination for one pointer. On `BW_OK` the caller owns the handle and
/// must release it with [`bw_sim_run_free`].
#[no_mangle]
pub unsafe extern "C" fn bw_simulate(
    config: *const BwSimConfig,
    out: *mut *mut BwSimRun,
) -> BwStatus {
    let Some(config) = config.as_ref() else {
        return null_pointer("config");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    match run_simulation(&SimConfig::from(config)) {
        Ok(run) => {
            *out = Box::into_raw(Box::new(BwSimRun(run)));
            BwStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Releases a simulation handle. Null is a no-op.
///
/// # Safety
/// `run` must be a handle from [`bw_simulate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_sim_run_free(run: *mut BwSimRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Var(orders) / Var(demand) of the run; NaN on a null handle.
///
/// # Safety
/// `run` must be null or a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn bw_sim_run_ratio(run: *const BwSimRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.0.ratio)
}

/// Number of delivered periods; 0 on a null handle.
///
/// # Safety
/// `run` must be null or a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn bw_sim_run_len(run: *const BwSimRun) -> usize {
    run.as_ref().map_or(0, |r| r.0.demand.len())
}

/// Copies up to `cap` demand values into `buf`, returning the count.
///
/// # Safety
/// `run` must be null or a live handle; `buf` must have room for `cap`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn bw_sim_run_demand(
    run: *const BwSimRun,
    buf: *mut f64,
    cap: usize,
) -> usize {
    copy_values(run, buf, cap, |r| r.0.demand.values())
}

/// Copies up to `cap` order values into `buf`, returning the count.
///
/// # Safety
/// `run` must be null or a live handle; `buf` must have room for `cap`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn bw_sim_run_orders(
    run: *const BwSimRun,
    buf: *mut f64,
    cap: usize,
) -> usize {
    copy_values(run, buf, cap, |r| r.0.orders.values())
}

unsafe fn copy_values(
    run: *const BwSimRun,
    buf: *mut f64,
    cap: usize,
    pick: impl Fn(&BwSimRun) -> &[f64],
) -> usize {
    let Some(run) = run.as_ref() else {
        return 0;
    };
    if buf.is_null() {
        return 0;
    }
    let values = pick(run);
    let n = cap.min(values.len());
    std::ptr::copy_nonoverlapping(values.as_ptr(), buf, n);
    n
}

/// Creates an empty multi-product panel.
///
/// # Safety
/// `out` must be a valid destination for one pointer. On `BW_OK` the
/// caller owns the handle and must release it with [`bw_panel_free`].
#[no_mangle]
pub unsafe extern "C" fn bw_panel_new(out: *mut *mut BwPanel) -> BwStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    *out = Box::into_raw(Box::new(BwPanel::default()));
    BwStatus::Ok
}

/// Releases a panel handle. Null is a no-op.
///
/// # Safety
/// `panel` must be a handle from [`bw_panel_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_panel_free(panel: *mut BwPanel) {
    if !panel.is_null() {
        drop(Box::from_raw(panel));
    }
}

/// Appends one product's demand and order series to the panel. The series
/// are copied; the caller keeps ownership of the handles passed in.
///
/// # Safety
/// `panel` must be a live panel handle, `name` a nul-terminated string,
/// `demand` and `orders` live series handles.
#[no_mangle]
pub unsafe extern "C" fn bw_panel_add(
    panel: *mut BwPanel,
    name: *const c_char,
    demand: *const BwSeries,
    orders: *const BwSeries,
) -> BwStatus {
    let Some(panel) = panel.as_mut() else {
        return null_pointer("panel");
    };
    if name.is_null() {
        return null_pointer("name");
    }
    let (Some(demand), Some(orders)) = (demand.as_ref(), orders.as_ref()) else {
        return null_pointer("demand or orders");
    };
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        remember("product name is not valid UTF-8");
        return BwStatus::InvalidArgument;
    };
    panel.names.push(name.to_string());
    panel.demand.push(demand.0.clone());
    panel.orders.push(orders.0.clone());
    BwStatus::Ok
}

/// Pools the panel into one series pair and reports the pooled ratio, the
/// demand-variance-weighted average of per-product ratios, and eigenvalue
/// bounds on the pooled ratio. `upper` is set to NaN and `*has_upper` to 0
/// when the demand covariance is singular, which leaves the ratio
/// unbounded above. Out-pointers may be null to skip a value.
///
/// # Safety
/// `panel` must be a live panel handle; non-null out-pointers must be
/// valid destinations (`pooled`, `weighted`, `lower`, `upper` for one
/// double each, `has_upper` for one `int32_t`).
#[no_mangle]
pub unsafe extern "C" fn bw_panel_pool(
    panel: *const BwPanel,
    pooled: *mut f64,
    weighted: *mut f64,
    lower: *mut f64,
    upper: *mut f64,
    has_upper: *mut i32,
) -> BwStatus {
    let Some(panel) = panel.as_ref() else {
        return null_pointer("panel");
    };
    let dataset = match PanelDataset::new(
        panel.names.clone(),
        panel.demand.clone(),
        panel.orders.clone(),
    ) {
        Ok(d) => d,
        Err(e) => return fail(&e),
    };
    match product_report(&dataset) {
        Ok(report) => {
            if !pooled.is_null() {
                *pooled = report.aggregated_ratio;
            }
            if !weighted.is_null() {
                *weighted = report.per_product.weighted_ratio;
            }
            if !lower.is_null() {
                *lower = report.bounds.lower;
            }
            if !upper.is_null() {
                *upper = report.bounds.upper.unwrap_or(f64::NAN);
            }
            if !has_upper.is_null() {
                *has_upper = report.bounds.upper.is_some() as i32;
            }
            BwStatus::Ok
        }
        Err(e) => fail(&e),
    }
}
