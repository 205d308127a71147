//! CSV ingestion and the serialized report envelope.
//!
//! Input files are long-format CSV with the exact header
//! `period,product,demand,order`. Every analysis result is wrapped in a
//! [`Report`]: a `meta` block naming the crate version, the SHA-256 of the
//! consumed input bytes, and the effective parameters, plus a tagged
//! payload. JSON output round-trips through [`parse_report`] without loss;
//! the table format is a human-oriented projection of the same data with
//! two-decimal values.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::product_agg::{PanelDataset, ProductReport};
use crate::seasonality::SeasonalityReport;
use crate::series::Series;
use crate::simulation::{RegimeTable, SimRun};
use crate::stats::VarianceDecomposition;
use crate::time_agg::AggregationReport;

/// Required CSV columns, in order.
pub const CSV_COLUMNS: [&str; 4] = ["period", "product", "demand", "order"];

/// Hex SHA-256 digest of a byte slice. Used to fingerprint report inputs.
#[must_use]
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses long-format CSV text into a panel.
///
/// Row numbers in errors count data rows from 1; row 0 denotes the
/// header. Periods may arrive out of order; per product they must form a
/// gapless ascending range once sorted, with no duplicates.
pub fn load_csv_str(text: &str) -> Result<PanelDataset> {
    load_csv_reader(text.as_bytes())
}

/// Reader-based variant of [`load_csv_str`].
pub fn load_csv_reader<R: Read>(reader: R) -> Result<PanelDataset> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = csv_reader.records();
    let header = match records.next() {
        None => return Err(Error::EmptyDataset),
        Some(Err(e)) => {
            return Err(Error::MalformedCsv {
                row: 0,
                message: e.to_string(),
            })
        }
        Some(Ok(record)) => record,
    };
    let header_fields: Vec<&str> = header.iter().collect();
    for column in CSV_COLUMNS {
        if !header_fields.contains(&column) {
            return Err(Error::MissingColumn {
                column: column.into(),
            });
        }
    }
    if header_fields != CSV_COLUMNS {
        return Err(Error::MalformedCsv {
            row: 0,
            message: format!(
                "header must be exactly `{}`, got `{}`",
                CSV_COLUMNS.join(","),
                header_fields.join(",")
            ),
        });
    }

    // Per product: period -> (data row, demand, order), ordered by period.
    let mut product_order: Vec<String> = Vec::new();
    let mut by_product: BTreeMap<String, BTreeMap<i64, (usize, f64, f64)>> = BTreeMap::new();
    let mut row = 0usize;
    for record in records {
        row += 1;
        let record = record.map_err(|e| Error::MalformedCsv {
            row,
            message: e.to_string(),
        })?;
        if record.len() != CSV_COLUMNS.len() {
            return Err(Error::MalformedCsv {
                row,
                message: format!(
                    "expected {} fields, found {}",
                    CSV_COLUMNS.len(),
                    record.len()
                ),
            });
        }
        let period: i64 = parse_cell(&record[0], row, "period")?;
        let product = record[1].to_string();
        let demand: f64 = parse_finite(&record[2], row, "demand")?;
        let order: f64 = parse_finite(&record[3], row, "order")?;

        let entries = by_product.entry(product.clone()).or_insert_with(|| {
            product_order.push(product.clone());
            BTreeMap::new()
        });
        if entries.insert(period, (row, demand, order)).is_some() {
            return Err(Error::DuplicateRow {
                row,
                period,
                product,
            });
        }
    }
    if product_order.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut demand_series = Vec::with_capacity(product_order.len());
    let mut order_series = Vec::with_capacity(product_order.len());
    for product in &product_order {
        let entries = &by_product[product];
        let mut expected = None;
        let mut demands = Vec::with_capacity(entries.len());
        let mut orders = Vec::with_capacity(entries.len());
        for (&period, &(entry_row, demand, order)) in entries {
            if let Some(expected) = expected {
                if period != expected {
                    return Err(Error::GapInPeriods {
                        row: entry_row,
                        product: product.clone(),
                        expected,
                        found: period,
                    });
                }
            }
            expected = Some(period + 1);
            demands.push(demand);
            orders.push(order);
        }
        demand_series.push(Series::new(demands)?);
        order_series.push(Series::new(orders)?);
    }
    PanelDataset::new(product_order, demand_series, order_series)
}

fn parse_cell<T: std::str::FromStr>(value: &str, row: usize, column: &str) -> Result<T> {
    value.parse().map_err(|_| Error::NonNumericValue {
        row,
        column: column.into(),
        value: value.into(),
    })
}

fn parse_finite(value: &str, row: usize, column: &str) -> Result<f64> {
    let parsed: f64 = parse_cell(value, row, column)?;
    if !parsed.is_finite() {
        return Err(Error::NonNumericValue {
            row,
            column: column.into(),
            value: value.into(),
        });
    }
    Ok(parsed)
}

/// Extracts the one (orders, demand) pair of a single-product panel.
///
/// The single-series analyses (variance decomposition, time aggregation,
/// seasonality) refuse multi-product files rather than silently pooling
/// or picking a product.
pub fn require_single_product(panel: &PanelDataset) -> Result<(Series, Series)> {
    if panel.product_count() != 1 {
        return Err(Error::InvalidArgument {
            reason: format!(
                "this analysis takes a single-product dataset; found {} products ({})",
                panel.product_count(),
                panel.products().join(", ")
            ),
        });
    }
    Ok((panel.orders()[0].clone(), panel.demand()[0].clone()))
}

/// Provenance block carried by every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMeta {
    /// Crate version that produced the report.
    pub version: String,
    /// Hex SHA-256 of the input bytes the analysis consumed; the digest
    /// of the empty string when no input file was involved.
    pub input_sha256: String,
    /// Effective parameters, stringified; ordered map for byte-stable
    /// output.
    pub params: BTreeMap<String, String>,
}

impl ReportMeta {
    /// Builds the block, stamping in the crate version.
    #[must_use]
    pub fn new(input_sha256: String, params: BTreeMap<String, String>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            input_sha256,
            params,
        }
    }
}

/// Variance decompositions of one series pair at one subset size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeEntry {
    /// Subset size.
    pub k: usize,
    /// Trailing observations dropped before decomposing.
    pub dropped: usize,
    /// Demand-side decomposition.
    pub demand: VarianceDecomposition,
    /// Order-side decomposition.
    pub orders: VarianceDecomposition,
}

/// Payload of the `decompose` analysis: one entry per requested `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposePayload {
    /// Entries in the order requested.
    pub entries: Vec<DecomposeEntry>,
}

/// One aggregation level of the `time-agg` analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeAggEntry {
    /// Aggregation level attempted.
    pub k: usize,
    /// Trailing observations dropped before classification.
    pub dropped: usize,
    /// The classification, when it succeeded.
    pub report: Option<AggregationReport>,
    /// Rendered error, when it did not.
    pub error: Option<String>,
}

/// Payload of the `time-agg` analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeAggPayload {
    /// Maintain band used for classification.
    pub maintain_eps: f64,
    /// Whether indivisible levels truncated the series instead of failing.
    pub truncate: bool,
    /// One entry per requested level.
    pub entries: Vec<TimeAggEntry>,
}

/// Payload of the `simulate` analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatePayload {
    /// The simulated run, config included.
    pub run: SimRun,
    /// Aggregation-effect frequencies, when a sweep was requested.
    pub regimes: Option<RegimeTable>,
}

/// Tagged report payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum ReportBody {
    /// Variance decompositions across subset sizes.
    Decompose(DecomposePayload),
    /// Aggregation-effect classifications across levels.
    TimeAgg(TimeAggPayload),
    /// Multi-product pooling analysis.
    ProductAgg(ProductReport),
    /// Seasonal adjustment comparison.
    Seasonality(SeasonalityReport),
    /// Simulated scenario.
    Simulate(SimulatePayload),
}

/// A complete, serializable analysis result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Provenance: version, input digest, parameters.
    pub meta: ReportMeta,
    /// The analysis payload with its kind tag.
    #[serde(flatten)]
    pub body: ReportBody,
}

/// Output encodings for a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Lossless JSON; parses back via [`parse_report`].
    Json,
    /// Human-oriented text, two-decimal values.
    Table,
}

/// Renders a report in the chosen format. JSON output is byte-stable for
/// identical reports.
#[must_use]
pub fn render_report(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut text =
                serde_json::to_string_pretty(report).expect("reports contain only finite numbers");
            text.push('\n');
            text
        }
        OutputFormat::Table => render_table(report),
    }
}

/// Parses a JSON report produced by [`render_report`].
pub fn parse_report(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::ReportParse {
        message: e.to_string(),
    })
}

fn render_table(report: &Report) -> String {
    let mut out = String::new();
    let meta = &report.meta;
    match &report.body {
        ReportBody::Decompose(payload) => {
            push_header(&mut out, "variance decomposition", meta);
            for entry in &payload.entries {
                out.push_str(&format!(
                    "k={} M={} dropped={}\n",
                    entry.k, entry.demand.subset_count, entry.dropped
                ));
                push_decomposition(&mut out, "demand", &entry.demand);
                push_decomposition(&mut out, "orders", &entry.orders);
            }
        }
        ReportBody::TimeAgg(payload) => {
            push_header(&mut out, "time aggregation", meta);
            out.push_str(&format!(
                "maintain_eps {:e} truncate {}\n",
                payload.maintain_eps, payload.truncate
            ));
            for entry in &payload.entries {
                match (&entry.report, &entry.error) {
                    (Some(r), _) => out.push_str(&format!(
                        "k={} M={} dropped={} R_non_agg {:.2} R_within {:.2} R_avg {:.2} R_agg {:.2} effect {} strict {}\n",
                        entry.k,
                        r.subset_count,
                        entry.dropped,
                        r.r_non_agg,
                        r.r_within,
                        r.r_avg,
                        r.r_agg,
                        r.effect,
                        r.strict_effect,
                    )),
                    (None, Some(message)) => {
                        out.push_str(&format!("k={} error: {}\n", entry.k, message));
                    }
                    (None, None) => out.push_str(&format!("k={} error: unknown\n", entry.k)),
                }
            }
        }
        ReportBody::ProductAgg(r) => {
            push_header(&mut out, "product aggregation", meta);
            out.push_str(&format!("products: {}\n", r.products.join(" ")));
            for ((product, ratio), weight) in r
                .products
                .iter()
                .zip(&r.per_product.ratios)
                .zip(&r.per_product.weights)
            {
                out.push_str(&format!(
                    "product {product}: ratio {ratio:.2} weight {weight:.2}\n"
                ));
            }
            out.push_str(&format!(
                "weighted {:.2} pooled {:.2} quadratic_form {:.2}\n",
                r.per_product.weighted_ratio, r.aggregated_ratio, r.quadratic_form_ratio
            ));
            match r.bounds.upper {
                Some(upper) => out.push_str(&format!(
                    "eigen bounds [{:.2}, {:.2}]\n",
                    r.bounds.lower, upper
                )),
                None => out.push_str(&format!(
                    "eigen bounds [{:.2}, unbounded)\n",
                    r.bounds.lower
                )),
            }
            out.push_str(&format!(
                "escapes_uncorrelated_bounds {} within_eigen_bounds {}\n",
                r.escapes_uncorrelated_bounds, r.within_eigen_bounds
            ));
        }
        ReportBody::Seasonality(r) => {
            push_header(&mut out, "seasonality", meta);
            out.push_str(&format!(
                "period {} shared_seasonal {}\n",
                r.period, r.shared_seasonal
            ));
            out.push_str(&format!(
                "R_all {:.2} R_adjusted {:.2} relation {} consistent {}\n",
                r.r_all, r.r_adjusted, r.relation, r.relation_consistent
            ));
            out.push_str(&format!(
                "var_seasonal_demand {:.2} var_adjusted_demand {:.2} var_adjusted_orders {:.2}\n",
                r.var_seasonal_demand, r.var_adjusted_demand, r.var_adjusted_orders
            ));
            if let Some(predicted) = r.predicted_r_all {
                out.push_str(&format!("predicted_R_all {predicted:.2}\n"));
            }
            if let Some(var) = r.var_seasonal_orders {
                out.push_str(&format!("var_seasonal_orders {var:.2}\n"));
            }
        }
        ReportBody::Simulate(payload) => {
            push_header(&mut out, "simulation", meta);
            let run = &payload.run;
            out.push_str(&format!(
                "horizon {} phi {} mu {} sigma {} forecast_window {} lead_time {} seed {}\n",
                run.config.horizon,
                run.config.phi,
                run.config.mu,
                run.config.sigma,
                run.config.forecast_window,
                run.config.lead_time,
                run.config.seed,
            ));
            out.push_str(&format!(
                "warmup_dropped {} ratio {:.2}\n",
                run.warmup_dropped, run.ratio
            ));
            push_preview(&mut out, "demand", &run.demand);
            push_preview(&mut out, "orders", &run.orders);
            if let Some(regimes) = &payload.regimes {
                out.push_str(&format!("regimes over {} replications:\n", regimes.reps));
                for entry in &regimes.counts {
                    out.push_str(&format!(
                        "k={} increase {} decrease {} maintain {} errors {}\n",
                        entry.k, entry.increase, entry.decrease, entry.maintain, entry.errors
                    ));
                }
            }
        }
    }
    out
}

fn push_header(out: &mut String, kind: &str, meta: &ReportMeta) {
    out.push_str(&format!("{kind} report (version {})\n", meta.version));
    out.push_str(&format!("input sha256 {}\n", meta.input_sha256));
    if !meta.params.is_empty() {
        let params: Vec<String> = meta
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        out.push_str(&format!("params {}\n", params.join(" ")));
    }
}

fn push_decomposition(out: &mut String, label: &str, d: &VarianceDecomposition) {
    out.push_str(&format!(
        "{label}: within {:.2} between {:.2} total {:.2}\n",
        d.within, d.between, d.total
    ));
    let vars: Vec<String> = d
        .subset_variances
        .iter()
        .map(|v| format!("{v:.2}"))
        .collect();
    let means: Vec<String> = d.subset_means.iter().map(|v| format!("{v:.2}")).collect();
    out.push_str(&format!("{label} subset variances: {}\n", vars.join(" ")));
    out.push_str(&format!("{label} subset means: {}\n", means.join(" ")));
}

fn push_preview(out: &mut String, label: &str, series: &Series) {
    const PREVIEW: usize = 8;
    let values = series.values();
    let shown: Vec<String> = values
        .iter()
        .take(PREVIEW)
        .map(|v| format!("{v:.2}"))
        .collect();
    let suffix = if values.len() > PREVIEW { " ..." } else { "" };
    out.push_str(&format!(
        "{label} ({} periods): {}{suffix}\n",
        values.len(),
        shown.join(" ")
    ));
}
