//! Command-line front end. Exit codes: 0 success, 1 data or analysis
//! error, 2 usage error (from argument parsing).

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bullwhip::report::{
    DecomposeEntry, DecomposePayload, SimulatePayload, TimeAggEntry, TimeAggPayload,
};
use bullwhip::{
    classify_seasonality, decompose_variance, monte_carlo_regimes, product_report, render_report,
    require_single_product, run_simulation, sha256_hex, sweep_aggregation, verify_reference_tables,
    Error, OutputFormat, PanelDataset, Report, ReportBody, ReportMeta, Result, Series, SimConfig,
    VarianceDecomposition,
};

#[derive(Parser)]
#[command(
    name = "bullwhip",
    version,
    about = "Variance analytics for order and demand series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split demand and order variance into within-subset and
    /// between-subset parts.
    Decompose(DecomposeArgs),
    /// Compare bullwhip ratios before and after summing over blocks of
    /// k periods.
    TimeAgg(TimeAggArgs),
    /// Pool all products in the input and bound the pooled ratio.
    ProductAgg(IoArgs),
    /// Remove a periodic component and compare ratios with and without it.
    Seasonality(SeasonalityArgs),
    /// Generate AR(1) demand, apply an order-up-to policy, and report the
    /// resulting ratio.
    Simulate(SimulateArgs),
    /// Verify the built-in reference tables and print one PASS/FAIL line
    /// per table.
    ReplicatePaper,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Table,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Table => OutputFormat::Table,
        }
    }
}

#[derive(Args)]
struct IoArgs {
    /// CSV input path, or `-` for stdin.
    #[arg(long, short = 'i', default_value = "-")]
    input: String,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Subset sizes, comma separated.
    #[arg(long, short = 'k', value_delimiter = ',', default_value = "2")]
    k: Vec<usize>,
    /// Drop trailing periods instead of rejecting lengths not divisible
    /// by k.
    #[arg(long)]
    truncate: bool,
}

#[derive(Args)]
struct TimeAggArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Subset sizes, comma separated.
    #[arg(long, short = 'k', value_delimiter = ',', default_value = "2")]
    k: Vec<usize>,
    /// Drop trailing periods instead of rejecting lengths not divisible
    /// by k.
    #[arg(long)]
    truncate: bool,
    /// Relative half-width of the band treated as "maintain".
    #[arg(long, default_value_t = 1e-9)]
    maintain_eps: f64,
}

#[derive(Args)]
struct SeasonalityArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Length of the seasonal cycle in periods.
    #[arg(long)]
    period: usize,
    /// Remove the demand-fitted pattern from both series (the default).
    #[arg(long, conflicts_with = "per_series_seasonal")]
    shared_seasonal: bool,
    /// Fit and remove each series' own pattern instead.
    #[arg(long)]
    per_series_seasonal: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Config file of key=value lines; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Subset sizes for a Monte Carlo regime table, comma separated.
    #[arg(long, short = 'k', value_delimiter = ',')]
    k: Vec<usize>,
    /// Replications for the regime table (default 200).
    #[arg(long)]
    reps: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Decompose(args) => decompose_cmd(args),
        Command::TimeAgg(args) => time_agg_cmd(args),
        Command::ProductAgg(args) => product_agg_cmd(args),
        Command::Seasonality(args) => seasonality_cmd(args),
        Command::Simulate(args) => simulate_cmd(args),
        Command::ReplicatePaper => replicate_cmd(),
    }
}

/// Reads the whole input, from stdin when `path` is `-`.
fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument {
            reason: format!("cannot read {path}: {e}"),
        })
    }
}

fn load_panel(path: &str) -> Result<(PanelDataset, String)> {
    let text = read_input(path)?;
    let sha = sha256_hex(text.as_bytes());
    let panel = bullwhip::load_csv_str(&text)?;
    Ok((panel, sha))
}

fn emit(report: &Report, format: FormatArg) {
    print!("{}", render_report(report, format.into()));
}

fn require_ks(ks: &[usize]) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::InvalidArgument {
            reason: "at least one subset size is required".into(),
        });
    }
    Ok(())
}

/// Strict decomposition, or with `truncate` one that drops the trailing
/// `len % k` periods first.
fn decompose_with(
    series: &Series,
    k: usize,
    truncate: bool,
) -> Result<(usize, VarianceDecomposition)> {
    if truncate && k > 0 && !series.len().is_multiple_of(k) {
        if series.len() < k {
            return Err(Error::IndivisibleLength {
                len: series.len(),
                k,
            });
        }
        let dropped = series.len() % k;
        let kept = Series::from_slice(&series.values()[..series.len() - dropped])?;
        Ok((dropped, decompose_variance(&kept, k)?))
    } else {
        Ok((0, decompose_variance(series, k)?))
    }
}

fn decompose_cmd(args: DecomposeArgs) -> Result<ExitCode> {
    require_ks(&args.k)?;
    let (panel, sha) = load_panel(&args.io.input)?;
    let (orders, demand) = require_single_product(&panel)?;

    let mut entries = Vec::with_capacity(args.k.len());
    for &k in &args.k {
        let (dropped, demand_parts) = decompose_with(&demand, k, args.truncate)?;
        let (_, order_parts) = decompose_with(&orders, k, args.truncate)?;
        entries.push(DecomposeEntry {
            k,
            dropped,
            demand: demand_parts,
            orders: order_parts,
        });
    }

    let mut params = BTreeMap::new();
    params.insert("k".into(), join_ks(&args.k));
    params.insert("truncate".into(), args.truncate.to_string());
    let report = Report {
        meta: ReportMeta::new(sha, params),
        body: ReportBody::Decompose(DecomposePayload { entries }),
    };
    emit(&report, args.io.format);
    Ok(ExitCode::SUCCESS)
}

fn time_agg_cmd(args: TimeAggArgs) -> Result<ExitCode> {
    require_ks(&args.k)?;
    let (panel, sha) = load_panel(&args.io.input)?;
    let (orders, demand) = require_single_product(&panel)?;

    let outcomes = sweep_aggregation(&orders, &demand, &args.k, args.maintain_eps, args.truncate);
    let mut entries = Vec::with_capacity(outcomes.len());
    let mut failed = 0usize;
    for outcome in outcomes {
        let (report, error) = match outcome.result {
            Ok(r) => (Some(r), None),
            Err(e) => {
                failed += 1;
                (None, Some(e.to_string()))
            }
        };
        entries.push(TimeAggEntry {
            k: outcome.k,
            dropped: outcome.dropped,
            report,
            error,
        });
    }
    // Per-level failures are data when at least one level worked; a sweep
    // with nothing to show is an error.
    if failed == entries.len() {
        let first = entries
            .iter()
            .filter_map(|e| e.error.as_deref())
            .next()
            .unwrap_or("no aggregation level succeeded");
        return Err(Error::InvalidArgument {
            reason: first.to_string(),
        });
    }

    let mut params = BTreeMap::new();
    params.insert("k".into(), join_ks(&args.k));
    params.insert("truncate".into(), args.truncate.to_string());
    params.insert("maintain_eps".into(), args.maintain_eps.to_string());
    let report = Report {
        meta: ReportMeta::new(sha, params),
        body: ReportBody::TimeAgg(TimeAggPayload {
            maintain_eps: args.maintain_eps,
            truncate: args.truncate,
            entries,
        }),
    };
    emit(&report, args.io.format);
    Ok(ExitCode::SUCCESS)
}

fn product_agg_cmd(args: IoArgs) -> Result<ExitCode> {
    let (panel, sha) = load_panel(&args.input)?;
    let body = ReportBody::ProductAgg(product_report(&panel)?);
    let report = Report {
        meta: ReportMeta::new(sha, BTreeMap::new()),
        body,
    };
    emit(&report, args.format);
    Ok(ExitCode::SUCCESS)
}

fn seasonality_cmd(args: SeasonalityArgs) -> Result<ExitCode> {
    let (panel, sha) = load_panel(&args.io.input)?;
    let (orders, demand) = require_single_product(&panel)?;
    let shared = !args.per_series_seasonal;
    let body =
        ReportBody::Seasonality(classify_seasonality(&orders, &demand, args.period, shared)?);

    let mut params = BTreeMap::new();
    params.insert("period".into(), args.period.to_string());
    params.insert("shared_seasonal".into(), shared.to_string());
    let report = Report {
        meta: ReportMeta::new(sha, params),
        body,
    };
    emit(&report, args.io.format);
    Ok(ExitCode::SUCCESS)
}

fn simulate_cmd(args: SimulateArgs) -> Result<ExitCode> {
    let (mut config, sha) = match &args.config {
        Some(path) => {
            let text = read_input(&path.display().to_string())?;
            (
                SimConfig::from_key_values(&text)?,
                sha256_hex(text.as_bytes()),
            )
        }
        None => (SimConfig::default(), sha256_hex(b"")),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;

    let run = run_simulation(&config)?;
    let regimes = if args.k.is_empty() {
        if args.reps.is_some() {
            return Err(Error::InvalidArgument {
                reason: "--reps requires --k".into(),
            });
        }
        None
    } else {
        Some(monte_carlo_regimes(
            &config,
            &args.k,
            args.reps.unwrap_or(200),
        )?)
    };

    let mut params = BTreeMap::new();
    for line in config.to_key_values().lines() {
        if let Some((key, value)) = line.split_once('=') {
            params.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    if let Some(table) = &regimes {
        params.insert("reps".into(), table.reps.to_string());
        params.insert("regime_k".into(), join_ks(&args.k));
    }
    let report = Report {
        meta: ReportMeta::new(sha, params),
        body: ReportBody::Simulate(SimulatePayload { run, regimes }),
    };
    emit(&report, args.format);
    Ok(ExitCode::SUCCESS)
}

fn replicate_cmd() -> Result<ExitCode> {
    let checks = verify_reference_tables();
    let mut all_passed = true;
    for check in &checks {
        if check.passed() {
            println!("{}: PASS", check.label);
        } else {
            all_passed = false;
            println!("{}: FAIL", check.label);
            for failure in &check.failures {
                println!("  {failure}");
            }
        }
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn join_ks(ks: &[usize]) -> String {
    ks.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
