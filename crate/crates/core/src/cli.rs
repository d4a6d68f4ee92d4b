//! `trendlab` command-line front end.
//!
//! Every subcommand writes its outputs into `--out` together with a
//! `manifest.json` recording inputs (with SHA-256 digests), the resolved
//! parameters and output digests. Exit codes: 0 success, 2 usage or
//! validation error, 1 runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{
    align_daily, correlation_significance, rolling_correlation, write_correlation_csv,
    PairedReturns,
};
use crate::backtest::{BacktestConfig, DEFAULT_INITIAL_CASH};
use crate::error::Error;
use crate::indicators::AverageKind;
use crate::marketdata::{
    date_to_timestamp, format_date, format_datetime, parse_ohlc_csv, parse_tick_csv, resample,
    slice, PriceSeries, Resolution,
};
use crate::metrics::{arithmetic_annualized_return, per_bar_returns, Annualization};
use crate::optimizer::{best_params, evaluate, grid_search, GridSpec};
use crate::strategy::StrategySpec;
use crate::walkforward::{walk_forward, PeriodLength};

pub const THREADS_ENV: &str = "TRENDLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "trendlab", version, about = "Moving-average trend-following backtester")]
pub struct Cli {
    /// Worker threads for grid evaluation (default: available parallelism)
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Resample a data file and report its grid and gap statistics
    Ingest(IngestArgs),
    /// Backtest one (short, long) crossover strategy
    Backtest(BacktestArgs),
    /// Evaluate every (short, long) pair of a window grid
    Grid(GridArgs),
    /// Fit on each period and trade the next, chaining the results
    Walkforward(WalkforwardArgs),
    /// Rolling and full-period correlation of daily returns
    Correlate(CorrelateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DataFormat {
    /// Headerless `unix_seconds,price,volume`
    Ticks,
    /// Daily `Date,Open,High,Low,Close,Adj Close,Volume`
    Ohlc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Sma,
    Ema,
    Dema,
}

impl From<KindArg> for AverageKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Sma => AverageKind::Sma,
            KindArg::Ema => AverageKind::Ema,
            KindArg::Dema => AverageKind::Dema,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnnualizationArg {
    Geometric,
    Arithmetic,
}

impl From<AnnualizationArg> for Annualization {
    fn from(a: AnnualizationArg) -> Self {
        match a {
            AnnualizationArg::Geometric => Annualization::Geometric,
            AnnualizationArg::Arithmetic => Annualization::Arithmetic,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct DataArgs {
    /// Input file, or `-` for standard input
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "ticks")]
    format: DataFormat,
    /// Bar size for tick data (default 1h); OHLC input is always daily
    #[arg(long)]
    resample: Option<String>,
    /// First date to keep (YYYY-MM-DD, UTC)
    #[arg(long)]
    from: Option<String>,
    /// Last date to keep, inclusive (YYYY-MM-DD, UTC)
    #[arg(long)]
    to: Option<String>,
}

#[derive(Debug, Clone, Args)]
struct OutArgs {
    /// Output directory
    #[arg(long, default_value = "trendlab-out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Args)]
struct PortfolioArgs {
    #[arg(long, value_enum, default_value = "sma")]
    kind: KindArg,
    /// Enter on the first bar where the averages differ instead of waiting
    /// for the first crossing
    #[arg(long, default_value = "true", action = clap::ArgAction::Set)]
    entry_on_start: bool,
    #[arg(long, default_value_t = DEFAULT_INITIAL_CASH)]
    initial_cash: f64,
    /// Annualization factor (default: from resolution, 8760 hourly / 365 daily)
    #[arg(long)]
    bars_per_year: Option<f64>,
}

impl PortfolioArgs {
    fn config(&self) -> BacktestConfig {
        BacktestConfig {
            initial_cash: self.initial_cash,
            entry_on_start: self.entry_on_start,
            bars_per_year: self.bars_per_year,
        }
    }
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct BacktestArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    portfolio: PortfolioArgs,
    #[arg(long)]
    short: usize,
    #[arg(long)]
    long: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    portfolio: PortfolioArgs,
    /// `min,max,step` (default 1,991,10 for sub-daily bars, 1,50,1 daily)
    #[arg(long)]
    grid: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct WalkforwardArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    portfolio: PortfolioArgs,
    /// `min,max,step` for each training fit (same defaults as `grid`)
    #[arg(long)]
    grid: Option<String>,
    /// Period length in calendar months
    #[arg(long, default_value_t = 12)]
    period_months: u32,
    #[arg(long, value_enum, default_value = "geometric")]
    annualization: AnnualizationArg,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Second input file
    #[arg(long)]
    other: PathBuf,
    #[arg(long, value_enum, default_value = "ohlc")]
    other_format: DataFormat,
    #[arg(long)]
    other_resample: Option<String>,
    #[arg(long, default_value_t = 20)]
    window: usize,
    /// Also correlate strategy returns: short window for the first input
    #[arg(long, requires = "long")]
    short: Option<usize>,
    #[arg(long, requires = "short")]
    long: Option<usize>,
    /// Windows for the second input (default: same as the first)
    #[arg(long, requires = "other_long")]
    other_short: Option<usize>,
    #[arg(long, requires = "other_short")]
    other_long: Option<usize>,
    #[command(flatten)]
    portfolio: PortfolioArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::NoTradeableParameters | Error::DegenerateSeries) => 1,
            CliError::Core(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors are printed to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    let threads = pool.current_num_threads();
    pool.install(|| match cli.command {
        Command::Ingest(a) => cmd_ingest(a, threads),
        Command::Backtest(a) => cmd_backtest(a, threads),
        Command::Grid(a) => cmd_grid(a, threads),
        Command::Walkforward(a) => cmd_walkforward(a, threads),
        Command::Correlate(a) => cmd_correlate(a, threads),
    })
}

#[derive(Debug, Clone, Serialize)]
struct InputFile {
    path: String,
    sha256: String,
    bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
struct OutputFile {
    file: String,
    sha256: String,
}

/// Reproducibility record written next to every set of outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    command: String,
    tool_version: String,
    input_files: Vec<InputFile>,
    parameters: Value,
    outputs: Vec<OutputFile>,
    started: String,
    finished: String,
}

struct Run {
    command: &'static str,
    started: String,
    inputs: Vec<InputFile>,
    parameters: Value,
    out_dir: PathBuf,
    outputs: Vec<OutputFile>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Run {
    fn new(command: &'static str, out: &OutArgs) -> CliResult<Self> {
        fs::create_dir_all(&out.out).map_err(|e| {
            CliError::Runtime(format!("cannot create {}: {e}", out.out.display()))
        })?;
        Ok(Run {
            command,
            started: now(),
            inputs: Vec::new(),
            parameters: Value::Null,
            out_dir: out.out.clone(),
            outputs: Vec::new(),
        })
    }

    fn read_input(&mut self, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = if path == Path::new("-") {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| CliError::Runtime(format!("reading stdin: {e}")))?;
            buf
        } else {
            fs::read(path).map_err(|e| {
                CliError::Usage(format!("{}: {} ({e})", Error::NoData, path.display()))
            })?
        };
        self.inputs.push(InputFile {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len(),
        });
        Ok(bytes)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.out_dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
        self.outputs.push(OutputFile {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| CliError::Runtime(format!("serializing {name}: {e}")))?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    fn write_with(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>,
    ) -> CliResult<()> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| CliError::Runtime(format!("rendering {name}: {e}")))?;
        self.write(name, &buf)
    }

    fn finish(self) -> CliResult<()> {
        let manifest = RunManifest {
            command: self.command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_files: self.inputs,
            parameters: self.parameters,
            outputs: self.outputs,
            started: self.started,
            finished: now(),
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)
            .map_err(|e| CliError::Runtime(format!("serializing manifest: {e}")))?;
        bytes.push(b'\n');
        let path = self.out_dir.join("manifest.json");
        fs::write(&path, bytes)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
    }
}

fn parse_date(flag: &str, s: &str) -> CliResult<i64> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map(date_to_timestamp)
        .map_err(|_| CliError::Usage(format!("{flag}: expected YYYY-MM-DD, got '{s}'")))
}

fn load_series(
    run: &mut Run,
    path: &Path,
    format: DataFormat,
    resolution: Option<&str>,
    from: Option<&str>,
    to: Option<&str>,
) -> CliResult<PriceSeries> {
    let bytes = run.read_input(path)?;
    let series = match format {
        DataFormat::Ticks => {
            let res: Resolution = resolution.unwrap_or("1h").parse()?;
            let ticks = parse_tick_csv(bytes.as_slice())?;
            resample(&ticks, res)?
        }
        DataFormat::Ohlc => {
            if let Some(r) = resolution {
                if r.parse::<Resolution>()? != Resolution::DAILY {
                    return Err(CliError::Usage("OHLC input is daily; use --resample 1d".into()));
                }
            }
            parse_ohlc_csv(bytes.as_slice())?
        }
    };
    let asset = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "stdin".into());
    let series = series.with_asset_id(asset);
    if from.is_none() && to.is_none() {
        return Ok(series);
    }
    let start = from.map(|f| parse_date("--from", f)).transpose()?.unwrap_or(series.start());
    let end = to
        .map(|t| parse_date("--to", t).map(|d| d + 86_400))
        .transpose()?
        .unwrap_or(series.end());
    Ok(slice(&series, start, end)?)
}

fn load_data(run: &mut Run, d: &DataArgs) -> CliResult<PriceSeries> {
    load_series(
        run,
        &d.data,
        d.format,
        d.resample.as_deref(),
        d.from.as_deref(),
        d.to.as_deref(),
    )
}

fn series_summary(s: &PriceSeries) -> Value {
    json!({
        "asset": s.asset_id(),
        "resolution": s.resolution().to_string(),
        "bars": s.len(),
        "filled_bars": s.filled_count(),
        "observed_bars": s.len() - s.filled_count(),
        "first_bar": format_datetime(s.start()),
        "last_bar": s.len().checked_sub(1).map(|i| format_datetime(s.timestamp(i))),
    })
}

fn data_parameters(d: &DataArgs) -> Value {
    json!({
        "data": d.data.display().to_string(),
        "format": d.format,
        "resample": d.resample,
        "from": d.from,
        "to": d.to,
    })
}

fn parse_grid(arg: Option<&str>, resolution: Resolution) -> CliResult<GridSpec> {
    let Some(arg) = arg else {
        return Ok(if resolution >= Resolution::DAILY {
            GridSpec::DAILY_DEFAULT
        } else {
            GridSpec::HOURLY_DEFAULT
        });
    };
    let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| p.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--grid: expected min,max,step, got '{arg}'")))?;
    match nums.as_slice() {
        &[min, max, step] => Ok(GridSpec::new(min, max, step)?),
        _ => Err(CliError::Usage(format!("--grid: expected min,max,step, got '{arg}'"))),
    }
}

fn cmd_ingest(a: IngestArgs, threads: usize) -> CliResult<()> {
    let mut run = Run::new("ingest", &a.out)?;
    let series = load_data(&mut run, &a.data)?;
    run.parameters = json!({ "data": data_parameters(&a.data), "threads": threads });
    run.write_with("series.csv", |out| {
        writeln!(out, "timestamp,datetime,close,filled")?;
        for bar in series.bars() {
            writeln!(
                out,
                "{},{},{},{}",
                bar.timestamp,
                format_datetime(bar.timestamp),
                bar.close,
                bar.filled
            )?;
        }
        Ok(())
    })?;
    run.write_json("summary.json", &series_summary(&series))?;
    run.finish()
}

fn cmd_backtest(a: BacktestArgs, threads: usize) -> CliResult<()> {
    let spec = StrategySpec::new(a.portfolio.kind.into(), a.short, a.long)?;
    let config = a.portfolio.config();
    config.validate()?;
    let mut run = Run::new("backtest", &a.out)?;
    let prices = load_data(&mut run, &a.data)?;
    let eval = evaluate(&prices, &spec, &config)?;
    let bars_per_year = config.bars_per_year_for(&prices);
    let arithmetic = per_bar_returns(&eval.result.equity)
        .map(|r| arithmetic_annualized_return(&r, bars_per_year))
        .unwrap_or(0.0);

    run.parameters = json!({
        "data": data_parameters(&a.data),
        "strategy": spec,
        "config": config,
        "bars_per_year": bars_per_year,
        "threads": threads,
    });
    run.write_json(
        "metrics.json",
        &json!({
            "series": series_summary(&prices),
            "strategy": spec,
            "bars_per_year": bars_per_year,
            "metrics": eval.metrics,
            "annualized_return_arithmetic": arithmetic,
            "final_equity": eval.result.equity.last(),
        }),
    )?;
    run.write_with("equity.csv", |out| {
        writeln!(out, "timestamp,datetime,close,equity,in_market")?;
        for (i, bar) in prices.bars().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                bar.timestamp,
                format_datetime(bar.timestamp),
                bar.close,
                eval.result.equity[i],
                eval.result.in_market[i]
            )?;
        }
        Ok(())
    })?;
    run.write_with("trades.csv", |out| {
        writeln!(out, "bar,timestamp,datetime,side,price,units")?;
        for t in &eval.result.trades {
            let ts = prices.timestamp(t.bar);
            let side = match t.side {
                crate::backtest::Side::Buy => "buy",
                crate::backtest::Side::Sell => "sell",
            };
            writeln!(
                out,
                "{},{},{},{},{},{}",
                t.bar,
                ts,
                format_datetime(ts),
                side,
                t.price,
                t.units
            )?;
        }
        Ok(())
    })?;
    run.finish()
}

fn cmd_grid(a: GridArgs, threads: usize) -> CliResult<()> {
    let config = a.portfolio.config();
    config.validate()?;
    let mut run = Run::new("grid", &a.out)?;
    let prices = load_data(&mut run, &a.data)?;
    let grid = parse_grid(a.grid.as_deref(), prices.resolution())?;
    let kind: AverageKind = a.portfolio.kind.into();
    let surface = grid_search(&prices, kind, &grid, &config)?;
    let best = best_params(&surface);

    run.parameters = json!({
        "data": data_parameters(&a.data),
        "kind": kind,
        "grid": grid,
        "config": config,
        "threads": threads,
    });
    run.write_with("surface.csv", |out| surface.write_csv(out))?;
    run.write_json("surface.json", &surface.to_dense_json())?;
    run.write_json(
        "best.json",
        &json!({
            "series": series_summary(&prices),
            "kind": kind,
            "grid": grid,
            "cells": surface.len(),
            "best": best.as_ref().ok(),
            "error": best.as_ref().err().map(|e| e.to_string()),
        }),
    )?;
    run.finish()
}

fn cmd_walkforward(a: WalkforwardArgs, threads: usize) -> CliResult<()> {
    let config = a.portfolio.config();
    config.validate()?;
    let mut run = Run::new("walkforward", &a.out)?;
    let prices = load_data(&mut run, &a.data)?;
    let grid = parse_grid(a.grid.as_deref(), prices.resolution())?;
    let kind: AverageKind = a.portfolio.kind.into();
    let report = walk_forward(&prices, kind, &grid, &config, PeriodLength::Months(a.period_months))?
        .with_annualization(a.annualization.into());

    run.parameters = json!({
        "data": data_parameters(&a.data),
        "kind": kind,
        "grid": grid,
        "config": config,
        "period_months": a.period_months,
        "annualization": Annualization::from(a.annualization),
        "threads": threads,
    });
    run.write_json(
        "walkforward.json",
        &json!({ "series": series_summary(&prices), "report": report }),
    )?;
    run.write_with("parameters.csv", |out| report.write_parameter_csv(out))?;
    run.finish()
}

fn correlation_outputs(
    run: &mut Run,
    prefix: &str,
    pairs: &PairedReturns,
    window: usize,
) -> CliResult<()> {
    let rolling = rolling_correlation(pairs, window)?;
    let significance = correlation_significance(pairs);
    run.write_with(&format!("{prefix}correlation.csv"), |out| {
        write_correlation_csv(out, pairs, &rolling)
    })?;
    let defined: Vec<f64> = rolling.values.iter().flatten().copied().collect();
    let mean_rolling = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    run.write_json(
        &format!("{prefix}significance.json"),
        &json!({
            "window": window,
            "paired_days": pairs.len(),
            "first_day": pairs.days.first().map(|&d| format_date(d)),
            "last_day": pairs.days.last().map(|&d| format_date(d)),
            "mean_rolling_correlation": mean_rolling,
            "significance": significance.as_ref().ok(),
            "error": significance.as_ref().err().map(|e| e.to_string()),
        }),
    )
}

fn cmd_correlate(a: CorrelateArgs, threads: usize) -> CliResult<()> {
    if a.window < 2 {
        return Err(CliError::Core(Error::CorrelationWindowTooSmall));
    }
    let config = a.portfolio.config();
    config.validate()?;
    let kind: AverageKind = a.portfolio.kind.into();
    let first_spec = match (a.short, a.long) {
        (Some(s), Some(l)) => Some(StrategySpec::new(kind, s, l)?),
        _ => None,
    };
    let second_spec = match (a.other_short, a.other_long) {
        (Some(s), Some(l)) => Some(StrategySpec::new(kind, s, l)?),
        _ => first_spec,
    };

    let mut run = Run::new("correlate", &a.out)?;
    let first = load_data(&mut run, &a.data)?;
    let second = load_series(
        &mut run,
        &a.other,
        a.other_format,
        a.other_resample.as_deref(),
        a.data.from.as_deref(),
        a.data.to.as_deref(),
    )?;
    run.parameters = json!({
        "data": data_parameters(&a.data),
        "other": a.other.display().to_string(),
        "other_format": a.other_format,
        "other_resample": a.other_resample,
        "window": a.window,
        "strategy": first_spec,
        "other_strategy": second_spec,
        "config": config,
        "threads": threads,
    });

    let pairs = align_daily(&first, &second)?;
    correlation_outputs(&mut run, "", &pairs, a.window)?;

    if let (Some(s1), Some(s2)) = (first_spec, second_spec) {
        let e1 = evaluate(&first, &s1, &config)?;
        let e2 = evaluate(&second, &s2, &config)?;
        let eq1 = e1.result.equity_series(&first)?;
        let eq2 = e2.result.equity_series(&second)?;
        let strategy_pairs = align_daily(&eq1, &eq2)?;
        correlation_outputs(&mut run, "strategy_", &strategy_pairs, a.window)?;
    }
    run.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag_parsing() {
        assert_eq!(
            parse_grid(None, Resolution::HOURLY).unwrap(),
            GridSpec::HOURLY_DEFAULT
        );
        assert_eq!(
            parse_grid(None, Resolution::DAILY).unwrap(),
            GridSpec::DAILY_DEFAULT
        );
        assert_eq!(
            parse_grid(Some("1, 50, 1"), Resolution::HOURLY).unwrap(),
            GridSpec::new(1, 50, 1).unwrap()
        );
        assert!(matches!(parse_grid(Some("1,50"), Resolution::HOURLY), Err(CliError::Usage(_))));
        assert!(matches!(parse_grid(Some("0,50,1"), Resolution::HOURLY), Err(CliError::Core(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Core(Error::ShortNotBelowLong).exit_code(), 2);
        assert_eq!(CliError::Core(Error::InsufficientHistory).exit_code(), 2);
        assert_eq!(CliError::Core(Error::NoTradeableParameters).exit_code(), 1);
        assert_eq!(CliError::Runtime("x".into()).exit_code(), 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["trendlab", "--help"]), 0);
        assert_eq!(run(["trendlab", "bogus"]), 2);
    }
}
