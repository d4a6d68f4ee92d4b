//! Rolling walk-forward evaluation: fit on period k, trade period k+1.

use std::io::Write;

use chrono::{DateTime, Months};
use serde::{Deserialize, Serialize};

use crate::backtest::BacktestConfig;
use crate::error::{Error, Result};
use crate::indicators::AverageKind;
use crate::marketdata::{format_date, slice, PriceSeries, Timestamp};
use crate::metrics::{Annualization, PerformanceMetrics};
use crate::optimizer::{best_params, evaluate, grid_search, GridSpec};
use crate::strategy::StrategySpec;

/// A partial final window shorter than this fraction of a period is dropped.
const MIN_TAIL_FRACTION: f64 = 0.25;

pub const SKIP_NO_TRADES: &str = "no trades";
pub const SKIP_EMPTY_GRID: &str = "empty grid";
pub const SKIP_WINDOW_EXCEEDS_DATA: &str = "window exceeds data";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodLength {
    /// Calendar months from the anchor, e.g. 12 for yearly periods.
    Months(u32),
    Seconds(i64),
}

impl Default for PeriodLength {
    fn default() -> Self {
        PeriodLength::Months(12)
    }
}

impl PeriodLength {
    /// Boundary `k` periods after `anchor`. Computed from the anchor each
    /// time so month-end clamping never accumulates.
    fn boundary(self, anchor: Timestamp, k: u32) -> Result<Timestamp> {
        match self {
            PeriodLength::Seconds(s) => Ok(anchor + s * k as i64),
            PeriodLength::Months(m) => DateTime::from_timestamp(anchor, 0)
                .and_then(|d| d.checked_add_months(Months::new(m * k)))
                .map(|d| d.timestamp())
                .ok_or_else(|| Error::InvalidConfig("period boundary out of range".into())),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            PeriodLength::Months(0) | PeriodLength::Seconds(i64::MIN..=0) => {
                Err(Error::InvalidConfig("period length must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Half-open `[start, end)` time range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub start: Timestamp,
    pub end: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodPair {
    pub train: Bounds,
    pub test: Bounds,
}

/// Consecutive windows anchored at the first bar; pair k trains on window k
/// and tests on window k+1. A trailing partial window is kept as a short
/// test window when it spans at least a quarter of a period.
pub fn partition_periods(prices: &PriceSeries, period: PeriodLength) -> Result<Vec<PeriodPair>> {
    period.validate()?;
    if prices.is_empty() {
        return Err(Error::InsufficientHistory);
    }
    let anchor = prices.start();
    let end = prices.end();

    let mut windows = Vec::new();
    let mut k = 0u32;
    loop {
        let lo = period.boundary(anchor, k)?;
        let hi = period.boundary(anchor, k + 1)?;
        if hi <= end {
            windows.push(Bounds { start: lo, end: hi });
            k += 1;
            continue;
        }
        if windows.len() < 2 {
            return Err(Error::InsufficientHistory);
        }
        let tail = (end - lo) as f64;
        if tail > 0.0 && tail >= MIN_TAIL_FRACTION * (hi - lo) as f64 {
            windows.push(Bounds { start: lo, end });
        }
        break;
    }
    Ok(windows
        .windows(2)
        .map(|w| PeriodPair {
            train: w[0],
            test: w[1],
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkForwardPeriod {
    pub train: Bounds,
    pub test: Bounds,
    pub fitted: Option<(usize, usize)>,
    pub train_metrics: Option<PerformanceMetrics>,
    pub test_metrics: Option<PerformanceMetrics>,
    /// Out-of-sample return; 0 for skipped periods.
    pub period_return: f64,
    pub test_bars: usize,
    pub skipped_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterRow {
    pub train_start: String,
    pub test_start: String,
    pub short: usize,
    pub long: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkForwardReport {
    pub kind: AverageKind,
    pub grid: GridSpec,
    pub periods: Vec<WalkForwardPeriod>,
    pub combined_total_return: f64,
    /// Annualized figure under `annualization`.
    pub combined_annualized_return: f64,
    pub annualization: Annualization,
    pub combined_annualized_geometric: f64,
    pub combined_annualized_arithmetic: f64,
    pub years_tested: f64,
    pub per_period_parameter_table: Vec<ParameterRow>,
}

pub const PARAMETER_CSV_HEADER: &str = "train_start,test_start,short,long,train_sharpe,test_sharpe,test_return";

impl WalkForwardReport {
    pub fn with_annualization(mut self, method: Annualization) -> Self {
        self.annualization = method;
        self.combined_annualized_return = match method {
            Annualization::Geometric => self.combined_annualized_geometric,
            Annualization::Arithmetic => self.combined_annualized_arithmetic,
        };
        self
    }

    /// Per-period fitted parameters with in- and out-of-sample Sharpe.
    pub fn write_parameter_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{PARAMETER_CSV_HEADER}")?;
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for p in &self.periods {
            let Some((short, long)) = p.fitted else {
                continue;
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                format_date(p.train.start),
                format_date(p.test.start),
                short,
                long,
                fmt(p.train_metrics.and_then(|m| m.sharpe)),
                fmt(p.test_metrics.and_then(|m| m.sharpe)),
                p.period_return
            )?;
        }
        Ok(())
    }
}

pub fn walk_forward(
    prices: &PriceSeries,
    kind: AverageKind,
    grid: &GridSpec,
    config: &BacktestConfig,
    period: PeriodLength,
) -> Result<WalkForwardReport> {
    config.validate()?;
    let pairs = partition_periods(prices, period)?;
    let bars_per_year = config.bars_per_year_for(prices);

    let mut periods = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let train = slice(prices, pair.train.start, pair.train.end)?;
        let test = slice(prices, pair.test.start, pair.test.end)?;
        periods.push(run_period(&train, &test, pair, kind, grid, config)?);
    }

    let growth: f64 = periods.iter().map(|p| 1.0 + p.period_return).product();
    let total_bars: usize = periods.iter().map(|p| p.test_bars).sum();
    let years = total_bars as f64 / bars_per_year;
    let geometric = growth.powf(1.0 / years) - 1.0;
    let arithmetic = periods.iter().map(|p| p.period_return).sum::<f64>() / years;

    let per_period_parameter_table = periods
        .iter()
        .filter_map(|p| {
            p.fitted.map(|(short, long)| ParameterRow {
                train_start: format_date(p.train.start),
                test_start: format_date(p.test.start),
                short,
                long,
            })
        })
        .collect();

    Ok(WalkForwardReport {
        kind,
        grid: *grid,
        periods,
        combined_total_return: growth - 1.0,
        combined_annualized_return: geometric,
        annualization: Annualization::Geometric,
        combined_annualized_geometric: geometric,
        combined_annualized_arithmetic: arithmetic,
        years_tested: years,
        per_period_parameter_table,
    })
}

fn run_period(
    train: &PriceSeries,
    test: &PriceSeries,
    bounds: PeriodPair,
    kind: AverageKind,
    grid: &GridSpec,
    config: &BacktestConfig,
) -> Result<WalkForwardPeriod> {
    let mut period = WalkForwardPeriod {
        train: bounds.train,
        test: bounds.test,
        fitted: None,
        train_metrics: None,
        test_metrics: None,
        period_return: 0.0,
        test_bars: test.len(),
        skipped_reason: None,
    };
    let skip = |mut p: WalkForwardPeriod, reason: &str| {
        p.skipped_reason = Some(reason.to_string());
        Ok(p)
    };

    let surface = match grid_search(train, kind, grid, config) {
        Ok(s) => s,
        Err(Error::EmptyGrid) => return skip(period, SKIP_EMPTY_GRID),
        Err(e) => return Err(e),
    };
    let best = match best_params(&surface) {
        Ok(b) => b,
        Err(Error::NoTradeableParameters) => return skip(period, SKIP_NO_TRADES),
        Err(e) => return Err(e),
    };
    period.fitted = Some((best.short, best.long));
    period.train_metrics = Some(best.metrics);

    let spec = StrategySpec::new(kind, best.short, best.long)?;
    let eval = match evaluate(test, &spec, config) {
        Ok(e) => e,
        Err(Error::WindowExceedsData) => return skip(period, SKIP_WINDOW_EXCEEDS_DATA),
        Err(e) => return Err(e),
    };
    period.test_metrics = Some(eval.metrics);
    if eval.metrics.n_trades == 0 {
        return skip(period, SKIP_NO_TRADES);
    }
    period.period_return = eval.metrics.total_return;
    Ok(period)
}
