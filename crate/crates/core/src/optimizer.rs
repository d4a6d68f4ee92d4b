//! Exhaustive (short, long) window search.
//!
//! Each distinct window's average is computed once up front; every pair then
//! reuses the cached series. Cells are evaluated in parallel and merged into
//! an ordered map, so the surface does not depend on scheduling.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::backtest::{run_backtest, BacktestConfig, BacktestResult};
use crate::error::{Error, Result};
use crate::indicators::{indicator, AverageKind, IndicatorSeries};
use crate::marketdata::{PriceSeries, Timestamp};
use crate::metrics::{compute_metrics, PerformanceMetrics};
use crate::strategy::{crossover_signals, signals_from_indicators, SignalSeries, StrategySpec};

/// Candidate windows `min, min + step, ...` up to and including `max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub min_window: usize,
    pub max_window: usize,
    pub step: usize,
}

impl GridSpec {
    /// Hourly lattice 1, 11, ..., 991.
    pub const HOURLY_DEFAULT: GridSpec = GridSpec {
        min_window: 1,
        max_window: 991,
        step: 10,
    };
    /// Daily windows 1..=50.
    pub const DAILY_DEFAULT: GridSpec = GridSpec {
        min_window: 1,
        max_window: 50,
        step: 1,
    };

    pub fn new(min_window: usize, max_window: usize, step: usize) -> Result<Self> {
        if min_window < 1 || step < 1 || max_window < min_window {
            return Err(Error::InvalidConfig(format!(
                "grid requires min >= 1, step >= 1, max >= min (got {min_window},{max_window},{step})"
            )));
        }
        Ok(GridSpec {
            min_window,
            max_window,
            step,
        })
    }

    pub fn windows(&self) -> Vec<usize> {
        (self.min_window..=self.max_window)
            .step_by(self.step)
            .collect()
    }

    /// All `(short, long)` pairs with `short < long`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let w = self.windows();
        let mut out = Vec::with_capacity(w.len() * w.len().saturating_sub(1) / 2);
        for (i, &s) in w.iter().enumerate() {
            for &l in &w[i + 1..] {
                out.push((s, l));
            }
        }
        out
    }
}

/// Signals, ledger and statistics for one strategy run.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub signals: SignalSeries,
    pub result: BacktestResult,
    pub metrics: PerformanceMetrics,
}

/// Runs one strategy end to end, computing its averages from scratch.
pub fn evaluate(
    prices: &PriceSeries,
    spec: &StrategySpec,
    config: &BacktestConfig,
) -> Result<Evaluation> {
    config.validate()?;
    let signals = crossover_signals(prices, spec, config.entry_on_start)?;
    let result = run_backtest(prices, &signals, config)?;
    let metrics = compute_metrics(&result, config.bars_per_year_for(prices));
    Ok(Evaluation {
        signals,
        result,
        metrics,
    })
}

fn evaluate_cached(
    prices: &PriceSeries,
    short: &IndicatorSeries,
    long: &IndicatorSeries,
    config: &BacktestConfig,
    bars_per_year: f64,
) -> Result<PerformanceMetrics> {
    let signals = signals_from_indicators(short, long, config.entry_on_start)?;
    let result = run_backtest(prices, &signals, config)?;
    Ok(compute_metrics(&result, bars_per_year))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpeSurface {
    pub kind: AverageKind,
    pub grid: GridSpec,
    pub cells: BTreeMap<(usize, usize), PerformanceMetrics>,
    pub slice_bounds: (Timestamp, Timestamp),
}

pub const SURFACE_CSV_HEADER: &str =
    "kind,short,long,sharpe,sortino,max_drawdown,exposure,total_return,n_trades";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SharpeSurface {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, short: usize, long: usize) -> Option<&PerformanceMetrics> {
        self.cells.get(&(short, long))
    }

    /// Long-form CSV, one row per cell; absent ratios are empty fields.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{SURFACE_CSV_HEADER}")?;
        for (&(s, l), m) in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.kind,
                s,
                l,
                opt(m.sharpe),
                opt(m.sortino),
                m.max_drawdown,
                m.exposure,
                m.total_return,
                m.n_trades
            )?;
        }
        Ok(())
    }

    /// Dense matrices indexed `[short][long]` over the grid's windows, with
    /// null for pairs that are invalid or absent from the surface.
    pub fn to_dense_json(&self) -> serde_json::Value {
        let windows = self.grid.windows();
        let matrix = |f: &dyn Fn(&PerformanceMetrics) -> Option<f64>| -> Vec<Vec<Option<f64>>> {
            windows
                .iter()
                .map(|&s| {
                    windows
                        .iter()
                        .map(|&l| self.cells.get(&(s, l)).and_then(f))
                        .collect()
                })
                .collect()
        };
        json!({
            "kind": self.kind,
            "grid": self.grid,
            "slice_bounds": [self.slice_bounds.0, self.slice_bounds.1],
            "short_windows": windows,
            "long_windows": windows,
            "sharpe": matrix(&|m| m.sharpe),
            "sortino": matrix(&|m| m.sortino),
            "total_return": matrix(&|m| Some(m.total_return)),
        })
    }
}

/// Evaluates every grid pair whose long window fits in `prices`.
pub fn grid_search(
    prices: &PriceSeries,
    kind: AverageKind,
    grid: &GridSpec,
    config: &BacktestConfig,
) -> Result<SharpeSurface> {
    config.validate()?;
    let pairs: Vec<(usize, usize)> = grid
        .pairs()
        .into_iter()
        .filter(|&(_, l)| l <= prices.len())
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptyGrid);
    }

    let mut windows: Vec<usize> = pairs.iter().flat_map(|&(s, l)| [s, l]).collect();
    windows.sort_unstable();
    windows.dedup();
    let cache: BTreeMap<usize, IndicatorSeries> = windows
        .par_iter()
        .map(|&w| indicator(kind, prices.closes(), w).map(|ind| (w, ind)))
        .collect::<Result<_>>()?;

    let bars_per_year = config.bars_per_year_for(prices);
    let cells = pairs
        .par_iter()
        .map(|&(s, l)| {
            evaluate_cached(prices, &cache[&s], &cache[&l], config, bars_per_year)
                .map(|m| ((s, l), m))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;

    Ok(SharpeSurface {
        kind,
        grid: *grid,
        cells,
        slice_bounds: (prices.start(), prices.end()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestParams {
    pub short: usize,
    pub long: usize,
    pub metrics: PerformanceMetrics,
}

/// Highest-Sharpe cell; ties go to the smaller long window, then the
/// smaller short window. Cells without a Sharpe ratio never win.
pub fn best_params(surface: &SharpeSurface) -> Result<BestParams> {
    let mut best: Option<(f64, usize, usize, &PerformanceMetrics)> = None;
    for (&(s, l), m) in &surface.cells {
        let Some(sharpe) = m.sharpe.filter(|v| v.is_finite()) else {
            continue;
        };
        let better = match best {
            None => true,
            Some((bs, bshort, blong, _)) => {
                sharpe > bs || (sharpe == bs && (l, s) < (blong, bshort))
            }
        };
        if better {
            best = Some((sharpe, s, l, m));
        }
    }
    best.map(|(_, short, long, m)| BestParams {
        short,
        long,
        metrics: *m,
    })
    .ok_or(Error::NoTradeableParameters)
}
