//! Moving-average trend-following research toolkit.
//!
//! The pipeline runs bottom-up:
//! [`marketdata`] ingests ticks or daily OHLC onto a uniform bar grid,
//! [`indicators`] computes SMA/EMA/DEMA, [`strategy`] turns a short/long pair
//! into crossover signals, [`backtest`] runs the all-in long/flat ledger and
//! [`metrics`] scores the equity curve. [`optimizer`] sweeps the window grid,
//! [`walkforward`] chains year-on-year out-of-sample runs and [`analysis`]
//! measures cross-asset correlation. [`cli`] wires it all to the `trendlab`
//! binary.

pub mod analysis;
pub mod backtest;
pub mod cli;
pub mod error;
pub mod indicators;
pub mod marketdata;
pub mod metrics;
pub mod optimizer;
pub mod strategy;
pub mod walkforward;

pub use analysis::{
    align_daily, correlation_significance, rolling_correlation, CorrelationSeries, PairedReturns,
    Significance,
};
pub use backtest::{run_backtest, BacktestConfig, BacktestResult, Side, Trade};
pub use error::{Error, Result};
pub use indicators::{dema, ema, sma, AverageKind, IndicatorSeries};
pub use marketdata::{
    parse_ohlc_csv, parse_tick_csv, resample, slice, PriceSeries, Resolution, Tick, TickSeries,
    Timestamp,
};
pub use metrics::{compute_metrics, Annualization, PerformanceMetrics};
pub use optimizer::{best_params, evaluate, grid_search, BestParams, Evaluation, GridSpec, SharpeSurface};
pub use strategy::{crossover_signals, Signal, SignalSeries, StrategySpec};
pub use walkforward::{partition_periods, walk_forward, PeriodLength, WalkForwardReport};
