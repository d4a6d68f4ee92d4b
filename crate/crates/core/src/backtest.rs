//! All-in long/flat portfolio simulation over a signal series.
//!
//! Frictionless: trades fill at the signalling bar's close with no fees or
//! slippage, and fractional units are allowed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marketdata::PriceSeries;
use crate::strategy::{Signal, SignalSeries};

pub const DEFAULT_INITIAL_CASH: f64 = 10_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub initial_cash: f64,
    pub entry_on_start: bool,
    /// Annualization override; `None` derives it from the series resolution.
    pub bars_per_year: Option<f64>,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig {
            initial_cash: DEFAULT_INITIAL_CASH,
            entry_on_start: true,
            bars_per_year: None,
        }
    }
}

impl BacktestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_cash.is_finite() && self.initial_cash > 0.0) {
            return Err(Error::InvalidConfig("initial_cash must be positive".into()));
        }
        if let Some(b) = self.bars_per_year {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::InvalidConfig("bars_per_year must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn bars_per_year_for(&self, prices: &PriceSeries) -> f64 {
        self.bars_per_year
            .unwrap_or_else(|| prices.resolution().bars_per_year())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Buy,
    Sell,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trade {
    pub bar: usize,
    pub side: Side,
    pub price: f64,
    pub units: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestResult {
    pub equity: Vec<f64>,
    pub trades: Vec<Trade>,
    /// Bars whose close finds a nonzero position held.
    pub bars_in_market: usize,
    /// Per-bar holding flag, aligned with `equity`.
    pub in_market: Vec<bool>,
}

impl BacktestResult {
    pub fn n_trades(&self) -> usize {
        self.trades.len()
    }

    /// Equity curve on the price series' grid, usable wherever a
    /// [`PriceSeries`] is expected.
    pub fn equity_series(&self, prices: &PriceSeries) -> Result<PriceSeries> {
        if self.equity.len() != prices.len() {
            return Err(Error::Misaligned {
                left: self.equity.len(),
                right: prices.len(),
            });
        }
        // Carry the source's filled flags only where equity actually repeats.
        let filled = prices
            .filled()
            .iter()
            .enumerate()
            .map(|(i, &f)| f && i > 0 && self.equity[i] == self.equity[i - 1])
            .collect();
        PriceSeries::new(
            format!("{}:equity", prices.asset_id()),
            prices.resolution(),
            prices.start(),
            self.equity.clone(),
            filled,
        )
    }
}

pub fn run_backtest(
    prices: &PriceSeries,
    signals: &SignalSeries,
    config: &BacktestConfig,
) -> Result<BacktestResult> {
    config.validate()?;
    if prices.len() != signals.len() {
        return Err(Error::Misaligned {
            left: prices.len(),
            right: signals.len(),
        });
    }
    let closes = prices.closes();
    let mut cash = config.initial_cash;
    let mut units = 0.0_f64;
    let mut equity = Vec::with_capacity(closes.len());
    let mut in_market = Vec::with_capacity(closes.len());
    let mut trades = Vec::new();

    for (bar, (&close, &signal)) in closes.iter().zip(signals.signals()).enumerate() {
        match signal {
            Signal::Buy if units == 0.0 => {
                units = cash / close;
                cash = 0.0;
                trades.push(Trade {
                    bar,
                    side: Side::Buy,
                    price: close,
                    units,
                });
            }
            Signal::Sell if units > 0.0 => {
                cash = units * close;
                trades.push(Trade {
                    bar,
                    side: Side::Sell,
                    price: close,
                    units,
                });
                units = 0.0;
            }
            _ => {}
        }
        let long = units > 0.0;
        equity.push(if long { units * close } else { cash });
        in_market.push(long);
    }

    let bars_in_market = in_market.iter().filter(|&&b| b).count();
    Ok(BacktestResult {
        equity,
        trades,
        bars_in_market,
        in_market,
    })
}
