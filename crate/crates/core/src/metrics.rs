//! Performance statistics computed from an equity curve.
//!
//! Ratios use a zero risk-free rate. Sharpe divides by the sample (n-1)
//! standard deviation; Sortino divides by the root-mean-square of negative
//! returns over all n observations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backtest::BacktestResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceMetrics {
    pub sharpe: Option<f64>,
    pub sortino: Option<f64>,
    pub max_drawdown: f64,
    pub exposure: f64,
    pub total_return: f64,
    pub annualized_return: f64,
    pub n_trades: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Annualization {
    #[default]
    Geometric,
    Arithmetic,
}

impl fmt::Display for Annualization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Annualization::Geometric => "geometric",
            Annualization::Arithmetic => "arithmetic",
        })
    }
}

impl FromStr for Annualization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(Annualization::Geometric),
            "arithmetic" => Ok(Annualization::Arithmetic),
            other => Err(Error::InvalidConfig(format!("unknown annualization '{other}'"))),
        }
    }
}

/// Simple returns `e[t] / e[t-1] - 1`.
pub fn per_bar_returns(equity: &[f64]) -> Result<Vec<f64>> {
    if equity.len() < 2 {
        return Err(Error::InsufficientData);
    }
    Ok(equity.windows(2).map(|w| w[1] / w[0] - 1.0).collect())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Treats a dispersion as zero when it is indistinguishable from rounding
/// noise around the mean.
fn is_degenerate(dispersion: f64, mean: f64) -> bool {
    dispersion.is_nan() || dispersion <= 0.0 || dispersion <= 1e-12 * mean.abs()
}

pub fn sharpe_ratio(returns: &[f64], bars_per_year: f64) -> Option<f64> {
    if returns.len() < 2 {
        return None;
    }
    let m = mean(returns);
    let var = returns.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (returns.len() - 1) as f64;
    let sd = var.sqrt();
    if is_degenerate(sd, m) {
        return None;
    }
    Some(m / sd * bars_per_year.sqrt())
}

pub fn sortino_ratio(returns: &[f64], bars_per_year: f64) -> Option<f64> {
    if returns.is_empty() {
        return None;
    }
    let m = mean(returns);
    let downside = (returns
        .iter()
        .map(|&r| r.min(0.0) * r.min(0.0))
        .sum::<f64>()
        / returns.len() as f64)
        .sqrt();
    if downside.is_nan() || downside <= 0.0 {
        return None;
    }
    Some(m / downside * bars_per_year.sqrt())
}

/// Largest fractional decline from a running peak.
pub fn max_drawdown(equity: &[f64]) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0_f64;
    for &e in equity {
        if e > peak {
            peak = e;
        } else {
            worst = worst.max((peak - e) / peak);
        }
    }
    worst
}

pub fn exposure(result: &BacktestResult) -> f64 {
    if result.equity.is_empty() {
        0.0
    } else {
        result.bars_in_market as f64 / result.equity.len() as f64
    }
}

/// Total return and its geometric annualization over `len - 1` bar intervals.
pub fn total_and_annualized_return(equity: &[f64], bars_per_year: f64) -> Result<(f64, f64)> {
    if equity.len() < 2 {
        return Err(Error::InsufficientData);
    }
    let growth = equity[equity.len() - 1] / equity[0];
    let years = (equity.len() - 1) as f64 / bars_per_year;
    Ok((growth - 1.0, growth.powf(1.0 / years) - 1.0))
}

/// Mean per-bar return scaled to a year.
pub fn arithmetic_annualized_return(returns: &[f64], bars_per_year: f64) -> f64 {
    if returns.is_empty() {
        0.0
    } else {
        mean(returns) * bars_per_year
    }
}

/// All statistics for one backtest run.
pub fn compute_metrics(result: &BacktestResult, bars_per_year: f64) -> PerformanceMetrics {
    let n_trades = result.n_trades();
    let mut metrics = PerformanceMetrics {
        sharpe: None,
        sortino: None,
        max_drawdown: max_drawdown(&result.equity),
        exposure: exposure(result),
        total_return: 0.0,
        annualized_return: 0.0,
        n_trades,
    };
    let Ok(returns) = per_bar_returns(&result.equity) else {
        return metrics;
    };
    if let Ok((total, annualized)) = total_and_annualized_return(&result.equity, bars_per_year) {
        metrics.total_return = total;
        metrics.annualized_return = annualized;
    }
    if n_trades > 0 {
        metrics.sharpe = sharpe_ratio(&returns, bars_per_year);
        metrics.sortino = sortino_ratio(&returns, bars_per_year);
    }
    metrics
}
