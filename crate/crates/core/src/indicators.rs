//! Rolling averages: simple, exponential and double exponential.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marketdata::PriceSeries;

/// Running sums are rebuilt from scratch at this interval to bound drift.
const SMA_RESYNC_INTERVAL: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AverageKind {
    Sma,
    Ema,
    Dema,
}

impl AverageKind {
    pub const ALL: [AverageKind; 3] = [AverageKind::Sma, AverageKind::Ema, AverageKind::Dema];

    pub fn as_str(self) -> &'static str {
        match self {
            AverageKind::Sma => "sma",
            AverageKind::Ema => "ema",
            AverageKind::Dema => "dema",
        }
    }
}

impl fmt::Display for AverageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AverageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sma" => Ok(AverageKind::Sma),
            "ema" => Ok(AverageKind::Ema),
            "dema" => Ok(AverageKind::Dema),
            other => Err(Error::InvalidConfig(format!("unknown average kind '{other}'"))),
        }
    }
}

/// A rolling average aligned bar-for-bar with its source series. Entries
/// before `warmup` are undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    kind: AverageKind,
    window: usize,
    warmup: usize,
    values: Vec<f64>,
}

impl IndicatorSeries {
    pub fn kind(&self) -> AverageKind {
        self.kind
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn warmup(&self) -> usize {
        self.warmup
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        if index < self.warmup {
            None
        } else {
            self.values.get(index).copied()
        }
    }

    /// Raw values; entries before `warmup` are NaN.
    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    pub fn to_options(&self) -> Vec<Option<f64>> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

fn check_window(window: usize, len: usize) -> Result<()> {
    if window < 1 {
        return Err(Error::InvalidWindow);
    }
    if window > len {
        return Err(Error::WindowExceedsData);
    }
    Ok(())
}

pub fn sma(prices: &PriceSeries, window: usize) -> Result<IndicatorSeries> {
    indicator(AverageKind::Sma, prices.closes(), window)
}

pub fn ema(prices: &PriceSeries, window: usize) -> Result<IndicatorSeries> {
    indicator(AverageKind::Ema, prices.closes(), window)
}

pub fn dema(prices: &PriceSeries, window: usize) -> Result<IndicatorSeries> {
    indicator(AverageKind::Dema, prices.closes(), window)
}

/// Computes `kind` over raw closes.
pub fn indicator(kind: AverageKind, closes: &[f64], window: usize) -> Result<IndicatorSeries> {
    check_window(window, closes.len())?;
    let (values, warmup) = match kind {
        AverageKind::Sma => (sma_values(closes, window), window - 1),
        AverageKind::Ema => (ema_values(closes, window), 0),
        AverageKind::Dema => (dema_values(closes, window), 0),
    };
    Ok(IndicatorSeries {
        kind,
        window,
        warmup,
        values,
    })
}

fn sma_values(xs: &[f64], window: usize) -> Vec<f64> {
    let mut out = vec![f64::NAN; xs.len()];
    let n = window as f64;
    let mut sum: f64 = xs[..window - 1].iter().sum();
    for i in (window - 1)..xs.len() {
        if i >= window && (i + 1 - window).is_multiple_of(SMA_RESYNC_INTERVAL) {
            sum = xs[i + 1 - window..i].iter().sum();
        }
        sum += xs[i];
        out[i] = sum / n;
        sum -= xs[i + 1 - window];
    }
    out
}

/// Smoothing weight for a window of `window` bars.
pub fn ema_alpha(window: usize) -> f64 {
    2.0 / (window as f64 + 1.0)
}

/// Seeded with the first value; every entry is defined.
fn ema_values(xs: &[f64], window: usize) -> Vec<f64> {
    let alpha = ema_alpha(window);
    let mut out = Vec::with_capacity(xs.len());
    let mut prev = xs[0];
    out.push(prev);
    for &x in &xs[1..] {
        prev = alpha * x + (1.0 - alpha) * prev;
        out.push(prev);
    }
    out
}

fn dema_values(xs: &[f64], window: usize) -> Vec<f64> {
    let first = ema_values(xs, window);
    let second = ema_values(&first, window);
    first
        .iter()
        .zip(&second)
        .map(|(e, ee)| 2.0 * e - ee)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marketdata::Resolution;

    fn series(xs: &[f64]) -> PriceSeries {
        PriceSeries::from_closes("t", Resolution::HOURLY, 0, xs.to_vec()).unwrap()
    }

    fn brute_sma(xs: &[f64], n: usize) -> Vec<Option<f64>> {
        (0..xs.len())
            .map(|i| {
                (i + 1 >= n).then(|| xs[i + 1 - n..=i].iter().sum::<f64>() / n as f64)
            })
            .collect()
    }

    #[test]
    fn sma_small_fixture() {
        let s = sma(&series(&[1.0, 2.0, 3.0, 4.0, 5.0]), 3).unwrap();
        assert_eq!(s.to_options(), vec![None, None, Some(2.0), Some(3.0), Some(4.0)]);
        assert_eq!(s.warmup(), 2);
    }

    #[test]
    fn sma_constant_and_identity() {
        let c = sma(&series(&[4.5; 20]), 7).unwrap();
        assert!(c.to_options().iter().flatten().all(|&v| v == 4.5));
        let xs = [3.0, 1.0, 4.0, 1.0, 5.0];
        assert_eq!(sma(&series(&xs), 1).unwrap().raw(), &xs);
    }

    #[test]
    fn sma_window_errors() {
        let s = series(&[1.0, 2.0]);
        assert_eq!(sma(&s, 3), Err(Error::WindowExceedsData));
        assert_eq!(sma(&s, 0), Err(Error::InvalidWindow));
        assert_eq!(ema(&s, 3), Err(Error::WindowExceedsData));
        assert_eq!(dema(&s, 0), Err(Error::InvalidWindow));
    }

    #[test]
    fn sma_long_series_matches_brute_force_across_resync() {
        let xs: Vec<f64> = (0..10_000)
            .map(|i| 1000.0 + 300.0 * ((i as f64) * 0.013).sin() + (i % 17) as f64)
            .collect();
        for n in [1, 2, 37, 999, 4096, 5000] {
            let got = sma(&series(&xs), n).unwrap().to_options();
            for (g, e) in got.iter().zip(brute_sma(&xs, n)) {
                match (g, e) {
                    (Some(g), Some(e)) => assert!(((g - e) / e).abs() < 1e-12),
                    (None, None) => {}
                    _ => panic!("definedness mismatch"),
                }
            }
        }
    }

    #[test]
    fn ema_fixture() {
        let s = ema(&series(&[2.0, 4.0, 8.0]), 3).unwrap();
        assert_eq!(s.raw(), &[2.0, 3.0, 5.5]);
        assert_eq!(s.warmup(), 0);
    }

    #[test]
    fn ema_constant_and_identity() {
        assert!(ema(&series(&[3.0; 10]), 4).unwrap().raw().iter().all(|&v| v == 3.0));
        let xs = [3.0, 1.0, 4.0];
        assert_eq!(ema(&series(&xs), 1).unwrap().raw(), &xs);
    }

    #[test]
    fn dema_fixture() {
        let s = dema(&series(&[2.0, 4.0, 8.0]), 3).unwrap();
        assert_eq!(s.raw(), &[2.0, 3.5, 7.0]);
    }

    #[test]
    fn dema_constant_and_identity() {
        assert!(dema(&series(&[3.0; 10]), 4).unwrap().raw().iter().all(|&v| v == 3.0));
        let xs = [3.0, 1.0, 4.0];
        assert_eq!(dema(&series(&xs), 1).unwrap().raw(), &xs);
    }

    #[test]
    fn kind_round_trips_through_str() {
        for k in AverageKind::ALL {
            assert_eq!(k.as_str().parse::<AverageKind>().unwrap(), k);
        }
        assert!("wma".parse::<AverageKind>().is_err());
    }
}
