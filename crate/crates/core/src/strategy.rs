//! Crossover signal generation from a (short, long) pair of rolling averages.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::{indicator, AverageKind, IndicatorSeries};
use crate::marketdata::PriceSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signal {
    Buy,
    Sell,
    Hold,
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signal::Buy => "buy",
            Signal::Sell => "sell",
            Signal::Hold => "hold",
        })
    }
}

/// Average kind plus a (short, long) window pair with `1 <= short < long`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategySpec {
    kind: AverageKind,
    short_window: usize,
    long_window: usize,
}

impl StrategySpec {
    pub fn new(kind: AverageKind, short_window: usize, long_window: usize) -> Result<Self> {
        if short_window < 1 {
            return Err(Error::InvalidWindow);
        }
        if short_window >= long_window {
            return Err(Error::ShortNotBelowLong);
        }
        Ok(StrategySpec {
            kind,
            short_window,
            long_window,
        })
    }

    pub fn kind(&self) -> AverageKind {
        self.kind
    }

    pub fn short_window(&self) -> usize {
        self.short_window
    }

    pub fn long_window(&self) -> usize {
        self.long_window
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSeries {
    signals: Vec<Signal>,
    first_active: usize,
}

impl SignalSeries {
    /// Wraps externally produced signals; every bar before `first_active`
    /// must be `Hold`.
    pub fn new(signals: Vec<Signal>, first_active: usize) -> Result<Self> {
        if signals[..first_active.min(signals.len())]
            .iter()
            .any(|&s| s != Signal::Hold)
        {
            return Err(Error::InvalidConfig(
                "signals before first_active must be Hold".into(),
            ));
        }
        Ok(SignalSeries {
            signals,
            first_active,
        })
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn first_active(&self) -> usize {
        self.first_active
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn trade_count(&self) -> usize {
        self.signals.iter().filter(|&&s| s != Signal::Hold).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ordering {
    Unset,
    Above,
    Below,
}

/// Computes both averages for `spec` and runs the crossover state machine.
///
/// With `entry_on_start`, the first bar on which the two averages differ
/// emits a signal matching their ordering. Without it, that first ordering is
/// only recorded and the first signal waits for a genuine crossing.
pub fn crossover_signals(
    prices: &PriceSeries,
    spec: &StrategySpec,
    entry_on_start: bool,
) -> Result<SignalSeries> {
    if spec.long_window > prices.len() {
        return Err(Error::WindowExceedsData);
    }
    let short = indicator(spec.kind, prices.closes(), spec.short_window)?;
    let long = indicator(spec.kind, prices.closes(), spec.long_window)?;
    signals_from_indicators(&short, &long, entry_on_start)
}

/// Crossover state machine over two precomputed, equally long averages.
pub fn signals_from_indicators(
    short: &IndicatorSeries,
    long: &IndicatorSeries,
    entry_on_start: bool,
) -> Result<SignalSeries> {
    if short.len() != long.len() {
        return Err(Error::Misaligned {
            left: short.len(),
            right: long.len(),
        });
    }
    let len = short.len();
    let first_active = short.warmup().max(long.warmup()).min(len);
    let mut signals = vec![Signal::Hold; len];
    let (s_raw, l_raw) = (short.raw(), long.raw());
    let mut state = Ordering::Unset;
    for i in first_active..len {
        let (s, l) = (s_raw[i], l_raw[i]);
        let next = if s > l {
            Ordering::Above
        } else if s < l {
            Ordering::Below
        } else {
            continue;
        };
        if next == state {
            continue;
        }
        if state != Ordering::Unset || entry_on_start {
            signals[i] = match next {
                Ordering::Above => Signal::Buy,
                _ => Signal::Sell,
            };
        }
        state = next;
    }
    Ok(SignalSeries {
        signals,
        first_active,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marketdata::Resolution;
    use Signal::{Buy as B, Hold as H, Sell as S};

    fn series(xs: &[f64]) -> PriceSeries {
        PriceSeries::from_closes("t", Resolution::HOURLY, 0, xs.to_vec()).unwrap()
    }

    fn sma(short: usize, long: usize) -> StrategySpec {
        StrategySpec::new(AverageKind::Sma, short, long).unwrap()
    }

    #[test]
    fn step_up_buys_after_equality() {
        // n=3: SMA1 = 1 = SMA3 -> hold; n=4: 10 > 4 -> buy
        let sig = crossover_signals(&series(&[1.0, 1.0, 1.0, 10.0, 10.0, 10.0]), &sma(1, 3), true)
            .unwrap();
        assert_eq!(sig.signals(), &[H, H, H, B, H, H]);
        assert_eq!(sig.first_active(), 2);
    }

    #[test]
    fn constant_series_never_trades() {
        for kind in AverageKind::ALL {
            let spec = StrategySpec::new(kind, 2, 5).unwrap();
            let sig = crossover_signals(&series(&[7.0; 30]), &spec, true).unwrap();
            assert_eq!(sig.trade_count(), 0, "{kind}");
        }
    }

    #[test]
    fn decreasing_series_sells_once() {
        let sig = crossover_signals(&series(&[9.0, 8.0, 7.0, 6.0, 5.0]), &sma(1, 2), true).unwrap();
        assert_eq!(sig.signals(), &[H, S, H, H, H]);
    }

    #[test]
    fn without_entry_on_start_waits_for_a_crossing() {
        let xs = [9.0, 8.0, 7.0, 6.0, 5.0, 9.0, 9.0];
        let sig = crossover_signals(&series(&xs), &sma(1, 2), false).unwrap();
        assert_eq!(sig.signals(), &[H, H, H, H, H, B, H]);
        let sig = crossover_signals(&series(&xs), &sma(1, 2), true).unwrap();
        assert_eq!(sig.signals(), &[H, S, H, H, H, B, H]);
    }

    #[test]
    fn spec_rejects_bad_windows() {
        assert_eq!(
            StrategySpec::new(AverageKind::Sma, 100, 50),
            Err(Error::ShortNotBelowLong)
        );
        assert_eq!(
            StrategySpec::new(AverageKind::Sma, 5, 5),
            Err(Error::ShortNotBelowLong)
        );
        assert_eq!(StrategySpec::new(AverageKind::Sma, 0, 5), Err(Error::InvalidWindow));
    }

    #[test]
    fn long_window_longer_than_data() {
        assert_eq!(
            crossover_signals(&series(&[1.0, 2.0]), &sma(1, 3), true),
            Err(Error::WindowExceedsData)
        );
    }
}
