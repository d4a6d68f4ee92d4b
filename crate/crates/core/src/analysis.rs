//! Cross-asset diversification statistics on daily returns.

use std::io::Write;

use serde::{Serialize, Serializer};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::marketdata::{format_date, PriceSeries, Timestamp};

const SECONDS_PER_DAY: i64 = 86_400;

/// Simple daily returns of two series on their common trading days.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedReturns {
    /// Midnight UTC of the day each return ends on.
    pub days: Vec<Timestamp>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl PairedReturns {
    pub fn new(days: Vec<Timestamp>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || days.len() != a.len() {
            return Err(Error::Misaligned {
                left: a.len(),
                right: b.len(),
            });
        }
        Ok(PairedReturns { days, a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn swapped(&self) -> PairedReturns {
        PairedReturns {
            days: self.days.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// Last close of every UTC day that holds at least one observed bar. Days
/// made only of forward-filled bars (weekends on an equity grid) are absent.
pub fn daily_closes(series: &PriceSeries) -> Vec<(Timestamp, f64)> {
    let mut out: Vec<(Timestamp, f64)> = Vec::new();
    let mut current: Option<(Timestamp, f64, bool)> = None;
    for bar in series.bars() {
        let day = bar.timestamp.div_euclid(SECONDS_PER_DAY) * SECONDS_PER_DAY;
        match current.as_mut() {
            Some((d, close, observed)) if *d == day => {
                *close = bar.close;
                *observed |= !bar.filled;
            }
            _ => {
                if let Some((d, close, true)) = current {
                    out.push((d, close));
                }
                current = Some((day, bar.close, !bar.filled));
            }
        }
    }
    if let Some((d, close, true)) = current {
        out.push((d, close));
    }
    out
}

/// Reduces both series to daily closes, keeps the days present in both and
/// computes simple returns between consecutive common days.
pub fn align_daily(a: &PriceSeries, b: &PriceSeries) -> Result<PairedReturns> {
    let da = daily_closes(a);
    let db = daily_closes(b);
    let mut common: Vec<(Timestamp, f64, f64)> = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < da.len() && j < db.len() {
        match da[i].0.cmp(&db[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common.push((da[i].0, da[i].1, db[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    if common.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    if common.len() < 2 {
        return Err(Error::InsufficientData);
    }
    let (mut days, mut ra, mut rb) = (Vec::new(), Vec::new(), Vec::new());
    for w in common.windows(2) {
        days.push(w[1].0);
        ra.push(w[1].1 / w[0].1 - 1.0);
        rb.push(w[1].2 / w[0].2 - 1.0);
    }
    Ok(PairedReturns { days, a: ra, b: rb })
}

fn is_constant(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x == xs[0])
}

/// Pearson correlation; `None` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 || is_constant(x) || is_constant(y) {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxx += da * da;
        syy += db * db;
        sxy += da * db;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSeries {
    pub window: usize,
    /// Aligned with the paired returns; the first `window - 1` are `None`.
    pub values: Vec<Option<f64>>,
}

/// Trailing-window Pearson correlation.
pub fn rolling_correlation(pairs: &PairedReturns, window: usize) -> Result<CorrelationSeries> {
    if window < 2 {
        return Err(Error::CorrelationWindowTooSmall);
    }
    if window > pairs.len() {
        return Err(Error::WindowExceedsData);
    }
    let values = (0..pairs.len())
        .map(|i| {
            if i + 1 < window {
                None
            } else {
                let lo = i + 1 - window;
                pearson(&pairs.a[lo..=i], &pairs.b[lo..=i])
            }
        })
        .collect();
    Ok(CorrelationSeries { window, values })
}

fn serialize_extended_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Significance {
    pub n: usize,
    pub r: f64,
    /// Infinite for |r| = 1; serialized as "inf"/"-inf".
    #[serde(serialize_with = "serialize_extended_f64")]
    pub t_statistic: f64,
    pub p_value: f64,
}

/// Full-period Pearson r with a two-sided t-test against zero correlation.
pub fn correlation_significance(pairs: &PairedReturns) -> Result<Significance> {
    let n = pairs.len();
    if n < 3 {
        return Err(Error::InsufficientData);
    }
    let r = pearson(&pairs.a, &pairs.b).ok_or(Error::DegenerateSeries)?;
    let df = (n - 2) as f64;
    let (t, p) = if r.abs() >= 1.0 {
        (f64::INFINITY.copysign(r), 0.0)
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        (t, student_t_two_sided_p(t, df))
    };
    Ok(Significance {
        n,
        r,
        t_statistic: t,
        p_value: p,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    match StudentsT::new(0.0, 1.0, df) {
        Ok(dist) => (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0),
        Err(_) => f64::NAN,
    }
}

pub const CORRELATION_CSV_HEADER: &str = "date,a_return,b_return,rolling_correlation";

/// Paired returns with the rolling correlation alongside; serves both the
/// scatter plot and the rolling-correlation plot.
pub fn write_correlation_csv<W: Write>(
    mut out: W,
    pairs: &PairedReturns,
    rolling: &CorrelationSeries,
) -> std::io::Result<()> {
    writeln!(out, "{CORRELATION_CSV_HEADER}")?;
    for i in 0..pairs.len() {
        let corr = rolling
            .values
            .get(i)
            .copied()
            .flatten()
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{}",
            format_date(pairs.days[i]),
            pairs.a[i],
            pairs.b[i],
            corr
        )?;
    }
    Ok(())
}
