//! Price ingestion: raw tick and daily OHLC files, resampling onto a uniform
//! bar grid with forward-fill, and date-range slicing.
//!
//! Every [`PriceSeries`] is a gap-free grid: bar `i` sits at
//! `start + i * resolution`. Bars that received no trade carry the previous
//! close and are flagged `filled`.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seconds since the Unix epoch, UTC.
pub type Timestamp = i64;

const SECONDS_PER_DAY: i64 = 86_400;

/// Bar duration in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Resolution(i64);

impl Resolution {
    pub const HOURLY: Resolution = Resolution(3_600);
    pub const DAILY: Resolution = Resolution(SECONDS_PER_DAY);

    pub fn from_seconds(seconds: i64) -> Result<Self> {
        if seconds <= 0 {
            return Err(Error::InvalidConfig(format!(
                "resolution must be positive, got {seconds}s"
            )));
        }
        Ok(Resolution(seconds))
    }

    pub fn seconds(self) -> i64 {
        self.0
    }

    /// Bars per year on a calendar-uniform grid. The grid is forward-filled
    /// over weekends and holidays, so daily bars count every calendar day.
    pub fn bars_per_year(self) -> f64 {
        365.0 * SECONDS_PER_DAY as f64 / self.0 as f64
    }
}

impl TryFrom<i64> for Resolution {
    type Error = Error;

    fn try_from(seconds: i64) -> Result<Self> {
        Resolution::from_seconds(seconds)
    }
}

impl From<Resolution> for i64 {
    fn from(r: Resolution) -> i64 {
        r.0
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        if s % SECONDS_PER_DAY == 0 {
            write!(f, "{}d", s / SECONDS_PER_DAY)
        } else if s % 3_600 == 0 {
            write!(f, "{}h", s / 3_600)
        } else if s % 60 == 0 {
            write!(f, "{}m", s / 60)
        } else {
            write!(f, "{s}s")
        }
    }
}

impl FromStr for Resolution {
    type Err = Error;

    /// Accepts `<n>s`, `<n>m`, `<n>h` or `<n>d`, e.g. `1h`, `1d`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidConfig(format!("unrecognised resolution '{s}'"));
        if s.len() < 2 {
            return Err(bad());
        }
        let (num, unit) = s.split_at(s.len() - 1);
        let n: i64 = num.parse().map_err(|_| bad())?;
        let mult = match unit {
            "s" => 1,
            "m" => 60,
            "h" => 3_600,
            "d" => SECONDS_PER_DAY,
            _ => return Err(bad()),
        };
        n.checked_mul(mult)
            .ok_or_else(bad)
            .and_then(Resolution::from_seconds)
    }
}

/// One executed trade from a raw exchange feed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    pub timestamp: Timestamp,
    pub price: f64,
    pub volume: f64,
}

/// Raw trades in non-decreasing timestamp order, all prices strictly positive.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TickSeries {
    rows: Vec<Tick>,
}

impl TickSeries {
    /// Validates prices and stable-sorts by timestamp, so trades sharing a
    /// timestamp keep their input order.
    pub fn new(mut rows: Vec<Tick>) -> Result<Self> {
        for (i, t) in rows.iter().enumerate() {
            if !(t.price.is_finite() && t.price > 0.0) {
                return Err(Error::parse(i + 1, "price must be positive"));
            }
        }
        rows.sort_by_key(|t| t.timestamp);
        Ok(TickSeries { rows })
    }

    pub fn rows(&self) -> &[Tick] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// A single bar of a [`PriceSeries`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub timestamp: Timestamp,
    pub close: f64,
    pub filled: bool,
}

/// Uniformly spaced closing prices for one asset at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    asset_id: String,
    resolution: Resolution,
    start: Timestamp,
    closes: Vec<f64>,
    filled: Vec<bool>,
}

impl PriceSeries {
    pub fn new(
        asset_id: impl Into<String>,
        resolution: Resolution,
        start: Timestamp,
        closes: Vec<f64>,
        filled: Vec<bool>,
    ) -> Result<Self> {
        if closes.len() != filled.len() {
            return Err(Error::Misaligned {
                left: closes.len(),
                right: filled.len(),
            });
        }
        for (i, &c) in closes.iter().enumerate() {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "close at bar {i} must be positive, got {c}"
                )));
            }
            if filled[i] && (i == 0 || closes[i - 1] != c) {
                return Err(Error::InvalidConfig(format!(
                    "bar {i} is flagged filled but does not repeat the previous close"
                )));
            }
        }
        Ok(PriceSeries {
            asset_id: asset_id.into(),
            resolution,
            start,
            closes,
            filled,
        })
    }

    /// Series with no filled bars.
    pub fn from_closes(
        asset_id: impl Into<String>,
        resolution: Resolution,
        start: Timestamp,
        closes: Vec<f64>,
    ) -> Result<Self> {
        let filled = vec![false; closes.len()];
        PriceSeries::new(asset_id, resolution, start, closes, filled)
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn with_asset_id(mut self, asset_id: impl Into<String>) -> Self {
        self.asset_id = asset_id.into();
        self
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    /// Exclusive end: the timestamp one bar past the last bar.
    pub fn end(&self) -> Timestamp {
        self.start + self.closes.len() as i64 * self.resolution.0
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn filled(&self) -> &[bool] {
        &self.filled
    }

    pub fn filled_count(&self) -> usize {
        self.filled.iter().filter(|&&f| f).count()
    }

    pub fn timestamp(&self, index: usize) -> Timestamp {
        self.start + index as i64 * self.resolution.0
    }

    pub fn bars(&self) -> impl Iterator<Item = Bar> + '_ {
        self.closes
            .iter()
            .zip(&self.filled)
            .enumerate()
            .map(|(i, (&close, &filled))| Bar {
                timestamp: self.timestamp(i),
                close,
                filled,
            })
    }

    /// Multiplies every close by `factor`, keeping the grid and flags.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        PriceSeries::new(
            self.asset_id.clone(),
            self.resolution,
            self.start,
            self.closes.iter().map(|c| c * factor).collect(),
            self.filled.clone(),
        )
    }

    /// One tick per observed (non-filled) bar, stamped at the bar's open.
    /// Resampling these at the same resolution reproduces the series.
    pub fn to_ticks(&self) -> TickSeries {
        let rows = self
            .bars()
            .filter(|b| !b.filled)
            .map(|b| Tick {
                timestamp: b.timestamp,
                price: b.close,
                volume: 0.0,
            })
            .collect();
        TickSeries { rows }
    }
}

/// Reads a headerless `unix_seconds,price,volume` file (bitcoincharts export).
pub fn parse_tick_csv<R: Read>(input: R) -> Result<TickSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut rows = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line() as usize;
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(Error::parse(line, e.to_string())),
        }
        let line = record.position().map_or(line, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 3 {
            return Err(Error::parse(
                line,
                format!("expected 3 fields, found {}", record.len()),
            ));
        }
        let timestamp: Timestamp = record[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad timestamp '{}'", &record[0])))?;
        let price: f64 = record[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad price '{}'", &record[1])))?;
        let volume: f64 = record[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad volume '{}'", &record[2])))?;
        if !(price.is_finite() && price > 0.0) {
            return Err(Error::parse(line, "price must be positive"));
        }
        if !(volume.is_finite() && volume >= 0.0) {
            return Err(Error::parse(line, "volume must be non-negative"));
        }
        rows.push(Tick {
            timestamp,
            price,
            volume,
        });
    }
    rows.sort_by_key(|t| t.timestamp);
    Ok(TickSeries { rows })
}

const OHLC_HEADER: [&str; 7] = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"];
const OHLC_CLOSE: usize = 4;

/// Reads a Yahoo! Finance daily OHLC export into a daily series of closes.
///
/// Rows whose Close is `null` are dropped, then the calendar-day grid is
/// rebuilt from the first to the last remaining date with forward-fill.
pub fn parse_ohlc_csv<R: Read>(input: R) -> Result<PriceSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(Error::parse(1, e.to_string())),
        None => return Err(Error::parse(1, "missing header")),
    };
    if header.iter().ne(OHLC_HEADER.iter().copied()) {
        return Err(Error::parse(
            1,
            format!("expected header '{}'", OHLC_HEADER.join(",")),
        ));
    }

    let mut days: Vec<(i64, f64)> = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != OHLC_HEADER.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", OHLC_HEADER.len(), record.len()),
            ));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|_| Error::parse(line, format!("bad date '{}'", &record[0])))?;
        let close_field = &record[OHLC_CLOSE];
        if close_field.eq_ignore_ascii_case("null") || close_field.is_empty() {
            continue;
        }
        let close: f64 = close_field
            .parse()
            .map_err(|_| Error::parse(line, format!("bad close '{close_field}'")))?;
        if !(close.is_finite() && close > 0.0) {
            return Err(Error::parse(line, "close must be positive"));
        }
        days.push((date_to_timestamp(date), close));
    }
    if days.is_empty() {
        return Err(Error::NoData);
    }

    // Later rows win on duplicate dates.
    days.sort_by_key(|&(ts, _)| ts);
    days.dedup_by(|later, earlier| {
        if later.0 == earlier.0 {
            earlier.1 = later.1;
            true
        } else {
            false
        }
    });

    let start = days[0].0;
    let n_bars = ((days[days.len() - 1].0 - start) / SECONDS_PER_DAY) as usize + 1;
    let mut closes = Vec::with_capacity(n_bars);
    let mut filled = Vec::with_capacity(n_bars);
    for &(ts, close) in &days {
        let idx = ((ts - start) / SECONDS_PER_DAY) as usize;
        while closes.len() < idx {
            let prev = closes[closes.len() - 1];
            closes.push(prev);
            filled.push(true);
        }
        closes.push(close);
        filled.push(false);
    }
    PriceSeries::new("", Resolution::DAILY, start, closes, filled)
}

/// `YYYY-MM-DD` of the UTC day holding `ts`.
pub fn format_date(ts: Timestamp) -> String {
    chrono::DateTime::from_timestamp(ts, 0)
        .map(|d| d.format("%Y-%m-%d").to_string())
        .unwrap_or_else(|| ts.to_string())
}

/// RFC 3339 UTC rendering of `ts`.
pub fn format_datetime(ts: Timestamp) -> String {
    chrono::DateTime::from_timestamp(ts, 0)
        .map(|d| d.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| ts.to_string())
}

/// Midnight UTC of `date`.
pub fn date_to_timestamp(date: NaiveDate) -> Timestamp {
    date.and_time(NaiveTime::MIN).and_utc().timestamp()
}

/// Buckets trades onto a uniform grid. A bar closes at the last trade strictly
/// before its end boundary; empty bars repeat the previous close and are
/// flagged filled. The grid begins at the bar holding the first trade.
pub fn resample(ticks: &TickSeries, resolution: Resolution) -> Result<PriceSeries> {
    let first = ticks.rows.first().ok_or(Error::NoData)?;
    let res = resolution.0;
    let first_bucket = first.timestamp.div_euclid(res);

    let mut closes: Vec<f64> = Vec::new();
    let mut filled: Vec<bool> = Vec::new();
    for tick in &ticks.rows {
        let idx = (tick.timestamp.div_euclid(res) - first_bucket) as usize;
        if idx + 1 == closes.len() {
            closes[idx] = tick.price;
            continue;
        }
        while closes.len() < idx {
            let prev = closes[closes.len() - 1];
            closes.push(prev);
            filled.push(true);
        }
        closes.push(tick.price);
        filled.push(false);
    }
    PriceSeries::new("", resolution, first_bucket * res, closes, filled)
}

/// Bars with `start <= timestamp < end`.
pub fn slice(series: &PriceSeries, start: Timestamp, end: Timestamp) -> Result<PriceSeries> {
    if start >= end {
        return Err(Error::InvalidRange);
    }
    let first = first_index_at_or_after(series, start);
    let last = first_index_at_or_after(series, end);
    if first >= last {
        return Err(Error::EmptySlice);
    }
    Ok(PriceSeries {
        asset_id: series.asset_id.clone(),
        resolution: series.resolution,
        start: series.timestamp(first),
        closes: series.closes[first..last].to_vec(),
        filled: series.filled[first..last].to_vec(),
    })
}

fn first_index_at_or_after(series: &PriceSeries, ts: Timestamp) -> usize {
    let offset = ts - series.start;
    if offset <= 0 {
        return 0;
    }
    let res = series.resolution.0;
    let idx = (offset + res - 1) / res;
    (idx as usize).min(series.len())
}
