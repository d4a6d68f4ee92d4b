//! C ABI over the `trendlab` library.
//!
//! Price series and grid surfaces cross the boundary as opaque handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a [`TlStatus`]; on failure a human-readable message is kept
//! per thread and is available from [`tl_last_error_message`].
//!
//! The C header `include/trendlab.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use trendlab::{
    analysis::{correlation_significance, PairedReturns},
    best_params, evaluate, grid_search, indicators, parse_ohlc_csv, parse_tick_csv, resample,
    AverageKind, BacktestConfig, Error, GridSpec, PerformanceMetrics, PriceSeries, Resolution,
    SharpeSurface, StrategySpec,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    NoData = 4,
    WindowExceedsData = 5,
    EmptyGrid = 6,
    NoTradeableParameters = 7,
    InsufficientHistory = 8,
    DegenerateSeries = 9,
    BufferTooSmall = 10,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlAverageKind {
    Sma = 0,
    Ema = 1,
    Dema = 2,
}

impl From<TlAverageKind> for AverageKind {
    fn from(k: TlAverageKind) -> Self {
        match k {
            TlAverageKind::Sma => AverageKind::Sma,
            TlAverageKind::Ema => AverageKind::Ema,
            TlAverageKind::Dema => AverageKind::Dema,
        }
    }
}

/// Portfolio settings. `bars_per_year <= 0` selects the resolution default.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlBacktestConfig {
    pub initial_cash: f64,
    pub entry_on_start: bool,
    pub bars_per_year: f64,
}

impl From<TlBacktestConfig> for BacktestConfig {
    fn from(c: TlBacktestConfig) -> Self {
        BacktestConfig {
            initial_cash: c.initial_cash,
            entry_on_start: c.entry_on_start,
            bars_per_year: (c.bars_per_year > 0.0).then_some(c.bars_per_year),
        }
    }
}

/// Flat copy of the performance statistics. `has_sharpe`/`has_sortino` are
/// false when the ratio is undefined, in which case the value field is NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlMetrics {
    pub has_sharpe: bool,
    pub sharpe: f64,
    pub has_sortino: bool,
    pub sortino: f64,
    pub max_drawdown: f64,
    pub exposure: f64,
    pub total_return: f64,
    pub annualized_return: f64,
    pub n_trades: usize,
}

impl From<&PerformanceMetrics> for TlMetrics {
    fn from(m: &PerformanceMetrics) -> Self {
        TlMetrics {
            has_sharpe: m.sharpe.is_some(),
            sharpe: m.sharpe.unwrap_or(f64::NAN),
            has_sortino: m.sortino.is_some(),
            sortino: m.sortino.unwrap_or(f64::NAN),
            max_drawdown: m.max_drawdown,
            exposure: m.exposure,
            total_return: m.total_return,
            annualized_return: m.annualized_return,
            n_trades: m.n_trades,
        }
    }
}

/// Opaque price series handle.
pub struct TlPriceSeries(PriceSeries);

/// Opaque grid-search surface handle. Cells are ordered by (short, long).
pub struct TlSurface(SharpeSurface);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TlStatus {
    match e {
        Error::NoData => TlStatus::NoData,
        Error::Parse { .. } => TlStatus::Parse,
        Error::WindowExceedsData => TlStatus::WindowExceedsData,
        Error::EmptyGrid => TlStatus::EmptyGrid,
        Error::NoTradeableParameters => TlStatus::NoTradeableParameters,
        Error::InsufficientHistory => TlStatus::InsufficientHistory,
        Error::DegenerateSeries => TlStatus::DegenerateSeries,
        _ => TlStatus::InvalidArgument,
    }
}

struct Failure(TlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(TlStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TlStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside trendlab".into());
            TlStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or valid for `len` reads.
unsafe fn input<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `ptr` must be null or a live handle.
unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message describing the last failed call on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated library version.
#[no_mangle]
pub extern "C" fn tl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// 10,000 starting cash, entry on start, resolution-derived annualization.
#[no_mangle]
pub extern "C" fn tl_config_default() -> TlBacktestConfig {
    let c = BacktestConfig::default();
    TlBacktestConfig {
        initial_cash: c.initial_cash,
        entry_on_start: c.entry_on_start,
        bars_per_year: 0.0,
    }
}

/// Builds a series from `len` closes starting at `start` (Unix seconds).
///
/// # Safety
/// `closes` must be valid for `len` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_series_from_closes(
    start: i64,
    resolution_seconds: i64,
    closes: *const f64,
    len: usize,
    out: *mut *mut TlPriceSeries,
) -> TlStatus {
    guard(|| {
        let closes = input(closes, len, "closes")?.to_vec();
        let res = Resolution::from_seconds(resolution_seconds)?;
        let series = PriceSeries::from_closes("ffi", res, start, closes)?;
        store(out, Box::into_raw(Box::new(TlPriceSeries(series))), "out")
    })
}

/// Parses a headerless `unix_seconds,price,volume` buffer and resamples it.
///
/// # Safety
/// `data` must be valid for `len` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_series_parse_ticks(
    data: *const u8,
    len: usize,
    resolution_seconds: i64,
    out: *mut *mut TlPriceSeries,
) -> TlStatus {
    guard(|| {
        let bytes = input(data, len, "data")?;
        let res = Resolution::from_seconds(resolution_seconds)?;
        let series = resample(&parse_tick_csv(bytes)?, res)?;
        store(out, Box::into_raw(Box::new(TlPriceSeries(series))), "out")
    })
}

/// Parses a daily OHLC CSV buffer (Yahoo! Finance layout).
///
/// # Safety
/// `data` must be valid for `len` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_series_parse_ohlc(
    data: *const u8,
    len: usize,
    out: *mut *mut TlPriceSeries,
) -> TlStatus {
    guard(|| {
        let bytes = input(data, len, "data")?;
        let series = parse_ohlc_csv(bytes)?;
        store(out, Box::into_raw(Box::new(TlPriceSeries(series))), "out")
    })
}

/// Number of bars; 0 for a null handle.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_series_len(series: *const TlPriceSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Number of forward-filled bars; 0 for a null handle.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_series_filled_count(series: *const TlPriceSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.filled_count())
}

/// Copies the closes into `buf`, which must hold `tl_series_len` values.
///
/// # Safety
/// `buf` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn tl_series_closes(
    series: *const TlPriceSeries,
    buf: *mut f64,
    capacity: usize,
) -> TlStatus {
    guard(|| {
        let s = &handle(series, "series")?.0;
        write_buffer(s.closes(), buf, capacity)
    })
}

unsafe fn write_buffer(values: &[f64], buf: *mut f64, capacity: usize) -> Result<(), Failure> {
    if capacity < values.len() {
        return Err(Failure(
            TlStatus::BufferTooSmall,
            format!("buffer holds {capacity}, need {}", values.len()),
        ));
    }
    if values.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null("buffer"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// # Safety
/// `series` must be null or a handle not already freed.
#[no_mangle]
pub unsafe extern "C" fn tl_series_free(series: *mut TlPriceSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Writes the `kind` average of `window` bars into `buf`; undefined warm-up
/// entries are NaN.
///
/// # Safety
/// `buf` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn tl_indicator(
    series: *const TlPriceSeries,
    kind: TlAverageKind,
    window: usize,
    buf: *mut f64,
    capacity: usize,
) -> TlStatus {
    guard(|| {
        let s = &handle(series, "series")?.0;
        let ind = indicators::indicator(kind.into(), s.closes(), window)?;
        let values: Vec<f64> = ind.to_options().into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        write_buffer(&values, buf, capacity)
    })
}

/// Runs one crossover strategy. `equity` may be null; otherwise it receives
/// the per-bar equity curve and must hold `tl_series_len` values.
///
/// # Safety
/// Pointers must be null or valid as described above.
#[no_mangle]
pub unsafe extern "C" fn tl_backtest(
    series: *const TlPriceSeries,
    kind: TlAverageKind,
    short_window: usize,
    long_window: usize,
    config: *const TlBacktestConfig,
    out_metrics: *mut TlMetrics,
    equity: *mut f64,
    equity_capacity: usize,
) -> TlStatus {
    guard(|| {
        let s = &handle(series, "series")?.0;
        let config: BacktestConfig = (*handle(config, "config")?).into();
        let spec = StrategySpec::new(kind.into(), short_window, long_window)?;
        let eval = evaluate(s, &spec, &config)?;
        if !equity.is_null() {
            write_buffer(&eval.result.equity, equity, equity_capacity)?;
        }
        store(out_metrics, TlMetrics::from(&eval.metrics), "out_metrics")
    })
}

/// Evaluates every (short, long) pair of the grid.
///
/// # Safety
/// `series` and `config` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_grid_search(
    series: *const TlPriceSeries,
    kind: TlAverageKind,
    min_window: usize,
    max_window: usize,
    step: usize,
    config: *const TlBacktestConfig,
    out: *mut *mut TlSurface,
) -> TlStatus {
    guard(|| {
        let s = &handle(series, "series")?.0;
        let config: BacktestConfig = (*handle(config, "config")?).into();
        let grid = GridSpec::new(min_window, max_window, step)?;
        let surface = grid_search(s, kind.into(), &grid, &config)?;
        store(out, Box::into_raw(Box::new(TlSurface(surface))), "out")
    })
}

/// # Safety
/// `surface` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_surface_len(surface: *const TlSurface) -> usize {
    surface.as_ref().map_or(0, |s| s.0.len())
}

/// Cell `index` in (short, long) order.
///
/// # Safety
/// `surface` must be live; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_surface_cell(
    surface: *const TlSurface,
    index: usize,
    out_short: *mut usize,
    out_long: *mut usize,
    out_metrics: *mut TlMetrics,
) -> TlStatus {
    guard(|| {
        let s = &handle(surface, "surface")?.0;
        let (&(short, long), m) = s.cells.iter().nth(index).ok_or_else(|| {
            Failure(
                TlStatus::InvalidArgument,
                format!("cell {index} out of range ({} cells)", s.len()),
            )
        })?;
        store(out_short, short, "out_short")?;
        store(out_long, long, "out_long")?;
        store(out_metrics, TlMetrics::from(m), "out_metrics")
    })
}

/// Highest-Sharpe cell (ties: smaller long, then smaller short).
///
/// # Safety
/// `surface` must be live; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_surface_best(
    surface: *const TlSurface,
    out_short: *mut usize,
    out_long: *mut usize,
    out_metrics: *mut TlMetrics,
) -> TlStatus {
    guard(|| {
        let s = &handle(surface, "surface")?.0;
        let best = best_params(s)?;
        store(out_short, best.short, "out_short")?;
        store(out_long, best.long, "out_long")?;
        store(out_metrics, TlMetrics::from(&best.metrics), "out_metrics")
    })
}

/// # Safety
/// `surface` must be null or a handle not already freed.
#[no_mangle]
pub unsafe extern "C" fn tl_surface_free(surface: *mut TlSurface) {
    if !surface.is_null() {
        drop(Box::from_raw(surface));
    }
}

/// Pearson r of two equally long return arrays, its t statistic and the
/// two-sided p-value. `t` is +/-infinity when |r| = 1.
///
/// # Safety
/// `a` and `b` must be valid for `len` reads; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tl_correlation_significance(
    a: *const f64,
    b: *const f64,
    len: usize,
    out_r: *mut f64,
    out_t: *mut f64,
    out_p: *mut f64,
) -> TlStatus {
    guard(|| {
        let a = input(a, len, "a")?.to_vec();
        let b = input(b, len, "b")?.to_vec();
        let pairs = PairedReturns::new((0..len as i64).collect(), a, b)?;
        let sig = correlation_significance(&pairs)?;
        store(out_r, sig.r, "out_r")?;
        store(out_t, sig.t_statistic, "out_t")?;
        store(out_p, sig.p_value, "out_p")
    })
}
