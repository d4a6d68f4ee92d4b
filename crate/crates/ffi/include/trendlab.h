#ifndef TRENDLAB_H
#define TRENDLAB_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_POINTER = 1,
  TL_STATUS_INVALID_ARGUMENT = 2,
  TL_STATUS_PARSE = 3,
  TL_STATUS_NO_DATA = 4,
  TL_STATUS_WINDOW_EXCEEDS_DATA = 5,
  TL_STATUS_EMPTY_GRID = 6,
  TL_STATUS_NO_TRADEABLE_PARAMETERS = 7,
  TL_STATUS_INSUFFICIENT_HISTORY = 8,
  TL_STATUS_DEGENERATE_SERIES = 9,
  TL_STATUS_BUFFER_TOO_SMALL = 10,
  TL_STATUS_PANIC = 99,
} TlStatus;

typedef enum TlAverageKind {
  TL_AVERAGE_KIND_SMA = 0,
  TL_AVERAGE_KIND_EMA = 1,
  TL_AVERAGE_KIND_DEMA = 2,
} TlAverageKind;

/**
 * Opaque price series handle.
 */
typedef struct TlPriceSeries TlPriceSeries;

/**
 * Opaque grid-search surface handle. Cells are ordered by (short, long).
 */
typedef struct TlSurface TlSurface;

/**
 * Portfolio settings. `bars_per_year <= 0` selects the resolution default.
 */
typedef struct TlBacktestConfig {
  double initial_cash;
  bool entry_on_start;
  double bars_per_year;
} TlBacktestConfig;

/**
 * Flat copy of the performance statistics. `has_sharpe`/`has_sortino` are
 * false when the ratio is undefined, in which case the value field is NaN.
 */
typedef struct TlMetrics {
  bool has_sharpe;
  double sharpe;
  bool has_sortino;
  double sortino;
  double max_drawdown;
  double exposure;
  double total_return;
  double annualized_return;
  size_t n_trades;
} TlMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or null. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *tl_last_error_message(void);

/**
 * Static, NUL-terminated library version.
 */
const char *tl_version(void);

/**
 * 10,000 starting cash, entry on start, resolution-derived annualization.
 */
struct TlBacktestConfig tl_config_default(void);

/**
 * Builds a series from `len` closes starting at `start` (Unix seconds).
 *
 * # Safety
 * `closes` must be valid for `len` reads; `out` must be writable.
 */
enum TlStatus tl_series_from_closes(int64_t start,
                                    int64_t resolution_seconds,
                                    const double *closes,
                                    size_t len,
                                    struct TlPriceSeries **out);

/**
 * Parses a headerless `unix_seconds,price,volume` buffer and resamples it.
 *
 * # Safety
 * `data` must be valid for `len` reads; `out` must be writable.
 */
enum TlStatus tl_series_parse_ticks(const uint8_t *data,
                                    size_t len,
                                    int64_t resolution_seconds,
                                    struct TlPriceSeries **out);

/**
 * Parses a daily OHLC CSV buffer (Yahoo! Finance layout).
 *
 * # Safety
 * `data` must be valid for `len` reads; `out` must be writable.
 */
enum TlStatus tl_series_parse_ohlc(const uint8_t *data, size_t len, struct TlPriceSeries **out);

/**
 * Number of bars; 0 for a null handle.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
size_t tl_series_len(const struct TlPriceSeries *series);

/**
 * Number of forward-filled bars; 0 for a null handle.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
size_t tl_series_filled_count(const struct TlPriceSeries *series);

/**
 * Copies the closes into `buf`, which must hold `tl_series_len` values.
 *
 * # Safety
 * `buf` must be valid for `capacity` writes.
 */
enum TlStatus tl_series_closes(const struct TlPriceSeries *series, double *buf, size_t capacity);

/**
 * # Safety
 * `series` must be null or a handle not already freed.
 */
void tl_series_free(struct TlPriceSeries *series);

/**
 * Writes the `kind` average of `window` bars into `buf`; undefined warm-up
 * entries are NaN.
 *
 * # Safety
 * `buf` must be valid for `capacity` writes.
 */
enum TlStatus tl_indicator(const struct TlPriceSeries *series,
                           enum TlAverageKind kind,
                           size_t window,
                           double *buf,
                           size_t capacity);

/**
 * Runs one crossover strategy. `equity` may be null; otherwise it receives
 * the per-bar equity curve and must hold `tl_series_len` values.
 *
 * # Safety
 * Pointers must be null or valid as described above.
 */
enum TlStatus tl_backtest(const struct TlPriceSeries *series,
                          enum TlAverageKind kind,
                          size_t short_window,
                          size_t long_window,
                          const struct TlBacktestConfig *config,
                          struct TlMetrics *out_metrics,
                          double *equity,
                          size_t equity_capacity);

/**
 * Evaluates every (short, long) pair of the grid.
 *
 * # Safety
 * `series` and `config` must be live; `out` must be writable.
 */
enum TlStatus tl_grid_search(const struct TlPriceSeries *series,
                             enum TlAverageKind kind,
                             size_t min_window,
                             size_t max_window,
                             size_t step,
                             const struct TlBacktestConfig *config,
                             struct TlSurface **out);

/**
 * # Safety
 * `surface` must be null or a live handle.
 */
size_t tl_surface_len(const struct TlSurface *surface);

/**
 * Cell `index` in (short, long) order.
 *
 * # Safety
 * `surface` must be live; output pointers must be writable.
 */
enum TlStatus tl_surface_cell(const struct TlSurface *surface,
                              size_t index,
                              size_t *out_short,
                              size_t *out_long,
                              struct TlMetrics *out_metrics);

/**
 * Highest-Sharpe cell (ties: smaller long, then smaller short).
 *
 * # Safety
 * `surface` must be live; output pointers must be writable.
 */
enum TlStatus tl_surface_best(const struct TlSurface *surface,
                              size_t *out_short,
                              size_t *out_long,
                              struct TlMetrics *out_metrics);

/**
 * # Safety
 * `surface` must be null or a handle not already freed.
 */
void tl_surface_free(struct TlSurface *surface);

/**
 * Pearson r of two equally long return arrays, its t statistic and the
 * two-sided p-value. `t` is +/-infinity when |r| = 1.
 *
 * # Safety
 * `a` and `b` must be valid for `len` reads; outputs must be writable.
 */
enum TlStatus tl_correlation_significance(const double *a,
                                          const double *b,
                                          size_t len,
                                          double *out_r,
                                          double *out_t,
                                          double *out_p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRENDLAB_H */
