//! End-to-end runs of the `trendlab` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const T0: i64 = 1_315_872_000; // 2011-09-13

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_trendlab"));
    c.env_remove("TRENDLAB_THREADS");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Several ticks per hour following a slow zigzag, so crossovers happen.
fn write_ticks(dir: &Path, hours: usize) -> PathBuf {
    let mut s = String::new();
    let mut p = 100.0_f64;
    for h in 0..hours {
        let up = (h / 120) % 2 == 0;
        for k in 0..3 {
            p *= if up { 1.001 } else { 0.9992 };
            let ts = T0 + h as i64 * 3600 + k * 1000;
            s.push_str(&format!("{ts},{p:.6},0.5\n"));
        }
    }
    let path = dir.join("ticks.csv");
    fs::write(&path, s).unwrap();
    path
}

fn write_ohlc(dir: &Path, name: &str, days: usize, seed: u32) -> PathBuf {
    let mut s = String::from("Date,Open,High,Low,Close,Adj Close,Volume\n");
    let mut p = 50.0_f64;
    let start = chrono::NaiveDate::from_ymd_opt(2015, 1, 1).unwrap();
    for d in 0..days {
        let date = start + chrono::Days::new(d as u64);
        let wobble = (((d as u32).wrapping_mul(2_654_435_761) ^ seed) % 1000) as f64 / 1000.0 - 0.5;
        let trend = if (d / 45) % 2 == 0 { 0.006 } else { -0.004 };
        p *= 1.0 + trend + 0.01 * wobble;
        s.push_str(&format!("{date},{p:.4},{p:.4},{p:.4},{p:.4},{p:.4},1000\n"));
    }
    let path = dir.join(name);
    fs::write(&path, s).unwrap();
    path
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn backtest_writes_metrics_equity_trades_and_manifest() {
    let dir = TempDir::new().unwrap();
    let data = write_ticks(dir.path(), 2000);
    let o = run(
        dir.path(),
        &["backtest", "--data", data.to_str().unwrap(), "--short", "10", "--long", "50", "--out", "bt"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("bt");
    let m = json(&out.join("metrics.json"));
    assert!(m["metrics"].get("sharpe").is_some());
    assert!(m["metrics"]["n_trades"].as_u64().unwrap() > 0);
    let equity = fs::read_to_string(out.join("equity.csv")).unwrap();
    assert_eq!(equity.lines().count(), 2001);
    assert!(fs::read_to_string(out.join("trades.csv")).unwrap().lines().count() > 1);
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "backtest");
    assert_eq!(manifest["input_files"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["outputs"].as_array().unwrap().len() >= 3);
}

#[test]
fn missing_input_file_exits_two() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["backtest", "--data", "nope.csv", "--short", "1", "--long", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no data"), "{}", stderr(&o));
}

#[test]
fn short_not_below_long_exits_two() {
    let dir = TempDir::new().unwrap();
    let data = write_ticks(dir.path(), 200);
    let o = run(
        dir.path(),
        &["backtest", "--data", data.to_str().unwrap(), "--short", "100", "--long", "50"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("short must be < long"), "{}", stderr(&o));
}

#[test]
fn grid_on_daily_data_fills_the_default_grid() {
    let dir = TempDir::new().unwrap();
    let data = write_ohlc(dir.path(), "d.csv", 400, 1);
    let o = run(
        dir.path(),
        &["grid", "--data", data.to_str().unwrap(), "--format", "ohlc", "--grid", "1,50,1", "--out", "g"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let surface = fs::read_to_string(dir.path().join("g/surface.csv")).unwrap();
    assert_eq!(surface.lines().count(), 1 + 1225);
    let best = json(&dir.path().join("g/best.json"));
    let best = &best["best"];
    let (s, l) = (best["short"].as_u64().unwrap(), best["long"].as_u64().unwrap());
    assert!(s < l && l <= 50);
}

#[test]
fn walkforward_needs_two_years() {
    let dir = TempDir::new().unwrap();
    let data = write_ohlc(dir.path(), "d.csv", 540, 2);
    let o = run(
        dir.path(),
        &["walkforward", "--data", data.to_str().unwrap(), "--format", "ohlc", "--grid", "1,20,1"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("insufficient history"), "{}", stderr(&o));
}

#[test]
fn walkforward_reports_both_annualizations() {
    let dir = TempDir::new().unwrap();
    let data = write_ohlc(dir.path(), "d.csv", 365 * 4, 3);
    let o = run(
        dir.path(),
        &[
            "walkforward", "--data", data.to_str().unwrap(), "--format", "ohlc", "--grid", "1,20,1",
            "--annualization", "arithmetic", "--out", "wf",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let doc = json(&dir.path().join("wf/walkforward.json"));
    let r = &doc["report"];
    assert_eq!(r["annualization"], "arithmetic");
    assert_eq!(r["combined_annualized_return"], r["combined_annualized_arithmetic"]);
    assert!(r["combined_annualized_geometric"].is_number());
    let periods = r["periods"].as_array().unwrap().len();
    let rows = fs::read_to_string(dir.path().join("wf/parameters.csv")).unwrap().lines().count();
    assert_eq!(rows, periods + 1);
}

#[test]
fn correlate_rejects_window_below_two() {
    let dir = TempDir::new().unwrap();
    let a = write_ohlc(dir.path(), "a.csv", 100, 4);
    let o = run(
        dir.path(),
        &[
            "correlate", "--data", a.to_str().unwrap(), "--format", "ohlc", "--other",
            a.to_str().unwrap(), "--window", "1",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("window < 2"), "{}", stderr(&o));
}

#[test]
fn correlate_series_with_itself_is_one() {
    let dir = TempDir::new().unwrap();
    let a = write_ohlc(dir.path(), "a.csv", 100, 5);
    let o = run(
        dir.path(),
        &[
            "correlate", "--data", a.to_str().unwrap(), "--format", "ohlc", "--other",
            a.to_str().unwrap(), "--window", "10", "--out", "c",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("c/correlation.csv")).unwrap();
    let values: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter_map(|l| l.rsplit(',').next().unwrap().parse().ok())
        .collect();
    assert_eq!(values.len(), 99 - 9);
    assert!(values.iter().all(|v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn correlate_with_strategies_writes_strategy_outputs() {
    let dir = TempDir::new().unwrap();
    let a = write_ohlc(dir.path(), "a.csv", 300, 6);
    let b = write_ohlc(dir.path(), "b.csv", 300, 7);
    let o = run(
        dir.path(),
        &[
            "correlate", "--data", a.to_str().unwrap(), "--format", "ohlc", "--other",
            b.to_str().unwrap(), "--short", "5", "--long", "20", "--out", "c",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("c/strategy_correlation.csv").exists());
    assert!(dir.path().join("c/strategy_significance.json").exists());
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let data = write_ticks(dir.path(), 1500);
    let mut outputs = Vec::new();
    for (out, threads) in [("r1", "1"), ("r2", "3")] {
        let o = run(
            dir.path(),
            &[
                "--threads", threads, "grid", "--data", data.to_str().unwrap(), "--grid", "1,200,7",
                "--out", out,
            ],
        );
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(dir.path().join(out));
    }
    for name in ["surface.csv", "surface.json", "best.json"] {
        assert_eq!(
            fs::read(outputs[0].join(name)).unwrap(),
            fs::read(outputs[1].join(name)).unwrap(),
            "{name} differs"
        );
    }
}

#[test]
fn ingest_resamples_and_summarizes() {
    let dir = TempDir::new().unwrap();
    let data = write_ticks(dir.path(), 48);
    let o = run(
        dir.path(),
        &["ingest", "--data", data.to_str().unwrap(), "--resample", "1d", "--out", "i"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let series = fs::read_to_string(dir.path().join("i/series.csv")).unwrap();
    assert_eq!(series.lines().count(), 3);
    assert!(dir.path().join("i/summary.json").exists());
}

#[test]
fn reads_ticks_from_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let dir = TempDir::new().unwrap();
    let ticks = fs::read(write_ticks(dir.path(), 30)).unwrap();
    let mut child = bin()
        .current_dir(dir.path())
        .args(["ingest", "--data", "-", "--out", "s"])
        .stdin(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&ticks).unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let series = fs::read_to_string(dir.path().join("s/series.csv")).unwrap();
    assert_eq!(series.lines().count(), 31);
}
