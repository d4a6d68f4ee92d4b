//! Fixture generators and independent oracles shared by the integration
//! tests. Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trendlab::{PriceSeries, Resolution, Signal, Timestamp};

pub const T0: Timestamp = 1_315_872_000; // 2011-09-13 00:00:00 UTC

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Geometric random walk starting at `start`.
pub fn random_walk(rng: &mut impl Rng, len: usize, start: f64, vol: f64) -> Vec<f64> {
    let mut p = start;
    (0..len)
        .map(|_| {
            let v = p;
            p *= (vol * (rng.gen::<f64>() * 2.0 - 1.0)).exp();
            v
        })
        .collect()
}

pub fn hourly(closes: Vec<f64>) -> PriceSeries {
    PriceSeries::from_closes("synthetic", Resolution::HOURLY, T0, closes).unwrap()
}

pub fn daily(closes: Vec<f64>) -> PriceSeries {
    PriceSeries::from_closes("synthetic", Resolution::DAILY, T0, closes).unwrap()
}

/// Square wave of `period` bars between `low` and `high`, plus a small drift
/// so distinct cells score distinctly.
pub fn square_wave(len: usize, period: usize, low: f64, high: f64, drift: f64) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let level = if (i % period) < period / 2 { low } else { high };
            level + drift * i as f64
        })
        .collect()
}

/// `(1/N) * sum(x[i-N+1..=i])` evaluated directly for every index.
pub fn brute_sma(xs: &[f64], n: usize) -> Vec<Option<f64>> {
    (0..xs.len())
        .map(|i| {
            if i + 1 < n {
                None
            } else {
                let mut s = 0.0;
                for x in &xs[i + 1 - n..=i] {
                    s += x;
                }
                Some(s / n as f64)
            }
        })
        .collect()
}

/// Direct evaluation of `e[1] = x[1]`, `e[n] = a x[n] + (1 - a) e[n-1]`.
pub fn ema_recurrence(xs: &[f64], n: usize) -> Vec<f64> {
    let a = 2.0 / (n as f64 + 1.0);
    let mut out = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let v = if i == 0 { x } else { a * x + (1.0 - a) * out[i - 1] };
        out.push(v);
    }
    out
}

pub fn dema_recurrence(xs: &[f64], n: usize) -> Vec<f64> {
    let e = ema_recurrence(xs, n);
    let ee = ema_recurrence(&e, n);
    e.iter().zip(&ee).map(|(a, b)| 2.0 * a - b).collect()
}

/// Final equity from price ratios alone: each round trip multiplies capital
/// by sell/buy; an open position is marked at the last close.
pub fn ledger_final_equity(closes: &[f64], signals: &[Signal], cash: f64) -> f64 {
    let mut capital = cash;
    let mut entry: Option<f64> = None;
    for (&p, &s) in closes.iter().zip(signals) {
        match (s, entry) {
            (Signal::Buy, None) => entry = Some(p),
            (Signal::Sell, Some(b)) => {
                capital *= p / b;
                entry = None;
            }
            _ => {}
        }
    }
    if let Some(b) = entry {
        capital *= closes[closes.len() - 1] / b;
    }
    capital
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Two-sided Student-t tail by quadrature of the unnormalized density; the
/// normalizing constant is itself integrated, so no gamma function is used.
pub fn t_two_sided_p_by_quadrature(t: f64, df: f64) -> f64 {
    let g = |u: f64| (1.0 + u * u / df).powf(-(df + 1.0) / 2.0);
    let bound = 60.0;
    let total = simpson(g, -bound, bound, 400_000);
    let inner = simpson(g, -t.abs(), t.abs(), 40_000);
    1.0 - inner / total
}

/// Two columns of length `n` whose sample Pearson correlation is `r`.
pub fn correlated_pair(rng: &mut impl Rng, n: usize, r: f64) -> (Vec<f64>, Vec<f64>) {
    let center = |v: &mut Vec<f64>| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter_mut().for_each(|x| *x -= m);
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let mut z: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    center(&mut x);
    center(&mut z);
    let k = dot(&z, &x) / dot(&x, &x);
    z.iter_mut().zip(&x).for_each(|(zi, xi)| *zi -= k * xi);
    let nx = dot(&x, &x).sqrt();
    let nz = dot(&z, &z).sqrt();
    x.iter_mut().for_each(|v| *v /= nx);
    z.iter_mut().for_each(|v| *v /= nz);
    let y = x
        .iter()
        .zip(&z)
        .map(|(a, b)| r * a + (1.0 - r * r).sqrt() * b)
        .collect();
    (x, y)
}

/// Daily series with alternating up and down legs of `leg` days.
pub fn zigzag_days(days: usize, leg: usize, start: f64, daily_move: f64) -> Vec<f64> {
    let mut p = start;
    (0..days)
        .map(|i| {
            let v = p;
            let up = (i / leg).is_multiple_of(2);
            p *= if up { 1.0 + daily_move } else { 1.0 - daily_move };
            v
        })
        .collect()
}
