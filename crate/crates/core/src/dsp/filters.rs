//! Zero-phase FIR building blocks for the detector front end.

use std::f64::consts::PI;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Hamming-windowed sinc bandpass with `n_taps` (forced odd) coefficients,
/// scaled to unit gain at the passband center.
pub fn bandpass_taps(fs: f64, low_hz: f64, high_hz: f64, n_taps: usize) -> Vec<f64> {
    let n = n_taps | 1;
    let m = (n / 2) as f64;
    let (a, b) = (2.0 * low_hz / fs, 2.0 * high_hz / fs);
    let mut h: Vec<f64> = (0..n)
        .map(|k| {
            let x = k as f64 - m;
            let w = if n == 1 {
                1.0
            } else {
                0.54 - 0.46 * (2.0 * PI * k as f64 / (n - 1) as f64).cos()
            };
            w * (b * sinc(b * x) - a * sinc(a * x))
        })
        .collect();
    let f0 = 0.5 * (low_hz + high_hz) / fs;
    let (mut re, mut im) = (0.0, 0.0);
    for (k, c) in h.iter().enumerate() {
        let ph = 2.0 * PI * f0 * (k as f64 - m);
        re += c * ph.cos();
        im += c * ph.sin();
    }
    let gain = re.hypot(im);
    if gain > 0.0 {
        for c in &mut h {
            *c /= gain;
        }
    }
    h
}

fn at(x: &[f64], i: isize) -> f64 {
    x[i.clamp(0, x.len() as isize - 1) as usize]
}

/// Applies symmetric taps centered on each sample, replicating the edge
/// samples outward. No delay is introduced.
pub fn fir_zero_phase(x: &[f64], taps: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let m = (taps.len() / 2) as isize;
    (0..x.len() as isize)
        .map(|n| {
            taps.iter()
                .enumerate()
                .map(|(k, h)| h * at(x, n + k as isize - m))
                .sum()
        })
        .collect()
}

/// Centered five-point derivative `(2(x[n+1]-x[n-1]) + x[n+2]-x[n-2]) * fs/8`.
/// A constant input gives exactly zero.
pub fn derivative(x: &[f64], fs: f64) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    (0..x.len() as isize)
        .map(|n| {
            let d = 2.0 * (at(x, n + 1) - at(x, n - 1)) + (at(x, n + 2) - at(x, n - 2));
            d * fs / 8.0
        })
        .collect()
}

/// Centered moving average over `width` samples (forced odd), with edge
/// replication.
pub fn moving_average(x: &[f64], width: usize) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let w = width.max(1) | 1;
    let half = (w / 2) as isize;
    (0..x.len() as isize)
        .map(|n| (-half..=half).map(|k| at(x, n + k)).sum::<f64>() / w as f64)
        .collect()
}
