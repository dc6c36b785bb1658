//! Synthetic ECG with a known R-peak schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{DspError, EcgSignal, MIN_FS};

/// A constant-rate stretch of the schedule, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub bpm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthEcg {
    pub signal: EcgSignal,
    /// 0-based sample index of every planted R wave.
    pub r_peaks: Vec<usize>,
}

pub const MIN_BPM: f64 = 30.0;
pub const MAX_BPM: f64 = 220.0;

/// Parses `"0-120:70,120-210:120"` (start-end:bpm, seconds).
pub fn parse_schedule(text: &str) -> Result<Vec<Segment>, DspError> {
    let bad = |m: String| DspError::InvalidSchedule(m);
    let segs = text
        .split(',')
        .map(|item| {
            let item = item.trim();
            let (span, bpm) = item
                .split_once(':')
                .ok_or_else(|| bad(format!("expected start-end:bpm, found `{item}`")))?;
            let (a, b) = span
                .split_once('-')
                .ok_or_else(|| bad(format!("expected start-end, found `{span}`")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad number `{s}`")))
            };
            Ok(Segment {
                start: num(a)?,
                end: num(b)?,
                bpm: num(bpm)?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    validate(&segs)?;
    Ok(segs)
}

// Negated comparisons also reject NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn validate(schedule: &[Segment]) -> Result<(), DspError> {
    let bad = |m: String| Err(DspError::InvalidSchedule(m));
    if schedule.is_empty() {
        return bad("empty schedule".into());
    }
    if !(schedule[0].start >= 0.0) {
        return bad("schedule must start at or after 0".into());
    }
    for (i, s) in schedule.iter().enumerate() {
        if !(s.end > s.start && s.end.is_finite()) {
            return bad(format!("segment {} has end <= start", i + 1));
        }
        if !(MIN_BPM..=MAX_BPM).contains(&s.bpm) {
            return bad(format!("{} bpm outside [{MIN_BPM}, {MAX_BPM}]", s.bpm));
        }
        if i > 0 && schedule[i - 1].end != s.start {
            return bad(format!(
                "segment {} does not start where the previous ends",
                i + 1
            ));
        }
    }
    Ok(())
}

/// Gaussian wave: (amplitude, offset from R in seconds, width in seconds).
type Wave = (f64, f64, f64);

fn beat_waves(rr: f64) -> [Wave; 5] {
    let s = rr.sqrt();
    [
        (0.12, -0.16, 0.025),
        (-0.12, -0.028, 0.008),
        (1.0, 0.0, 0.010),
        (-0.22, 0.030, 0.009),
        (0.30, 0.05 + 0.22 * s, 0.045 * s),
    ]
}

/// Renders the schedule at `fs` with R amplitude 1 and additive white
/// Gaussian noise of standard deviation `noise_amplitude`.
pub fn synth_ecg(
    schedule: &[Segment],
    fs: u32,
    noise_amplitude: f64,
    seed: u64,
) -> Result<SynthEcg, DspError> {
    validate(schedule)?;
    if fs < MIN_FS {
        return Err(DspError::InvalidFs(fs as f64));
    }
    if !(noise_amplitude >= 0.0 && noise_amplitude.is_finite()) {
        return Err(DspError::InvalidSchedule(format!(
            "noise amplitude {noise_amplitude} must be finite and non-negative"
        )));
    }
    let fsf = fs as f64;
    let end = schedule[schedule.len() - 1].end;
    let n = (end * fsf).round() as usize;
    let rate_at = |t: f64| {
        schedule
            .iter()
            .find(|s| t < s.end)
            .unwrap_or(&schedule[schedule.len() - 1])
            .bpm
    };

    let mut x = vec![0.0; n];
    let mut r_peaks = Vec::new();
    let mut t = schedule[0].start + 0.5 * 60.0 / schedule[0].bpm;
    while t < end {
        let rr = 60.0 / rate_at(t);
        let r = (t * fsf).round() as usize;
        if r >= n {
            break;
        }
        r_peaks.push(r);
        let center = r as f64 / fsf;
        for (amp, offset, width) in beat_waves(rr) {
            let c = center + offset;
            let lo = ((c - 5.0 * width) * fsf).floor().max(0.0) as usize;
            let hi = (((c + 5.0 * width) * fsf).ceil().max(0.0) as usize).min(n.saturating_sub(1));
            for (i, xi) in x.iter_mut().enumerate().take(hi + 1).skip(lo) {
                let z = (i as f64 / fsf - c) / width;
                *xi += amp * (-0.5 * z * z).exp();
            }
        }
        t += rr;
    }
    if noise_amplitude > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_amplitude).expect("validated");
        for xi in &mut x {
            *xi += normal.sample(&mut rng);
        }
    }
    Ok(SynthEcg {
        signal: EcgSignal { samples: x, fs },
        r_peaks,
    })
}
