//! Offline Pan-Tompkins QRS detection.

use super::filters::{bandpass_taps, derivative, fir_zero_phase, moving_average};
use super::{DspError, EcgSignal};

/// Detector parameters. Defaults follow the original real-time algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct PtConfig {
    pub low_hz: f64,
    pub high_hz: f64,
    /// Length of the bandpass FIR, in seconds.
    pub filter_length_s: f64,
    pub integration_window_s: f64,
    pub refractory_s: f64,
    pub t_wave_window_s: f64,
    /// Slope window used by the T-wave test.
    pub slope_window_s: f64,
    /// A candidate whose slope is below this fraction of the previous
    /// beat's slope is taken as a T wave.
    pub t_wave_slope_ratio: f64,
    pub learning_s: f64,
    /// Weight of a new peak in the running signal level.
    pub signal_weight: f64,
    /// Weight of a new peak in the running noise level.
    pub noise_weight: f64,
    /// Weight of a peak found by search-back in the running signal level.
    pub searchback_weight: f64,
    /// THR1 = NPKI + fraction * (SPKI - NPKI).
    pub threshold_fraction: f64,
    /// Search back when no beat was found for this multiple of the RR average.
    pub searchback_factor: f64,
    /// Half-width of the window in which a fiducial mark is moved onto the
    /// R wave of the bandpassed signal.
    pub locate_window_s: f64,
}

impl Default for PtConfig {
    fn default() -> Self {
        PtConfig {
            low_hz: 5.0,
            high_hz: 15.0,
            filter_length_s: 0.5,
            integration_window_s: 0.150,
            refractory_s: 0.200,
            t_wave_window_s: 0.360,
            slope_window_s: 0.075,
            t_wave_slope_ratio: 0.5,
            learning_s: 2.0,
            signal_weight: 0.125,
            noise_weight: 0.125,
            searchback_weight: 0.25,
            threshold_fraction: 0.25,
            searchback_factor: 1.66,
            locate_window_s: 0.1,
        }
    }
}

impl PtConfig {
    pub fn validate(&self, fs: f64) -> Result<(), DspError> {
        let bad = |m: &str| Err(DspError::InvalidConfig(m.to_string()));
        if !(self.low_hz > 0.0 && self.low_hz < self.high_hz && self.high_hz < fs / 2.0) {
            return bad("cutoffs must satisfy 0 < low < high < fs/2");
        }
        let windows = [
            self.filter_length_s,
            self.integration_window_s,
            self.refractory_s,
            self.t_wave_window_s,
            self.slope_window_s,
            self.learning_s,
            self.locate_window_s,
        ];
        if windows.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return bad("windows must be positive");
        }
        let weights = [
            self.signal_weight,
            self.noise_weight,
            self.searchback_weight,
            self.threshold_fraction,
            self.t_wave_slope_ratio,
        ];
        if weights.iter().any(|w| !(*w > 0.0 && *w <= 1.0)) {
            return bad("weights must lie in (0, 1]");
        }
        if !(self.searchback_factor > 1.0 && self.searchback_factor.is_finite()) {
            return bad("search-back factor must exceed 1");
        }
        Ok(())
    }

    fn samples(&self, seconds: f64, fs: f64) -> usize {
        (seconds * fs).round().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QrsDetection {
    /// 0-based R-peak sample indices, strictly ascending.
    pub peak_indices: Vec<usize>,
    /// Integrated-waveform height at each detection.
    pub peak_amplitudes: Vec<f64>,
    /// Group delay of the filter chain that was compensated, in samples.
    pub delay: usize,
}

/// Local maxima of `m`, thinned so no two are closer than `min_dist`
/// (taller ones win), in time order.
fn fiducial_marks(m: &[f64], min_dist: usize) -> Vec<usize> {
    let mut cand: Vec<usize> = (1..m.len().saturating_sub(1))
        .filter(|&i| m[i] > 0.0 && m[i] > m[i - 1] && m[i] >= m[i + 1])
        .collect();
    cand.sort_by(|&a, &b| m[b].total_cmp(&m[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for c in cand {
        let pos = kept.partition_point(|&k| k < c);
        let clear_left = pos == 0 || c - kept[pos - 1] >= min_dist;
        let clear_right = pos == kept.len() || kept[pos] - c >= min_dist;
        if clear_left && clear_right {
            kept.insert(pos, c);
        }
    }
    kept
}

struct Levels {
    spki: f64,
    npki: f64,
    fraction: f64,
}

impl Levels {
    fn thr1(&self) -> f64 {
        self.npki + self.fraction * (self.spki - self.npki)
    }

    fn thr2(&self) -> f64 {
        0.5 * self.thr1()
    }
}

/// Detects R peaks in `sig`.
pub fn pan_tompkin(sig: &EcgSignal, cfg: &PtConfig) -> Result<QrsDetection, DspError> {
    let fs = sig.fs as f64;
    cfg.validate(fs)?;
    let x = &sig.samples;
    let needed = (cfg.learning_s * fs).ceil() as usize;
    if x.len() < needed {
        return Err(DspError::SignalTooShort {
            len: x.len(),
            needed,
        });
    }

    let taps = bandpass_taps(
        fs,
        cfg.low_hz,
        cfg.high_hz,
        cfg.samples(cfg.filter_length_s, fs),
    );
    let bp = fir_zero_phase(x, &taps);
    let sq: Vec<f64> = derivative(&bp, fs).into_iter().map(|d| d * d).collect();
    let win = cfg.samples(cfg.integration_window_s, fs) | 1;
    let m = moving_average(&sq, win);
    let delay = taps.len() / 2 + win / 2;

    let refractory = cfg.samples(cfg.refractory_s, fs);
    let t_wave = cfg.samples(cfg.t_wave_window_s, fs);
    let slope_w = cfg.samples(cfg.slope_window_s, fs);
    let marks = fiducial_marks(&m, refractory);

    let learn = &m[..needed.min(m.len())];
    let mut top = learn.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        top = m.iter().copied().fold(0.0, f64::max);
    }
    let mut lv = Levels {
        spki: top / 3.0,
        npki: learn.iter().sum::<f64>() / learn.len() as f64 / 2.0,
        fraction: cfg.threshold_fraction,
    };

    let slope = |loc: usize| {
        let lo = loc.saturating_sub(slope_w);
        (lo..loc).map(|j| m[j + 1] - m[j]).fold(0.0, f64::max)
    };

    let mut beats: Vec<usize> = Vec::new();
    let mut noise: Vec<usize> = Vec::new();
    for &loc in &marks {
        let pk = m[loc];
        if let Some(&last) = beats.last() {
            if beats.len() >= 2 {
                let recent = &beats[beats.len().saturating_sub(9)..];
                let rr_avg =
                    (recent[recent.len() - 1] - recent[0]) as f64 / (recent.len() - 1) as f64;
                if (loc - last) as f64 > cfg.searchback_factor * rr_avg {
                    let thr2 = lv.thr2();
                    let found = noise
                        .iter()
                        .copied()
                        .filter(|&c| {
                            c >= last + refractory && c + refractory <= loc && m[c] >= thr2
                        })
                        .max_by(|&a, &b| m[a].total_cmp(&m[b]));
                    if let Some(c) = found {
                        noise.retain(|&n| n != c);
                        beats.push(c);
                        lv.spki =
                            cfg.searchback_weight * m[c] + (1.0 - cfg.searchback_weight) * lv.spki;
                    }
                }
            }
        }
        let mut is_beat = pk >= lv.thr1();
        if is_beat {
            if let Some(&prev) = beats.last() {
                if loc - prev < t_wave && slope(loc) < cfg.t_wave_slope_ratio * slope(prev) {
                    is_beat = false;
                }
            }
        }
        if is_beat {
            beats.push(loc);
            lv.spki = cfg.signal_weight * pk + (1.0 - cfg.signal_weight) * lv.spki;
        } else {
            noise.push(loc);
            lv.npki = cfg.noise_weight * pk + (1.0 - cfg.noise_weight) * lv.npki;
        }
    }

    // Move each mark onto the R wave, then re-apply the refractory period
    // in case two marks landed on the same complex.
    let reach = cfg.samples(cfg.locate_window_s, fs);
    let mut located: Vec<(usize, f64)> = beats
        .iter()
        .map(|&loc| {
            let lo = loc.saturating_sub(reach);
            let hi = (loc + reach).min(bp.len() - 1);
            let r = (lo..=hi)
                .max_by(|&a, &b| bp[a].total_cmp(&bp[b]).then(b.cmp(&a)))
                .unwrap_or(loc);
            (r, m[loc])
        })
        .collect();
    located.sort_by_key(|&(r, _)| r);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(located.len());
    for (r, amp) in located {
        match out.last_mut() {
            Some(last) if r - last.0 < refractory => {
                if bp[r] > bp[last.0] {
                    *last = (r, amp);
                }
            }
            _ => out.push((r, amp)),
        }
    }
    Ok(QrsDetection {
        peak_indices: out.iter().map(|p| p.0).collect(),
        peak_amplitudes: out.iter().map(|p| p.1).collect(),
        delay,
    })
}

/// Beat-by-beat comparison of detections against reference locations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeakMatch {
    pub true_positives: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
}

impl PeakMatch {
    pub fn sensitivity(&self) -> f64 {
        let d = self.true_positives + self.false_negatives;
        if d == 0 {
            1.0
        } else {
            self.true_positives as f64 / d as f64
        }
    }

    pub fn positive_predictivity(&self) -> f64 {
        let d = self.true_positives + self.false_positives;
        if d == 0 {
            1.0
        } else {
            self.true_positives as f64 / d as f64
        }
    }
}

/// Matches sorted `detected` against sorted `truth`, pairing each truth
/// location with at most one detection no further than `tolerance`.
pub fn match_peaks(truth: &[usize], detected: &[usize], tolerance: usize) -> PeakMatch {
    let (mut i, mut j) = (0, 0);
    let mut pm = PeakMatch {
        true_positives: 0,
        false_negatives: 0,
        false_positives: 0,
    };
    while i < truth.len() && j < detected.len() {
        let (t, d) = (truth[i], detected[j]);
        if t.abs_diff(d) <= tolerance {
            pm.true_positives += 1;
            i += 1;
            j += 1;
        } else if d < t {
            pm.false_positives += 1;
            j += 1;
        } else {
            pm.false_negatives += 1;
            i += 1;
        }
    }
    pm.false_negatives += truth.len() - i;
    pm.false_positives += detected.len() - j;
    pm
}
