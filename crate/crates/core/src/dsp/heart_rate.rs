//! RR intervals, instantaneous heart rate and its timestamps.

use super::{DspError, EcgSignal, PeakSource};

/// RR interval (samples) substituted when fewer than two peaks exist.
pub const DEFAULT_RR: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HeartRateSeries {
    /// Beats per minute.
    pub ihr: Vec<f64>,
    /// Seconds, midway between consecutive peaks.
    pub thr: Vec<f64>,
    pub peaks: Vec<usize>,
}

/// `RR = diff(peak)` (or 200), `iHR = 60./RR*fs`,
/// `tHR = (peak(1:end-1)+RR/2)/fs`, evaluated in the same operation order
/// as the interpreter so both produce identical bits.
pub fn heart_rate_from_peaks(peaks: &[usize], fs: f64) -> HeartRateSeries {
    let rr: Vec<f64> = if peaks.len() > 1 {
        peaks
            .windows(2)
            .map(|w| w[1] as f64 - w[0] as f64)
            .collect()
    } else {
        vec![DEFAULT_RR]
    };
    let ihr = rr.iter().map(|r| 60.0 / r * fs).collect();
    let thr = peaks
        .iter()
        .take(peaks.len().saturating_sub(1))
        .zip(&rr)
        .map(|(&p, r)| (p as f64 + r / 2.0) / fs)
        .collect();
    HeartRateSeries {
        ihr,
        thr,
        peaks: peaks.to_vec(),
    }
}

/// Heart rate from the detector output for `sig`.
pub fn ekg_peak_det(sig: &EcgSignal, source: &dyn PeakSource) -> Result<HeartRateSeries, DspError> {
    let det = source.detect(sig)?;
    Ok(heart_rate_from_peaks(&det.peak_indices, sig.fs as f64))
}

/// Re-expresses timestamps computed from `base`-based peak indices as
/// 0-based seconds. Every timestamp is a half-integer sample count over
/// `fs`, so the count is recovered exactly before shifting.
pub fn rebase_timestamps(t: &[f64], fs: f64, base: f64) -> Vec<f64> {
    t.iter()
        .map(|&x| ((2.0 * x * fs).round() / 2.0 - base) / fs)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::FixedPeaks;

    #[test]
    fn forced_three_peaks() {
        let hr = heart_rate_from_peaks(&[100, 200, 300], 100.0);
        assert_eq!(hr.ihr, [60.0, 60.0]);
        assert_eq!(hr.thr, [1.5, 2.5]);
    }

    #[test]
    fn single_and_no_peak() {
        let hr = heart_rate_from_peaks(&[150], 100.0);
        assert_eq!(hr.ihr, [30.0]);
        assert!(hr.thr.is_empty());
        let hr = heart_rate_from_peaks(&[], 100.0);
        assert_eq!(hr.ihr, [30.0]);
        assert!(hr.thr.is_empty());
    }

    #[test]
    fn one_second_spacing_is_sixty() {
        let peaks: Vec<usize> = (0..20).map(|k| 17 + k * 360).collect();
        let hr = heart_rate_from_peaks(&peaks, 360.0);
        assert!(hr.ihr.iter().all(|&b| b == 60.0));
    }

    #[test]
    fn rebase_matches_zero_based_bits() {
        let p0 = [3usize, 250, 611, 1000, 1371];
        let p1: Vec<usize> = p0.iter().map(|p| p + 1).collect();
        for fs in [200.0, 360.0, 500.0] {
            let a = heart_rate_from_peaks(&p0, fs);
            let b = heart_rate_from_peaks(&p1, fs);
            assert_eq!(a.ihr, b.ihr);
            assert_eq!(rebase_timestamps(&b.thr, fs, 1.0), a.thr);
            assert_eq!(rebase_timestamps(&a.thr, fs, 0.0), a.thr);
        }
    }

    #[test]
    fn through_peak_source() {
        let sig = EcgSignal::new(vec![0.0; 400], 100).unwrap();
        let hr = ekg_peak_det(&sig, &FixedPeaks(vec![100, 200, 300])).unwrap();
        assert_eq!(hr.peaks, [100, 200, 300]);
        assert_eq!(hr.ihr, [60.0, 60.0]);
    }
}
