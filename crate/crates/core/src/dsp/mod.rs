//! Native heart-rate pipeline: Pan-Tompkins QRS detection, the RR / iHR /
//! tHR computation, and a synthetic ECG generator with known R peaks.

mod detector;
mod filters;
mod heart_rate;
mod synth;

pub use detector::{match_peaks, pan_tompkin, PeakMatch, PtConfig, QrsDetection};
pub use filters::{bandpass_taps, derivative, fir_zero_phase, moving_average};
pub use heart_rate::{ekg_peak_det, heart_rate_from_peaks, rebase_timestamps, HeartRateSeries};
pub use synth::{parse_schedule, synth_ecg, Segment, SynthEcg};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DspError {
    #[error("signal has {len} samples, at least {needed} needed")]
    SignalTooShort { len: usize, needed: usize },
    #[error("invalid detector configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid sampling rate {0} (must be at least 60)")]
    InvalidFs(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

/// Minimum sampling rate accepted for ECG input.
pub const MIN_FS: u32 = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct EcgSignal {
    pub samples: Vec<f64>,
    pub fs: u32,
}

impl EcgSignal {
    pub fn new(samples: Vec<f64>, fs: u32) -> Result<Self, DspError> {
        if fs < MIN_FS {
            return Err(DspError::InvalidFs(fs as f64));
        }
        if samples.is_empty() {
            return Err(DspError::SignalTooShort { len: 0, needed: 1 });
        }
        Ok(EcgSignal { samples, fs })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs as f64
    }
}

/// Anything that can produce R-peak locations for a signal. The
/// interpreter's `pan_tompkin` intrinsic and the native pipeline both go
/// through this, so tests can force detector output in both engines.
pub trait PeakSource {
    fn detect(&self, sig: &EcgSignal) -> Result<QrsDetection, DspError>;
}

impl PeakSource for PtConfig {
    fn detect(&self, sig: &EcgSignal) -> Result<QrsDetection, DspError> {
        pan_tompkin(sig, self)
    }
}

/// Returns fixed 0-based peak locations regardless of the signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPeaks(pub Vec<usize>);

impl PeakSource for FixedPeaks {
    fn detect(&self, sig: &EcgSignal) -> Result<QrsDetection, DspError> {
        let amps = self
            .0
            .iter()
            .map(|&i| sig.samples.get(i).copied().unwrap_or(0.0))
            .collect();
        Ok(QrsDetection {
            peak_indices: self.0.clone(),
            peak_amplitudes: amps,
            delay: 0,
        })
    }
}
