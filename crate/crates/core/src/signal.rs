//! One-sample-per-line CSV signals with an optional `# fs=<int>` header.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::dsp::{DspError, EcgSignal};

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("line {line}: cannot read `{content}` as a sample")]
    MalformedCsv { line: usize, content: String },
    #[error("sampling rate unknown: pass --fs or add a `# fs=<int>` header")]
    MissingFs,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Dsp(#[from] DspError),
}

/// Samples and the header sampling rate, if any.
pub fn parse_csv(text: &str) -> Result<(Vec<f64>, Option<u32>), SignalError> {
    let mut samples = Vec::new();
    let mut fs = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let malformed = || SignalError::MalformedCsv {
            line: i + 1,
            content: raw.to_string(),
        };
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("fs=") {
                fs = Some(v.trim().parse::<u32>().map_err(|_| malformed())?);
            }
            continue;
        }
        let x: f64 = line.parse().map_err(|_| malformed())?;
        if !x.is_finite() {
            return Err(malformed());
        }
        samples.push(x);
    }
    Ok((samples, fs))
}

/// Parses `text`; `fs_override` takes precedence over the header.
pub fn parse_signal(text: &str, fs_override: Option<u32>) -> Result<EcgSignal, SignalError> {
    let (samples, header) = parse_csv(text)?;
    let fs = fs_override.or(header).ok_or(SignalError::MissingFs)?;
    Ok(EcgSignal::new(samples, fs)?)
}

pub fn load_csv(path: &Path, fs_override: Option<u32>) -> Result<EcgSignal, SignalError> {
    let text = std::fs::read_to_string(path).map_err(|source| SignalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_signal(&text, fs_override)
}

/// Header plus one sample per line, in shortest round-trip form.
pub fn render_csv(sig: &EcgSignal) -> String {
    let mut out = format!("# fs={}\n", sig.fs);
    for x in &sig.samples {
        out.push_str(&format!("{x}\n"));
    }
    out
}
