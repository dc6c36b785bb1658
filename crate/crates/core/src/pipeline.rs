//! Heart rate through either engine, the engine comparison, and the
//! `t_sec,bpm` rendering.

use std::fmt;
use std::str::FromStr;

use crate::analysis::TypedProgram;
use crate::dsp::{ekg_peak_det, rebase_timestamps, EcgSignal, HeartRateSeries, PeakSource};
use crate::interpreter::Interpreter;
use crate::mathcore::NumValue;
use crate::Error;

/// Name of the bundled heart-rate entry point.
pub const HR_ENTRY: &str = "EKGpeakDet";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// The source program run by the reference interpreter.
    Interp,
    /// The compiled-in Rust pipeline.
    Native,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interp" => Ok(Engine::Interp),
            "native" => Ok(Engine::Native),
            other => Err(format!("unknown engine `{other}` (interp or native)")),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Interp => "interp",
            Engine::Native => "native",
        })
    }
}

/// Runs `entry(sig, fs)` of `tp` in the interpreter and converts its
/// `iHR`, `tHR` and `peak` outputs to 0-based conventions.
pub fn interp_heart_rate(
    tp: &TypedProgram,
    entry: &str,
    sig: &EcgSignal,
    source: &dyn PeakSource,
) -> Result<HeartRateSeries, Error> {
    let fs = sig.fs as f64;
    let out = Interpreter::new(tp, source).call(
        entry,
        vec![NumValue::column(sig.samples.clone()), NumValue::RScalar(fs)],
    )?;
    let get = |name: &str| {
        out.get(name)
            .ok_or_else(|| Error::Invalid(format!("`{entry}` has no output `{name}`")))
    };
    let ihr = get("iHR")?.to_reals();
    let thr = rebase_timestamps(&get("tHR")?.to_reals(), fs, 1.0);
    let mut peaks = Vec::new();
    for p in get("peak")?.to_reals() {
        if !(p >= 1.0 && p.fract() == 0.0) {
            return Err(Error::Invalid(format!(
                "`peak` holds {p}, not a 1-based index"
            )));
        }
        peaks.push(p as usize - 1);
    }
    Ok(HeartRateSeries { ihr, thr, peaks })
}

/// The native pipeline, with `tHR` passed through the same normalization
/// as the interpreter's (a no-op for 0-based timestamps).
pub fn native_heart_rate(
    sig: &EcgSignal,
    source: &dyn PeakSource,
) -> Result<HeartRateSeries, Error> {
    let mut hr = ekg_peak_det(sig, source)?;
    hr.thr = rebase_timestamps(&hr.thr, sig.fs as f64, 0.0);
    Ok(hr)
}

/// Heart rate from the chosen engine. `tp` is the program the interpreter
/// runs; the native engine ignores it.
pub fn heart_rate(
    engine: Engine,
    tp: &TypedProgram,
    sig: &EcgSignal,
    source: &dyn PeakSource,
) -> Result<HeartRateSeries, Error> {
    match engine {
        Engine::Interp => interp_heart_rate(tp, HR_ENTRY, sig, source),
        Engine::Native => native_heart_rate(sig, source),
    }
}

/// C `%g`: `digits` significant digits, trailing zeros removed,
/// exponent form outside `1e-4 ..< 10^digits`.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let strip = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip(mant), exp.abs())
    } else {
        strip(&format!("{:.*}", (p as i32 - 1 - exp) as usize, x))
    }
}

/// `t_sec,bpm` rows pairing each timestamp with its rate, 6 significant
/// digits.
pub fn render_hr_csv(hr: &HeartRateSeries) -> String {
    let mut out = String::from("t_sec,bpm\n");
    for (t, b) in hr.thr.iter().zip(&hr.ihr) {
        out.push_str(&format!("{},{}\n", format_g(*t, 6), format_g(*b, 6)));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub max_ihr: f64,
    pub max_thr: f64,
    /// First output and position where the engines differ.
    pub first_difference: Option<(&'static str, usize)>,
}

impl DiffReport {
    pub fn agrees(&self) -> bool {
        self.first_difference.is_none()
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max|ΔiHR|={}, max|ΔtHR|={}",
            format_g(self.max_ihr, 6),
            format_g(self.max_thr, 6)
        )?;
        if let Some((name, i)) = self.first_difference {
            write!(f, "\nfirst difference: {name}[{i}]")?;
        }
        Ok(())
    }
}

fn compare(a: &[f64], b: &[f64]) -> (f64, Option<usize>) {
    let mut max = 0.0f64;
    let mut first = None;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if x.to_bits() != y.to_bits() {
            first.get_or_insert(i);
            max = max.max((x - y).abs());
        }
    }
    if a.len() != b.len() {
        first.get_or_insert(a.len().min(b.len()));
        max = f64::INFINITY;
    }
    (max, first)
}

/// Compares two heart-rate series value by value, bit for bit.
pub fn diff_series(interp: &HeartRateSeries, native: &HeartRateSeries) -> DiffReport {
    let (max_ihr, ihr_at) = compare(&interp.ihr, &native.ihr);
    let (max_thr, thr_at) = compare(&interp.thr, &native.thr);
    let pa: Vec<f64> = interp.peaks.iter().map(|&p| p as f64).collect();
    let pb: Vec<f64> = native.peaks.iter().map(|&p| p as f64).collect();
    let (_, peak_at) = compare(&pa, &pb);
    let first_difference = ihr_at
        .map(|i| ("iHR", i))
        .or(thr_at.map(|i| ("tHR", i)))
        .or(peak_at.map(|i| ("peak", i)));
    DiffReport {
        max_ihr,
        max_thr,
        first_difference,
    }
}

/// Runs both engines on `sig`. `native_ihr_bias` is added to every native
/// iHR value; it exists to check that a disagreement is noticed.
pub fn diff_check(
    tp: &TypedProgram,
    sig: &EcgSignal,
    source: &dyn PeakSource,
    native_ihr_bias: f64,
) -> Result<DiffReport, Error> {
    let a = interp_heart_rate(tp, HR_ENTRY, sig, source)?;
    let mut b = native_heart_rate(sig, source)?;
    if native_ihr_bias != 0.0 {
        for v in &mut b.ihr {
            *v += native_ihr_bias;
        }
    }
    Ok(diff_series(&a, &b))
}
