//! Source programs and reference output shipped with the crate.

/// Heart-rate entry point: detector call, RR intervals, iHR and tHR.
pub const EKG_SOURCE: &str = include_str!("../corpus/ekg_peak_det.m");
/// Expected conversion of [`EKG_SOURCE`], compared token by token.
pub const EKG_GOLDEN: &str = include_str!("../corpus/ekg_peak_det.cpp");
pub const IDENTITY_SOURCE: &str = include_str!("../corpus/identity.m");
pub const MEAN_RR_SOURCE: &str = include_str!("../corpus/mean_rr.m");
pub const RR_STATS_SOURCE: &str = include_str!("../corpus/rr_stats.m");

/// Every shipped program, by file name.
pub const PROGRAMS: [(&str, &str); 4] = [
    ("ekg_peak_det.m", EKG_SOURCE),
    ("identity.m", IDENTITY_SOURCE),
    ("mean_rr.m", MEAN_RR_SOURCE),
    ("rr_stats.m", RR_STATS_SOURCE),
];
