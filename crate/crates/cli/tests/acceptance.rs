//! Acceptance suite. One line per criterion; nonzero exit if any fails.

// `ensure!(x >= bound)` must also fail on NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use retarget_core::dsp::{
    match_peaks, pan_tompkin, parse_schedule, synth_ecg, EcgSignal, FixedPeaks, PtConfig,
};
use retarget_core::emitter::{port, target_tokens, EmitConfig, Emitter, KNOWN_TARGETS};
use retarget_core::interpreter::Interpreter;
use retarget_core::mapping::{lower_position, raise_position, Registry};
use retarget_core::mathcore::{self, ArithOp, NumValue, SpanSel};
use retarget_core::pipeline::{interp_heart_rate, native_heart_rate, HR_ENTRY};
use retarget_core::{compile, corpus};

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "golden transpilation",
            budget: Some(Duration::from_secs(1)),
            check: golden_transpilation,
        },
        Criterion {
            name: "O(1) conversion",
            budget: Some(Duration::from_secs(1)),
            check: constant_conversion,
        },
        Criterion {
            name: "engine agreement on synthetic fixtures",
            budget: Some(Duration::from_secs(60)),
            check: engine_agreement,
        },
        Criterion {
            name: "heart-rate formula micro-oracles",
            budget: None,
            check: micro_oracles,
        },
        Criterion {
            name: "detector sensitivity, predictivity and refractory",
            budget: Some(Duration::from_secs(30)),
            check: detector_properties,
        },
        Criterion {
            name: "invariant suites (10000 cases each)",
            budget: Some(Duration::from_secs(30)),
            check: invariant_suites,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let t0 = Instant::now();
        let outcome = (c.check)();
        let took = t0.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if took > b => Err(format!("took {took:.2?}, budget {b:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("[PASS] {} ({took:.2?}) {detail}", c.name),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} ({took:.2?}) {why}", c.name);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn retarget(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retarget"))
        .args(args)
        .env_remove("RETARGET_REGISTRY")
        .output()
        .expect("binary runs")
}

fn ok(o: &Output, what: &str) -> Result<String, String> {
    if o.status.code() == Some(0) {
        Ok(String::from_utf8_lossy(&o.stdout).into_owned())
    } else {
        Err(format!(
            "{what}: exit {:?}: {}{}",
            o.status.code(),
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        ))
    }
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

fn tempdir() -> Result<tempfile::TempDir, String> {
    tempfile::tempdir().map_err(|e| e.to_string())
}

fn golden_transpilation() -> Outcome {
    let dir = tempdir()?;
    let src = dir.path().join("ekg_peak_det.m");
    std::fs::write(&src, corpus::EKG_SOURCE).map_err(|e| e.to_string())?;
    let out = dir.path().join("out");
    ok(
        &retarget(&["transpile", p(&src), "-o", p(&out)]),
        "transpile",
    )?;
    let text = std::fs::read_to_string(out.join("ekgpeakdet.cpp")).map_err(|e| e.to_string())?;
    let (got, want) = (target_tokens(&text), target_tokens(corpus::EKG_GOLDEN));
    if let Some(i) = (0..got.len().max(want.len())).find(|&i| got.get(i) != want.get(i)) {
        return Err(format!(
            "token {i}: got {:?}, want {:?}",
            got.get(i),
            want.get(i)
        ));
    }
    Ok(format!("{} tokens identical", got.len()))
}

fn constant_conversion() -> Outcome {
    let reg = Registry::builtin_defaults();
    let tp = compile(corpus::EKG_SOURCE, &reg).map_err(|e| e.to_string())?;
    let dir = tempdir()?;
    let targets: Vec<String> = KNOWN_TARGETS.iter().map(|t| t.to_string()).collect();
    for n in [1usize, 2, 6] {
        let em = Emitter::new(EmitConfig::default(), reg.clone());
        let unit = em.emit(&tp).map_err(|e| e.to_string())?;
        let staged = port(&unit, &targets[..n], &dir.path().join(format!("lib{n}")))
            .map_err(|e| e.to_string())?;
        ensure!(
            em.invocations() == 1,
            "{n} targets: {} emitter invocations",
            em.invocations()
        );
        ensure!(staged.len() == n, "{n} targets: {} staged", staged.len());
        for (t, path) in &staged {
            let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
            ensure!(
                bytes == unit.source_text.as_bytes(),
                "{n} targets: {t} differs"
            );
        }
    }

    // The same through the binary: one transpile, then port reads the
    // single converted unit for every list size.
    let src = dir.path().join("ekg.m");
    std::fs::write(&src, corpus::EKG_SOURCE).map_err(|e| e.to_string())?;
    let unit_dir = dir.path().join("unit");
    ok(
        &retarget(&["transpile", p(&src), "-o", p(&unit_dir)]),
        "transpile",
    )?;
    let reference = std::fs::read(unit_dir.join("ekgpeakdet.cpp")).map_err(|e| e.to_string())?;
    let manifest = std::fs::read_to_string(unit_dir.join("MANIFEST")).map_err(|e| e.to_string())?;
    for n in [1usize, 2, 6] {
        let _ = std::fs::remove_dir_all(unit_dir.join("targets"));
        ok(
            &retarget(&["port", p(&unit_dir), "--targets", &targets[..n].join(",")]),
            "port",
        )?;
        for t in &targets[..n] {
            let staged = unit_dir.join("targets").join(t);
            let bytes = std::fs::read(staged.join("ekgpeakdet.cpp")).map_err(|e| e.to_string())?;
            ensure!(bytes == reference, "cli {n} targets: {t} differs");
            let m = std::fs::read_to_string(staged.join("MANIFEST")).map_err(|e| e.to_string())?;
            ensure!(m == manifest, "cli {n} targets: {t} manifest differs");
        }
    }
    ensure!(manifest.contains("conversions=1"), "manifest: {manifest}");
    Ok("1/2/6 targets, 1 emit each, artifacts byte-identical".into())
}

struct Fixture {
    schedule: String,
    fs: u32,
    noise: f64,
}

fn fixtures() -> Vec<Fixture> {
    let bpms = [40, 55, 70, 85, 100, 120, 140, 160, 180];
    let noises = [0.0, 0.01, 0.025, 0.05];
    let mut out = Vec::new();
    for (k, fs) in [200u32, 360, 500].into_iter().enumerate() {
        for (j, bpm) in bpms.iter().enumerate() {
            out.push(Fixture {
                schedule: format!("0-30:{bpm}"),
                fs,
                noise: noises[(j + k) % noises.len()],
            });
        }
    }
    out.push(Fixture {
        schedule: "0-40:50,40-80:150".into(),
        fs: 500,
        noise: 0.05,
    });
    out
}

const TWO_PHASE: &str = "0-120:70,120-210:120";

fn engine_agreement() -> Outcome {
    let dir = tempdir()?;
    let src = dir.path().join("ekg.m");
    std::fs::write(&src, corpus::EKG_SOURCE).map_err(|e| e.to_string())?;
    let mut all = fixtures();
    all.push(Fixture {
        schedule: TWO_PHASE.into(),
        fs: 360,
        noise: 0.02,
    });
    let mut two_phase_rows = String::new();
    for (i, f) in all.iter().enumerate() {
        let label = format!("{} @ {} Hz, noise {}", f.schedule, f.fs, f.noise);
        let csv = dir.path().join(format!("f{i}.csv"));
        let (fs, noise, seed) = (f.fs.to_string(), f.noise.to_string(), (i + 1).to_string());
        ok(
            &retarget(&[
                "synth",
                "--schedule",
                &f.schedule,
                "--fs",
                &fs,
                "--noise",
                &noise,
                "--seed",
                &seed,
                "-o",
                p(&csv),
            ]),
            &label,
        )?;
        let report = ok(&retarget(&["diff-check", p(&src), p(&csv)]), &label)?;
        ensure!(
            report.trim() == "max|ΔiHR|=0, max|ΔtHR|=0",
            "{label}: report {report:?}"
        );
        let interp = ok(&retarget(&["hr", p(&csv), "--engine", "interp"]), &label)?;
        let native = ok(&retarget(&["hr", p(&csv), "--engine", "native"]), &label)?;
        ensure!(
            interp == native,
            "{label}: hr output differs between engines"
        );
        ensure!(
            native.lines().count() > 10,
            "{label}: only {} hr rows",
            native.lines().count()
        );
        if f.schedule == TWO_PHASE {
            two_phase_rows = native;
        }
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for line in two_phase_rows.lines().skip(1) {
        let (t, bpm) = line.split_once(',').ok_or("bad hr row")?;
        let (t, bpm): (f64, f64) = (
            t.parse().map_err(|_| "bad t")?,
            bpm.parse().map_err(|_| "bad bpm")?,
        );
        if t < 120.0 {
            a.push(bpm)
        } else {
            b.push(bpm)
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (m1, m2) = (mean(&a), mean(&b));
    ensure!(
        m2 > m1,
        "two-phase: phase 2 mean {m2} not above phase 1 mean {m1}"
    );
    Ok(format!(
        "{} fixtures exact; two-phase means {m1:.1} -> {m2:.1} bpm",
        all.len()
    ))
}

fn bits_eq(got: &[f64], want: &[f64]) -> bool {
    got.len() == want.len()
        && got
            .iter()
            .zip(want)
            .all(|(a, b)| a.to_bits() == b.to_bits())
}

fn micro_oracles() -> Outcome {
    let tp =
        compile(corpus::EKG_SOURCE, &Registry::builtin_defaults()).map_err(|e| e.to_string())?;
    let sig = EcgSignal::new(vec![0.0; 500], 100).map_err(|e| e.to_string())?;
    // (1-based peaks seen by the source program, iHR, tHR)
    let cases: [(&[usize], &[f64], &[f64]); 2] = [
        (&[100, 200, 300], &[60.0, 60.0], &[1.5, 2.5]),
        (&[150], &[30.0], &[]),
    ];
    for (peaks, ihr, thr) in cases {
        // The interpreter's detector intrinsic adds 1 to what the source returns.
        let zero_based = FixedPeaks(peaks.iter().map(|p| p - 1).collect());
        let out = Interpreter::new(&tp, &zero_based)
            .call(
                HR_ENTRY,
                vec![
                    NumValue::column(sig.samples.clone()),
                    NumValue::RScalar(100.0),
                ],
            )
            .map_err(|e| e.to_string())?;
        let get = |n: &str| out.get(n).map(NumValue::to_reals).unwrap_or_default();
        ensure!(
            bits_eq(&get("iHR"), ihr),
            "interp {peaks:?}: iHR {:?}",
            get("iHR")
        );
        ensure!(
            bits_eq(&get("tHR"), thr),
            "interp {peaks:?}: tHR {:?}",
            get("tHR")
        );

        // Native sees the same numbers as its own 0-based positions.
        let native =
            native_heart_rate(&sig, &FixedPeaks(peaks.to_vec())).map_err(|e| e.to_string())?;
        ensure!(
            bits_eq(&native.ihr, ihr),
            "native {peaks:?}: iHR {:?}",
            native.ihr
        );
        ensure!(
            bits_eq(&native.thr, thr),
            "native {peaks:?}: tHR {:?}",
            native.thr
        );

        // Same physical samples through both engines after normalization.
        let a = interp_heart_rate(&tp, HR_ENTRY, &sig, &zero_based).map_err(|e| e.to_string())?;
        let b = native_heart_rate(&sig, &zero_based).map_err(|e| e.to_string())?;
        ensure!(
            bits_eq(&a.ihr, &b.ihr) && bits_eq(&a.thr, &b.thr),
            "{peaks:?}: normalized engines differ"
        );
    }
    Ok("3 peaks -> [60,60]/[1.5,2.5], 1 peak -> [30]/[]".into())
}

fn detector_properties() -> Outcome {
    let cfg = PtConfig::default();
    let mut worst_se = 1.0f64;
    let mut worst_pp = 1.0f64;
    let mut count = 0;
    let mut schedules: Vec<(String, u32)> = Vec::new();
    for fs in [200u32, 360, 500] {
        for bpm in [40, 55, 70, 85, 100, 120, 140, 160, 180] {
            schedules.push((format!("0-30:{bpm}"), fs));
        }
    }
    schedules.push((TWO_PHASE.into(), 360));
    for (schedule, fs) in schedules {
        let segs = parse_schedule(&schedule).map_err(|e| e.to_string())?;
        let s = synth_ecg(&segs, fs, 0.0, 7).map_err(|e| e.to_string())?;
        let det = pan_tompkin(&s.signal, &cfg).map_err(|e| e.to_string())?;
        let n = s.signal.samples.len();
        let refractory = (0.2 * fs as f64).round() as usize;
        for w in det.peak_indices.windows(2) {
            ensure!(
                w[1] > w[0] && w[1] - w[0] >= refractory,
                "{schedule} @ {fs}: peaks {} and {} closer than {refractory}",
                w[0],
                w[1]
            );
        }
        ensure!(
            det.peak_indices.iter().all(|&i| i < n),
            "{schedule} @ {fs}: peak out of bounds"
        );
        let tol = (0.05 * fs as f64).round() as usize;
        let m = match_peaks(&s.r_peaks, &det.peak_indices, tol);
        let (se, pp) = (m.sensitivity(), m.positive_predictivity());
        ensure!(
            se >= 0.95 && pp >= 0.95,
            "{schedule} @ {fs}: Se {se:.3}, +P {pp:.3}"
        );
        worst_se = worst_se.min(se);
        worst_pp = worst_pp.min(pp);
        count += 1;
    }
    Ok(format!(
        "{count} fixtures, worst Se {worst_se:.3}, worst +P {worst_pp:.3}"
    ))
}

fn runner() -> TestRunner {
    let config = Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn suite<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner()
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn span_within(len: usize) -> BoxedStrategy<SpanSel> {
    (0..=len)
        .prop_flat_map(move |lo| {
            if lo == len {
                Just(SpanSel::empty()).boxed()
            } else {
                (lo..len).prop_map(move |hi| SpanSel::new(lo, hi)).boxed()
            }
        })
        .boxed()
}

fn invariant_suites() -> Outcome {
    suite(
        "telescoping",
        prop::collection::vec((-1_000_000i64..1_000_000).prop_map(|x| x as f64), 2..64),
        |v| {
            let d = mathcore::diff(&NumValue::RVec(v.clone()));
            prop_assert_eq!(mathcore::sum(&d), v[v.len() - 1] - v[0]);
            prop_assert_eq!(mathcore::length(&d), v.len() - 1);
            Ok(())
        },
    )?;
    suite(
        "broadcast",
        (
            -1e6f64..1e6,
            prop::collection::vec(-1e6f64..1e6, 0..32),
            prop_oneof![
                Just(ArithOp::Add),
                Just(ArithOp::Sub),
                Just(ArithOp::Mul),
                Just(ArithOp::Div)
            ],
        ),
        |(s, v, op)| {
            let vv = NumValue::RVec(v.clone());
            let a = mathcore::ew(op, &NumValue::RScalar(s), &vv)
                .unwrap()
                .to_reals();
            let b = mathcore::ew(op, &NumValue::RVec(vec![s; v.len()]), &vv)
                .unwrap()
                .to_reals();
            prop_assert!(a.len() == b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
            }
            Ok(())
        },
    )?;
    suite(
        "slice composition",
        prop::collection::vec(-1e3f64..1e3, 0..40)
            .prop_flat_map(|v| {
                let n = v.len();
                (Just(v), span_within(n))
            })
            .prop_flat_map(|(v, s1)| {
                let m = s1.len();
                (Just(v), Just(s1), span_within(m))
            }),
        |(v, s1, s2)| {
            let vv = NumValue::RVec(v);
            let twice = mathcore::slice(&mathcore::slice(&vv, s1).unwrap(), s2).unwrap();
            let once = mathcore::slice(&vv, s1.compose(s2)).unwrap();
            prop_assert_eq!(twice.to_reals(), once.to_reals());
            Ok(())
        },
    )?;
    suite(
        "index bijectivity",
        (1usize..100_000).prop_flat_map(|n| (Just(n), 1..=n)),
        |(n, i)| {
            let lowered = lower_position(i).unwrap();
            prop_assert!(lowered < n);
            prop_assert_eq!(lowered, i - 1);
            prop_assert_eq!(raise_position(lowered), i);
            Ok(())
        },
    )?;
    Ok("telescoping, broadcast, slice composition, index bijectivity: 0 failures".into())
}
