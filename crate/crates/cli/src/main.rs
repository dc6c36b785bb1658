use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use retarget_core::dsp::{parse_schedule, synth_ecg, PtConfig};
use retarget_core::emitter::{port, EmitConfig, EmittedUnit, Emitter};
use retarget_core::interpreter::Interpreter;
use retarget_core::mapping::Registry;
use retarget_core::mathcore::NumValue;
use retarget_core::pipeline::{self, Engine};
use retarget_core::signal::{load_csv, parse_csv, render_csv};
use retarget_core::{compile, corpus, Error};

const REGISTRY_ENV: &str = "RETARGET_REGISTRY";

#[derive(Parser)]
#[command(
    name = "retarget",
    version,
    about = "MATLAB-subset converter and ECG heart-rate tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a source file to C++ and write it with a manifest.
    Transpile {
        src: PathBuf,
        /// Signature file (default: $RETARGET_REGISTRY, then the bundled table).
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Stage an already converted unit for several targets.
    Port {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<String>,
    },
    /// Run a function in the interpreter.
    Run {
        src: PathBuf,
        #[arg(long)]
        entry: String,
        /// Numeric literals or CSV files, one per parameter.
        #[arg(long, num_args = 0..)]
        args: Vec<String>,
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// Heart rate from an ECG CSV as `t_sec,bpm` rows.
    Hr {
        signal: PathBuf,
        #[arg(long)]
        fs: Option<u32>,
        #[arg(long, default_value = "native")]
        engine: Engine,
    },
    /// Generate a synthetic ECG CSV.
    Synth {
        /// `start-end:bpm,...` in seconds.
        #[arg(long)]
        schedule: String,
        #[arg(long)]
        fs: u32,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Standard deviation of added white noise (R amplitude is 1).
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the planted R-peak sample indices here.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Compare interpreter and native heart rate on one signal.
    DiffCheck {
        src: PathBuf,
        signal: PathBuf,
        #[arg(long)]
        fs: Option<u32>,
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb_native_ihr: f64,
    },
}

fn registry(flag: Option<&Path>) -> Result<Registry, Error> {
    let env = std::env::var_os(REGISTRY_ENV).map(PathBuf::from);
    match flag.map(Path::to_path_buf).or(env) {
        Some(path) => Ok(Registry::load(&path)?),
        None => Ok(Registry::builtin_defaults()),
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn arg_value(text: &str) -> Result<NumValue, Error> {
    if let Ok(x) = text.parse::<f64>() {
        return Ok(NumValue::RScalar(x));
    }
    let (samples, _) = parse_csv(&read(Path::new(text))?)?;
    Ok(NumValue::column(samples))
}

/// Returns the process exit status.
fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Transpile {
            src,
            registry: reg,
            out,
        } => {
            let reg = registry(reg.as_deref())?;
            let tp = compile(&read(&src)?, &reg)?;
            let unit = Emitter::new(EmitConfig::default(), reg).emit(&tp)?;
            let path = unit.write_to(&out)?;
            println!("{}", path.display());
        }
        Command::Port { dir, targets } => {
            let unit = EmittedUnit::read_from(&dir)?;
            for (target, path) in port(&unit, &targets, &dir.join("targets"))? {
                println!("{target}\t{}", path.display());
            }
        }
        Command::Run {
            src,
            entry,
            args,
            registry: reg,
        } => {
            let tp = compile(&read(&src)?, &registry(reg.as_deref())?)?;
            let values = args
                .iter()
                .map(|a| arg_value(a))
                .collect::<Result<Vec<_>, _>>()?;
            let detector = PtConfig::default();
            let out = Interpreter::new(&tp, &detector).call(&entry, values)?;
            for (name, v) in out.outputs {
                println!("{name} = {v}");
            }
        }
        Command::Hr { signal, fs, engine } => {
            let sig = load_csv(&signal, fs)?;
            let tp = compile(corpus::EKG_SOURCE, &Registry::builtin_defaults())?;
            let hr = pipeline::heart_rate(engine, &tp, &sig, &PtConfig::default())?;
            print!("{}", pipeline::render_hr_csv(&hr));
        }
        Command::Synth {
            schedule,
            fs,
            out,
            noise,
            seed,
            truth,
        } => {
            let s = synth_ecg(&parse_schedule(&schedule)?, fs, noise, seed)?;
            write(&out, &render_csv(&s.signal))?;
            if let Some(path) = truth {
                let lines: String = s.r_peaks.iter().map(|r| format!("{r}\n")).collect();
                write(&path, &lines)?;
            }
        }
        Command::DiffCheck {
            src,
            signal,
            fs,
            registry: reg,
            perturb_native_ihr,
        } => {
            let tp = compile(&read(&src)?, &registry(reg.as_deref())?)?;
            let sig = load_csv(&signal, fs)?;
            let report = pipeline::diff_check(&tp, &sig, &PtConfig::default(), perturb_native_ihr)?;
            println!("{report}");
            if !report.agrees() {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
