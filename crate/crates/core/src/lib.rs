//! Converts a MATLAB subset into re-targetable C++, runs the same subset in
//! a reference interpreter, and computes heart rate natively from ECG.

pub mod analysis;
pub mod corpus;
pub mod dsp;
pub mod emitter;
pub mod frontend;
pub mod interpreter;
pub mod mapping;
pub mod mathcore;
pub mod pipeline;
pub mod signal;

use thiserror::Error;

use analysis::{AnalysisError, TypedProgram};
use dsp::DspError;
use emitter::EmitError;
use frontend::FrontendError;
use interpreter::RuntimeError;
use mapping::{MappingError, Registry};
use signal::SignalError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// 1 for problems with the input, 2 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Emit(EmitError::Unresolved { .. }) => 2,
            _ => 1,
        }
    }
}

/// Parses and types `source`.
pub fn compile(source: &str, registry: &Registry) -> Result<TypedProgram, Error> {
    let program = frontend::parse_source(source)?;
    Ok(analysis::resolve(&program, registry)?)
}
