//! Builtin function mapping and subscript lowering.

mod lowering;
mod registry;

pub use lowering::{lower_index, lower_position, raise_position, Bound, IndexLowering, Selection};
pub use registry::{
    ArgPolicy, BuiltinEntry, EntrySignature, OutputPolicy, Registry, ReturnType, DEFAULT_SIGNATURES,
};

use thiserror::Error;

use crate::analysis::SemType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("no mapping for `{0}`")]
    Miss(String),
    #[error("`{name}` takes {expected:?} arguments, found {found}")]
    Arity {
        name: String,
        expected: Vec<usize>,
        found: usize,
    },
    #[error("signature file line {line}: {message}")]
    Signature { line: usize, message: String },
    #[error("subscript {0} is not positive")]
    NonPositiveIndex(i64),
    #[error("unsupported subscript: {0}")]
    UnsupportedSubscript(String),
    #[error("`{base}` of type {ty} cannot be indexed")]
    NotIndexable { base: String, ty: SemType },
}
