//! Tokenizer, parser and pretty-printer for the M-subset.

pub mod ast;
mod lexer;
mod parser;
mod pretty;

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind, KEYWORDS};
pub use parser::parse;
pub use pretty::{pretty_print, render, strip_positions};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{line}:{col}: unexpected character `{found}`")]
    Lex {
        line: usize,
        col: usize,
        found: char,
    },
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Parse {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
}

impl FrontendError {
    pub fn line(&self) -> usize {
        match self {
            FrontendError::Lex { line, .. } | FrontendError::Parse { line, .. } => *line,
        }
    }
}

/// Tokenize and parse in one step.
pub fn parse_source(source: &str) -> Result<Program, FrontendError> {
    parse(&tokenize(source)?)
}
