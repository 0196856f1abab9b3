use thiserror::Error;

use crate::expr::{EvalError, ParseError, ScopeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Scope(#[from] ScopeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("singular matrix at {point:?} (relative determinant {relative_det:e})")]
    Singular { point: Vec<f64>, relative_det: f64 },
    #[error("signature at {point:?} is ({negative}, {positive}) with {zero} zero eigenvalues; declared ({declared_negative}, {declared_positive})")]
    Signature {
        point: Vec<f64>,
        negative: usize,
        zero: usize,
        positive: usize,
        declared_negative: usize,
        declared_positive: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("1-form is not closed at {point:?}: |dΨ| = {residual:e}")]
    NotClosed { point: Vec<f64>, residual: f64 },
    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
