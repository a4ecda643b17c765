//! Graded polynomial arithmetic over even/odd symbols.

mod poly;
mod symbol;

pub use poly::{GradedPoly, Monomial};
pub use symbol::{natural_cmp, Symbol, SymbolKind};

use thiserror::Error;

use crate::grassmann::GrassmannError;
use crate::parity::Parity;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymError {
    #[error("binding for `{symbol}` is not {expected}")]
    ParityMismatch { symbol: String, expected: Parity },
    #[error("`{0}` is not an odd symbol")]
    NotOdd(String),
    #[error("`{0}` is not an even symbol")]
    NotEven(String),
    #[error("no value bound for `{0}`")]
    Unbound(String),
    #[error("`{0}` occurs with a negative power but its value is not invertible")]
    NotInvertible(String),
    #[error(transparent)]
    Algebra(#[from] GrassmannError),
}
