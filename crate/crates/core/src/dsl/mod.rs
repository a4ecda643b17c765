//! Plain-text system files: an INI-like list of sections holding
//! declarations, equations, candidate integrals and solver settings.
//!
//! ```text
//! [algebra]
//! L = 2
//!
//! [superfields]
//! X : even N=1 (x, xi)
//!
//! [equations]
//! dt(X) = X^2
//! ```

mod convert;
mod expr;
mod file;
mod lexer;

use std::fmt;

use thiserror::Error;

pub use convert::{eval_multivector, generator_index, parse_multivector, BuiltSystem, Scope};
pub use expr::{parse_expr, parse_expr_at, At, BinOp, Expr, Func};
pub use file::{
    ConstantDecl, EquationLine, IntegralLine, SettingLine, SolveSection, SuperfieldLine, SystemFile, VariableDecl,
};

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax(String),
    UndeclaredIdentifier(String),
    Parity(String),
    Duplicate(String),
    /// Declarations or expressions that parse but make no sense together.
    Invalid(String),
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ErrorKind::UndeclaredIdentifier(n) => write!(f, "undeclared identifier `{n}`"),
            ErrorKind::Parity(m) => write!(f, "parity error: {m}"),
            ErrorKind::Duplicate(n) => write!(f, "`{n}` declared twice"),
            ErrorKind::Invalid(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct DslError {
    pub pos: Pos,
    pub kind: ErrorKind,
}

impl DslError {
    pub fn new(pos: Pos, kind: ErrorKind) -> Self {
        DslError { pos, kind }
    }

    pub fn invalid(pos: Pos, msg: impl Into<String>) -> Self {
        DslError::new(pos, ErrorKind::Invalid(msg.into()))
    }
}

/// Parse a system file.
pub fn parse_system(text: &str) -> Result<SystemFile, DslError> {
    let file = file::parse(text)?;
    file.check()?;
    Ok(file)
}
