use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("symbol `{symbol}` used with arity {first} and arity {second}")]
    ArityConflict { symbol: String, first: usize, second: usize },
    #[error("variable `{0}` has more than one prime")]
    TooManyPrimes(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: {kind}")]
pub struct ParseError {
    pub position: Position,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(position: Position, kind: ParseErrorKind) -> Self {
        ParseError { position, kind }
    }

    pub(crate) fn syntax(position: Position, msg: impl Into<String>) -> Self {
        ParseError { position, kind: ParseErrorKind::Syntax(msg.into()) }
    }
}
