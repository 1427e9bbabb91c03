//! Abstract syntax, parser and printer for terms, hybrid games and formulas.

mod ast;
mod error;
mod expand;
mod lexer;
pub(crate) mod parser;
mod printer;

pub use ast::{Category, CmpOp, Expression, Formula, Game, Rational, Term, Variable};
pub use error::{ParseError, ParseErrorKind, Position};
pub use lexer::parse_rational;
pub(crate) use lexer::Tok;
pub use parser::{parse, parse_formula, parse_game, parse_term};
pub use printer::format_rational;
