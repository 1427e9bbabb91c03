//! Three-valued evaluator for the executable fragment of the semantics.
//!
//! Loops are unrolled to a bounded depth, quantifiers are searched over a
//! finite witness set and differential equations are not evaluated, so every
//! answer is `True`, `False` or `Unknown`, and a determinate answer is exact.

mod derivative;
mod eval;
mod state;

use std::fmt;

use thiserror::Error;

use crate::syntax::Rational;
use crate::usubst::UniformSubstitution;

pub use derivative::partial_derivative;
pub use eval::{adjoint_eval, adjoint_eval_term, eval_formula, eval_game_win, eval_term};
pub use state::{State, StateError};

/// Interprets symbols by concrete replacements, in the shape of a substitution.
pub type SyntacticInterpretation = UniformSubstitution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruthValue3 {
    True,
    False,
    Unknown,
}

impl TruthValue3 {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue3::True
        } else {
            TruthValue3::False
        }
    }

    pub fn is_determinate(self) -> bool {
        self != TruthValue3::Unknown
    }

    pub fn not(self) -> Self {
        match self {
            TruthValue3::True => TruthValue3::False,
            TruthValue3::False => TruthValue3::True,
            TruthValue3::Unknown => TruthValue3::Unknown,
        }
    }

    pub fn and(self, other: Self) -> Self {
        use TruthValue3::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Unknown,
        }
    }

    pub fn or(self, other: Self) -> Self {
        self.not().and(other.not()).not()
    }
}

impl fmt::Display for TruthValue3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue3::True => "True",
            TruthValue3::False => "False",
            TruthValue3::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub loop_unroll_depth: usize,
    /// Candidate values for quantified variables, besides those in the state.
    pub quantifier_witnesses: Vec<Rational>,
}

impl Default for Budget {
    fn default() -> Self {
        let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
        Budget {
            loop_unroll_depth: 8,
            quantifier_witnesses: vec![r(0, 1), r(1, 1), r(-1, 1), r(2, 1), r(-2, 1), r(1, 2), r(-1, 2)],
        }
    }
}

impl Budget {
    pub fn with_depth(depth: usize) -> Self {
        Budget { loop_unroll_depth: depth, ..Budget::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no interpretation for {0}")]
    Missing(String),
    /// The value exists but lies outside the evaluable fragment.
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("not a polynomial: {0}")]
    NonPolynomial(String),
    #[error("interpretations nest deeper than {0} levels")]
    TooDeep(usize),
}
