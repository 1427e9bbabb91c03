use crate::syntax::{Term, Variable};

use super::EvalError;

/// Symbolic partial derivative of a polynomial term.
pub fn partial_derivative(t: &Term, x: &Variable) -> Result<Term, EvalError> {
    Ok(match t {
        Term::Var(y) => Term::int(if y == x { 1 } else { 0 }),
        Term::Number(_) => Term::int(0),
        Term::Plus(a, b) => Term::plus(partial_derivative(a, x)?, partial_derivative(b, x)?),
        Term::Minus(a, b) => Term::minus(partial_derivative(a, x)?, partial_derivative(b, x)?),
        Term::Neg(a) => Term::neg(partial_derivative(a, x)?),
        Term::Times(a, b) => Term::plus(
            Term::times(partial_derivative(a, x)?, (**b).clone()),
            Term::times((**a).clone(), partial_derivative(b, x)?),
        ),
        Term::Power(_, 0) => Term::int(0),
        Term::Power(a, n) => Term::times(
            Term::times(Term::int(i64::from(*n)), Term::power((**a).clone(), n - 1)),
            partial_derivative(a, x)?,
        ),
        Term::Func(..) | Term::Dot(_) | Term::Differential(_) => {
            return Err(EvalError::NonPolynomial(t.to_string()))
        }
    })
}
