use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::syntax::{format_rational, parse_rational, Rational, Variable};

/// A finite-support assignment of rationals to variables; unmapped variables are 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct State {
    values: BTreeMap<Variable, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct StateError {
    pub line: usize,
    pub message: String,
}

impl State {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &Variable) -> Rational {
        self.values.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, x: Variable, r: Rational) {
        self.values.insert(x, r);
    }

    /// `self` with `x` mapped to `r`.
    pub fn with(&self, x: &Variable, r: Rational) -> State {
        let mut s = self.clone();
        s.set(x.clone(), r);
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Rational)> {
        self.values.iter()
    }

    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.values.values()
    }

    /// Reads `var = rational` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<State, StateError> {
        let mut state = State::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| StateError { line: i + 1, message };
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("expected `var = value`".into()))?;
            let lhs = lhs.trim();
            let (name, primed) = match lhs.strip_suffix('\'') {
                Some(base) => (base, true),
                None => (lhs, false),
            };
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(err(format!("invalid variable `{lhs}`")));
            }
            let value = parse_rational(rhs).ok_or_else(|| err(format!("invalid rational `{}`", rhs.trim())))?;
            let var = if primed { Variable::primed(name) } else { Variable::new(name) };
            state.set(var, value);
        }
        Ok(state)
    }
}

impl FromIterator<(Variable, Rational)> for State {
    fn from_iter<T: IntoIterator<Item = (Variable, Rational)>>(iter: T) -> Self {
        State { values: iter.into_iter().collect() }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, r) in &self.values {
            writeln!(f, "{x} = {}", format_rational(r).trim_start_matches('(').trim_end_matches(')'))?;
        }
        Ok(())
    }
}
