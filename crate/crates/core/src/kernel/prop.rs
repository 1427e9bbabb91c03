//! Propositional consequence by truth tables over abstracted atoms.

use std::collections::HashMap;

use thiserror::Error;

use crate::syntax::Formula;

pub const MAX_ATOMS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{atoms} propositional atoms exceed the limit of {MAX_ATOMS}")]
pub struct PropOverflow {
    pub atoms: usize,
}

enum Prop {
    Const(bool),
    Atom(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn eval(&self, row: u32) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Atom(i) => row >> i & 1 == 1,
            Prop::Not(a) => !a.eval(row),
            Prop::And(a, b) => a.eval(row) && b.eval(row),
        }
    }
}

#[derive(Default)]
struct Atoms {
    index: HashMap<Formula, usize>,
}

impl Atoms {
    /// Abstracts an expanded formula: everything except `true`, `false`, `!`
    /// and `&` is an atom.
    fn abstract_expanded(&mut self, f: Formula) -> Prop {
        match f {
            Formula::True => Prop::Const(true),
            Formula::False => Prop::Const(false),
            Formula::Not(a) => Prop::Not(Box::new(self.abstract_expanded(*a))),
            Formula::And(a, b) => {
                let a = self.abstract_expanded(*a);
                Prop::And(Box::new(a), Box::new(self.abstract_expanded(*b)))
            }
            atom => {
                let next = self.index.len();
                Prop::Atom(*self.index.entry(atom).or_insert(next))
            }
        }
    }
}

/// Whether `hyps` propositionally entail `goal`, with modalities,
/// quantified formulas, comparisons and predicate applications as atoms
/// compared structurally after sugar expansion.
pub fn prop_tautology(goal: &Formula, hyps: &[Formula]) -> Result<bool, PropOverflow> {
    let mut atoms = Atoms::default();
    let hyps: Vec<Prop> = hyps.iter().map(|h| atoms.abstract_expanded(h.expanded())).collect();
    let goal = atoms.abstract_expanded(goal.expanded());
    let n = atoms.index.len();
    if n > MAX_ATOMS {
        return Err(PropOverflow { atoms: n });
    }
    Ok((0..1u32 << n).all(|row| !hyps.iter().all(|h| h.eval(row)) || goal.eval(row)))
}
