//! Sugar expansion into the core grammar (`+ * ' >= ! & \exists <>`).
//!
//! Double negations produced by the expansion are cancelled, so that e.g.
//! `\forall x !p(x)` and `!\exists x p(x)` expand to the same formula.

use super::ast::{CmpOp, Formula, Game, Rational, Term};

fn minus_one() -> Term {
    Term::Number(Rational::from_integer((-1).into()))
}

impl Term {
    pub fn expanded(&self) -> Term {
        match self {
            Term::Var(_) | Term::Number(_) | Term::Dot(_) => self.clone(),
            Term::Func(f, args) => Term::Func(f.clone(), args.iter().map(Term::expanded).collect()),
            Term::Plus(a, b) => Term::plus(a.expanded(), b.expanded()),
            Term::Times(a, b) => Term::times(a.expanded(), b.expanded()),
            Term::Differential(a) => Term::differential(a.expanded()),
            Term::Minus(a, b) => Term::plus(a.expanded(), Term::times(minus_one(), b.expanded())),
            Term::Neg(a) => Term::times(minus_one(), a.expanded()),
            Term::Power(a, n) => {
                let base = a.expanded();
                match n {
                    0 => Term::int(1),
                    _ => (1..*n).fold(base.clone(), |acc, _| Term::times(acc, base.clone())),
                }
            }
        }
    }
}

/// `!f`, cancelling a leading negation of an already expanded `f`.
fn negate(f: Formula) -> Formula {
    match f {
        Formula::Not(inner) => *inner,
        other => Formula::not(other),
    }
}

fn geq(a: Term, b: Term) -> Formula {
    Formula::cmp(CmpOp::Geq, a, b)
}

fn and(a: Formula, b: Formula) -> Formula {
    Formula::and(a, b)
}

fn or(a: Formula, b: Formula) -> Formula {
    negate(and(negate(a), negate(b)))
}

fn imply(a: Formula, b: Formula) -> Formula {
    negate(and(a, negate(b)))
}

impl Formula {
    pub fn expanded(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Predicational(_) => self.clone(),
            Formula::Cmp(op, a, b) => {
                let (a, b) = (a.expanded(), b.expanded());
                match op {
                    CmpOp::Geq => geq(a, b),
                    CmpOp::Leq => geq(b, a),
                    CmpOp::Gt => negate(geq(b, a)),
                    CmpOp::Lt => negate(geq(a, b)),
                    CmpOp::Eq => and(geq(a.clone(), b.clone()), geq(b, a)),
                    CmpOp::Neq => negate(and(geq(a.clone(), b.clone()), geq(b, a))),
                }
            }
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(Term::expanded).collect()),
            Formula::Not(a) => negate(a.expanded()),
            Formula::And(a, b) => and(a.expanded(), b.expanded()),
            Formula::Or(a, b) => or(a.expanded(), b.expanded()),
            Formula::Imply(a, b) => imply(a.expanded(), b.expanded()),
            Formula::Equiv(a, b) => {
                let (a, b) = (a.expanded(), b.expanded());
                and(imply(a.clone(), b.clone()), imply(b, a))
            }
            Formula::Exists(x, body) => Formula::exists(x.clone(), body.expanded()),
            Formula::Forall(x, body) => negate(Formula::exists(x.clone(), negate(body.expanded()))),
            Formula::Diamond(g, body) => Formula::diamond(g.expanded(), body.expanded()),
            Formula::Box(g, body) => negate(Formula::diamond(g.expanded(), negate(body.expanded()))),
        }
    }
}

impl Game {
    pub fn expanded(&self) -> Game {
        match self {
            Game::Symbol(_) => self.clone(),
            Game::Assign(x, t) => Game::Assign(x.clone(), t.expanded()),
            Game::Ode { var, rhs, domain } => Game::ode(var.clone(), rhs.expanded(), domain.expanded()),
            Game::Test(f) => Game::test(f.expanded()),
            Game::Choice(a, b) => Game::choice(a.expanded(), b.expanded()),
            Game::Seq(a, b) => Game::seq(a.expanded(), b.expanded()),
            Game::Repeat(a) => Game::repeat(a.expanded()),
            Game::Dual(a) => Game::dual(a.expanded()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_formula;

    #[test]
    fn box_is_dual_of_diamond() {
        let boxed = parse_formula("[a] P(||)").unwrap().expanded();
        let dual = parse_formula("!<a> !P(||)").unwrap().expanded();
        assert_eq!(boxed, dual);
    }

    #[test]
    fn forall_of_negation_cancels() {
        let a = parse_formula("\\forall t !(t>=0)").unwrap().expanded();
        let b = parse_formula("!\\exists t t>=0").unwrap().expanded();
        assert_eq!(a, b);
    }

    #[test]
    fn comparisons_reduce_to_geq() {
        let a = parse_formula("x>0").unwrap().expanded();
        let b = parse_formula("!(0>=x)").unwrap().expanded();
        assert_eq!(a, b);
    }
}
