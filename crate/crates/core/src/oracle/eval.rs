use std::cell::Cell;
use std::collections::BTreeSet;
use std::rc::Rc;

use num_traits::{Pow, Zero};

use crate::statics::StaticSemantics;
use crate::syntax::{CmpOp, Formula, Game, Rational, Term};
use crate::usubst::UniformSubstitution;

use super::{partial_derivative, Budget, EvalError, State, SyntacticInterpretation, TruthValue3};

const MAX_NESTING: usize = 256;

/// How symbol heads are read. Under `Adjoint`, heads replaced by `sigma` are
/// reinterpreted by their replacement, with function and predicate
/// replacements read at the `baked` state.
#[derive(Clone, Copy)]
enum Mode<'a> {
    Plain,
    Adjoint { sigma: &'a UniformSubstitution, baked: &'a State },
}

#[derive(Clone)]
struct Ctx<'a> {
    mode: Mode<'a>,
    /// Values of the argument placeholders of the replacement being evaluated.
    dots: Rc<Vec<Rational>>,
}

impl<'a> Ctx<'a> {
    fn plain(dots: Vec<Rational>) -> Self {
        Ctx { mode: Mode::Plain, dots: Rc::new(dots) }
    }

    fn sigma(&self) -> Option<(&'a UniformSubstitution, &'a State)> {
        match self.mode {
            Mode::Plain => None,
            Mode::Adjoint { sigma, baked } => Some((sigma, baked)),
        }
    }
}

/// What Angel still has to achieve after the current game.
enum Cont<'a, 'c> {
    Formula(&'a Formula, Ctx<'a>),
    Then(&'a Game, Ctx<'a>, &'c Cont<'a, 'c>),
    Negate(&'c Cont<'a, 'c>),
    /// The approximant `next | <body> W` with `remaining` further unrollings in `W`.
    Loop { body: &'a Game, ctx: Ctx<'a>, remaining: usize, next: &'c Cont<'a, 'c> },
}

struct Evaluator<'a> {
    interp: &'a SyntacticInterpretation,
    budget: &'a Budget,
    nesting: Cell<usize>,
}

type R<T> = Result<T, EvalError>;

/// Undefined values make a truth value unknown; other errors propagate.
fn defined<T>(r: R<T>) -> R<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(EvalError::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn plug(t: &Term, args: &[Term]) -> Term {
    match t {
        Term::Dot(i) => args.get(*i).cloned().unwrap_or_else(|| t.clone()),
        Term::Var(_) | Term::Number(_) => t.clone(),
        Term::Func(f, xs) => Term::Func(f.clone(), xs.iter().map(|a| plug(a, args)).collect()),
        Term::Plus(a, b) => Term::plus(plug(a, args), plug(b, args)),
        Term::Times(a, b) => Term::times(plug(a, args), plug(b, args)),
        Term::Minus(a, b) => Term::minus(plug(a, args), plug(b, args)),
        Term::Neg(a) => Term::neg(plug(a, args)),
        Term::Power(a, n) => Term::power(plug(a, args), *n),
        Term::Differential(a) => Term::differential(plug(a, args)),
    }
}

fn freeze(t: &Term, state: &State) -> Term {
    match t {
        Term::Var(x) => Term::Number(state.get(x)),
        Term::Dot(_) | Term::Number(_) => t.clone(),
        Term::Func(f, xs) => Term::Func(f.clone(), xs.iter().map(|a| freeze(a, state)).collect()),
        Term::Plus(a, b) => Term::plus(freeze(a, state), freeze(b, state)),
        Term::Times(a, b) => Term::times(freeze(a, state), freeze(b, state)),
        Term::Minus(a, b) => Term::minus(freeze(a, state), freeze(b, state)),
        Term::Neg(a) => Term::neg(freeze(a, state)),
        Term::Power(a, n) => Term::power(freeze(a, state), *n),
        Term::Differential(a) => Term::differential(freeze(a, state)),
    }
}

fn is_plain_polynomial(t: &Term) -> bool {
    match t {
        Term::Var(x) => !x.primed,
        Term::Number(_) => true,
        Term::Plus(a, b) | Term::Times(a, b) | Term::Minus(a, b) => is_plain_polynomial(a) && is_plain_polynomial(b),
        Term::Neg(a) | Term::Power(a, _) => is_plain_polynomial(a),
        Term::Func(..) | Term::Dot(_) | Term::Differential(_) => false,
    }
}

impl<'a> Evaluator<'a> {
    fn new(interp: &'a SyntacticInterpretation, budget: &'a Budget) -> Self {
        Evaluator { interp, budget, nesting: Cell::new(0) }
    }

    fn nested<T>(&self, f: impl FnOnce() -> R<T>) -> R<T> {
        let depth = self.nesting.get();
        if depth >= MAX_NESTING {
            return Err(EvalError::TooDeep(MAX_NESTING));
        }
        self.nesting.set(depth + 1);
        let r = f();
        self.nesting.set(depth);
        r
    }

    fn function(&self, ctx: &Ctx<'a>, name: &str, arity: usize) -> R<(&'a Term, Option<&'a State>)> {
        if let Some((sigma, baked)) = ctx.sigma() {
            if let Some(r) = sigma.function(name, arity) {
                return Ok((r, Some(baked)));
            }
        }
        match self.interp.function(name, arity) {
            Some(r) => Ok((r, None)),
            None => Err(EvalError::Missing(format!("{name}/{arity}"))),
        }
    }

    fn predicate(&self, ctx: &Ctx<'a>, name: &str, arity: usize) -> R<(&'a Formula, Option<&'a State>)> {
        if let Some((sigma, baked)) = ctx.sigma() {
            if let Some(r) = sigma.predicate(name, arity) {
                return Ok((r, Some(baked)));
            }
        }
        match self.interp.predicate(name, arity) {
            Some(r) => Ok((r, None)),
            None => Err(EvalError::Missing(format!("{name}/{arity}"))),
        }
    }

    fn term(&self, ctx: &Ctx<'a>, w: &State, t: &Term) -> R<Rational> {
        Ok(match t {
            Term::Var(x) => w.get(x),
            Term::Number(r) => r.clone(),
            Term::Dot(i) => match ctx.dots.get(*i) {
                Some(r) => r.clone(),
                None => return Err(EvalError::Undefined(format!("unbound placeholder .{i}"))),
            },
            Term::Func(f, args) => {
                let vals = args.iter().map(|a| self.term(ctx, w, a)).collect::<R<Vec<_>>>()?;
                let (r, baked) = self.function(ctx, f, args.len())?;
                self.nested(|| self.term(&Ctx::plain(vals), baked.unwrap_or(w), r))?
            }
            Term::Plus(a, b) => self.term(ctx, w, a)? + self.term(ctx, w, b)?,
            Term::Times(a, b) => self.term(ctx, w, a)? * self.term(ctx, w, b)?,
            Term::Minus(a, b) => self.term(ctx, w, a)? - self.term(ctx, w, b)?,
            Term::Neg(a) => -self.term(ctx, w, a)?,
            Term::Power(a, n) => Pow::pow(self.term(ctx, w, a)?, *n),
            Term::Differential(a) => {
                let inlined = self.inline(ctx, a)?;
                if !is_plain_polynomial(&inlined) {
                    return Err(EvalError::Undefined(format!("differential of ({inlined})")));
                }
                let vars = inlined.free_vars();
                let vars = vars.finite().expect("terms have finitely many free variables");
                let mut sum = Rational::zero();
                for x in vars {
                    let d = partial_derivative(&inlined, x)?;
                    sum += w.get(&x.differential()) * self.term(&Ctx::plain(Vec::new()), w, &d)?;
                }
                sum
            }
        })
    }

    /// Replaces interpreted heads and placeholders in `t` by their definitions.
    fn inline(&self, ctx: &Ctx<'a>, t: &Term) -> R<Term> {
        Ok(match t {
            Term::Var(_) | Term::Number(_) => t.clone(),
            Term::Dot(i) => match ctx.dots.get(*i) {
                Some(r) => Term::Number(r.clone()),
                None => return Err(EvalError::Undefined(format!("unbound placeholder .{i}"))),
            },
            Term::Func(f, args) => {
                let args = args.iter().map(|a| self.inline(ctx, a)).collect::<R<Vec<_>>>()?;
                let (r, baked) = self.function(ctx, f, args.len())?;
                let body = match baked {
                    Some(b) => plug(&freeze(r, b), &args),
                    None => plug(r, &args),
                };
                self.nested(|| self.inline(&Ctx::plain(Vec::new()), &body))?
            }
            Term::Plus(a, b) => Term::plus(self.inline(ctx, a)?, self.inline(ctx, b)?),
            Term::Times(a, b) => Term::times(self.inline(ctx, a)?, self.inline(ctx, b)?),
            Term::Minus(a, b) => Term::minus(self.inline(ctx, a)?, self.inline(ctx, b)?),
            Term::Neg(a) => Term::neg(self.inline(ctx, a)?),
            Term::Power(a, n) => Term::power(self.inline(ctx, a)?, *n),
            Term::Differential(a) => Term::differential(self.inline(ctx, a)?),
        })
    }

    fn witnesses(&self, w: &State) -> BTreeSet<Rational> {
        self.budget.quantifier_witnesses.iter().chain(w.values()).cloned().collect()
    }

    fn formula(&self, ctx: &Ctx<'a>, w: &State, f: &'a Formula) -> R<TruthValue3> {
        use TruthValue3::*;
        Ok(match f {
            Formula::True => True,
            Formula::False => False,
            Formula::Cmp(op, a, b) => {
                let (Some(a), Some(b)) = (defined(self.term(ctx, w, a))?, defined(self.term(ctx, w, b))?) else {
                    return Ok(Unknown);
                };
                TruthValue3::from_bool(match op {
                    CmpOp::Geq => a >= b,
                    CmpOp::Leq => a <= b,
                    CmpOp::Gt => a > b,
                    CmpOp::Lt => a < b,
                    CmpOp::Eq => a == b,
                    CmpOp::Neq => a != b,
                })
            }
            Formula::Pred(p, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match defined(self.term(ctx, w, a))? {
                        Some(v) => vals.push(v),
                        None => return Ok(Unknown),
                    }
                }
                let (r, baked) = self.predicate(ctx, p, args.len())?;
                self.nested(|| self.formula(&Ctx::plain(vals), baked.unwrap_or(w), r))?
            }
            Formula::Predicational(p) => {
                let from_sigma = ctx.sigma().and_then(|(s, _)| s.predicational(p));
                let r = match from_sigma.or_else(|| self.interp.predicational(p)) {
                    Some(r) => r,
                    None => return Err(EvalError::Missing(format!("{p}(||)"))),
                };
                self.nested(|| self.formula(&Ctx::plain(Vec::new()), w, r))?
            }
            Formula::Not(a) => self.formula(ctx, w, a)?.not(),
            Formula::And(a, b) => match self.formula(ctx, w, a)? {
                False => False,
                va => va.and(self.formula(ctx, w, b)?),
            },
            Formula::Or(a, b) => match self.formula(ctx, w, a)? {
                True => True,
                va => va.or(self.formula(ctx, w, b)?),
            },
            Formula::Imply(a, b) => match self.formula(ctx, w, a)? {
                False => True,
                va => va.not().or(self.formula(ctx, w, b)?),
            },
            Formula::Equiv(a, b) => {
                let (va, vb) = (self.formula(ctx, w, a)?, self.formula(ctx, w, b)?);
                va.not().or(vb).and(vb.not().or(va))
            }
            Formula::Exists(x, body) => {
                for r in self.witnesses(w) {
                    if self.formula(ctx, &w.with(x, r), body)? == True {
                        return Ok(True);
                    }
                }
                Unknown
            }
            Formula::Forall(x, body) => {
                for r in self.witnesses(w) {
                    if self.formula(ctx, &w.with(x, r), body)? == False {
                        return Ok(False);
                    }
                }
                Unknown
            }
            Formula::Diamond(g, body) => self.win(ctx, w, g, &Cont::Formula(body, ctx.clone()))?,
            Formula::Box(g, body) => {
                let post = Cont::Formula(body, ctx.clone());
                self.win(ctx, w, g, &Cont::Negate(&post))?.not()
            }
        })
    }

    fn resume(&self, k: &Cont<'a, '_>, w: &State) -> R<TruthValue3> {
        match k {
            Cont::Formula(f, ctx) => self.formula(ctx, w, f),
            Cont::Then(g, ctx, next) => self.win(ctx, w, g, next),
            Cont::Negate(next) => Ok(self.resume(next, w)?.not()),
            Cont::Loop { body, ctx, remaining, next } => {
                let stop = self.resume(next, w)?;
                if stop == TruthValue3::True || *remaining == 0 {
                    return Ok(stop);
                }
                let again = Cont::Loop { body, ctx: ctx.clone(), remaining: remaining - 1, next };
                Ok(stop.or(self.win(ctx, w, body, &again)?))
            }
        }
    }

    fn win(&self, ctx: &Ctx<'a>, w: &State, g: &'a Game, k: &Cont<'a, '_>) -> R<TruthValue3> {
        use TruthValue3::*;
        Ok(match g {
            Game::Symbol(a) => {
                let from_sigma = ctx.sigma().and_then(|(s, _)| s.game(a));
                let r = match from_sigma.or_else(|| self.interp.game(a)) {
                    Some(r) => r,
                    None => return Err(EvalError::Missing(a.clone())),
                };
                self.nested(|| self.win(&Ctx::plain(Vec::new()), w, r, k))?
            }
            Game::Assign(x, t) => match defined(self.term(ctx, w, t))? {
                Some(v) => self.resume(k, &w.with(x, v))?,
                None => Unknown,
            },
            Game::Ode { .. } => Unknown,
            Game::Test(f) => match self.formula(ctx, w, f)? {
                False => False,
                v => v.and(self.resume(k, w)?),
            },
            Game::Choice(a, b) => match self.win(ctx, w, a, k)? {
                True => True,
                v => v.or(self.win(ctx, w, b, k)?),
            },
            Game::Seq(a, b) => self.win(ctx, w, a, &Cont::Then(b, ctx.clone(), k))?,
            Game::Repeat(a) => {
                let approx = Cont::Loop { body: a, ctx: ctx.clone(), remaining: self.budget.loop_unroll_depth, next: k };
                match self.resume(&approx, w)? {
                    True => True,
                    _ => Unknown,
                }
            }
            Game::Dual(a) => self.win(ctx, w, a, &Cont::Negate(k))?.not(),
        })
    }
}

/// Value of `t` at `w`; [`EvalError::Undefined`] outside the evaluable fragment.
pub fn eval_term(interp: &SyntacticInterpretation, w: &State, t: &Term) -> Result<Rational, EvalError> {
    Evaluator::new(interp, &Budget::default()).term(&Ctx::plain(Vec::new()), w, t)
}

pub fn eval_formula(interp: &SyntacticInterpretation, w: &State, f: &Formula, budget: &Budget) -> Result<TruthValue3, EvalError> {
    Evaluator::new(interp, budget).formula(&Ctx::plain(Vec::new()), w, f)
}

/// Whether `w` lies in Angel's winning region of `g` into `post`.
pub fn eval_game_win(
    interp: &SyntacticInterpretation,
    w: &State,
    g: &Game,
    post: &Formula,
    budget: &Budget,
) -> Result<TruthValue3, EvalError> {
    let ctx = Ctx::plain(Vec::new());
    Evaluator::new(interp, budget).win(&ctx, w, g, &Cont::Formula(post, ctx.clone()))
}

/// Value of `f` at `baked` in the adjoint interpretation of `sigma` over `interp`.
pub fn adjoint_eval(
    interp: &SyntacticInterpretation,
    sigma: &UniformSubstitution,
    baked: &State,
    f: &Formula,
    budget: &Budget,
) -> Result<TruthValue3, EvalError> {
    let ctx = Ctx { mode: Mode::Adjoint { sigma, baked }, dots: Rc::new(Vec::new()) };
    Evaluator::new(interp, budget).formula(&ctx, baked, f)
}

pub fn adjoint_eval_term(
    interp: &SyntacticInterpretation,
    sigma: &UniformSubstitution,
    baked: &State,
    t: &Term,
) -> Result<Rational, EvalError> {
    let ctx = Ctx { mode: Mode::Adjoint { sigma, baked }, dots: Rc::new(Vec::new()) };
    Evaluator::new(interp, &Budget::default()).term(&ctx, baked, t)
}
