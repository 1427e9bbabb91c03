//! Seeded random generators over a small fixed vocabulary.
//!
//! Functions `c/0 f/1 g/2`, predicates `q/0 p/1 r/2`, predicationals `P Q`,
//! games `a b`, variables `x y z v`.

#![allow(dead_code)]

use dgl_core::oracle::{State, SyntacticInterpretation};
use dgl_core::syntax::{CmpOp, Formula, Game, Rational, Term, Variable};
use dgl_core::usubst::UniformSubstitution;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VARS: [&str; 4] = ["x", "y", "z", "v"];

/// Which constructs a generator may produce.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub heads: bool,
    pub vars: bool,
    pub primed: bool,
    pub sugar: bool,
    pub quantifiers: bool,
    pub modalities: bool,
    pub loops: bool,
    pub odes: bool,
    pub differentials: bool,
    /// Dots `.0 .. .(dots-1)` may appear.
    pub dots: usize,
}

impl Shape {
    /// Everything the parser accepts from user input.
    pub fn full() -> Shape {
        Shape {
            heads: true,
            vars: true,
            primed: true,
            sugar: true,
            quantifiers: true,
            modalities: true,
            loops: true,
            odes: true,
            differentials: true,
            dots: 0,
        }
    }

    /// The fragment the oracle decides: no ODEs, no differentials.
    pub fn oracle() -> Shape {
        Shape { odes: false, differentials: false, primed: false, ..Shape::full() }
    }

    /// Oracle fragment without uninterpreted symbols.
    pub fn ground() -> Shape {
        Shape { heads: false, ..Shape::oracle() }
    }

    pub fn with_dots(self, dots: usize) -> Shape {
        Shape { dots, ..self }
    }
}

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub shape: Shape,
    in_loop: bool,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Gen {
    pub fn new(seed: u64, shape: Shape) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), shape, in_loop: false }
    }

    /// Runs `f` with a temporarily different shape.
    pub fn with_shape<T>(&mut self, shape: Shape, f: impl FnOnce(&mut Gen) -> T) -> T {
        let saved = std::mem::replace(&mut self.shape, shape);
        let out = f(self);
        self.shape = saved;
        out
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn number(&mut self) -> Rational {
        let (n, d) = *[(0, 1), (1, 1), (2, 1), (3, 1), (1, 2), (3, 2), (1, 4), (5, 1)].choose(&mut self.rng).unwrap();
        rat(n, d)
    }

    /// State values, negative ones included.
    pub fn value(&mut self) -> Rational {
        let (n, d) = *[(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (1, 2), (-3, 2)].choose(&mut self.rng).unwrap();
        rat(n, d)
    }

    pub fn base_var(&mut self) -> Variable {
        Variable::new(*VARS.choose(&mut self.rng).unwrap())
    }

    pub fn var(&mut self) -> Variable {
        let v = self.base_var();
        if self.shape.primed && self.chance(0.2) {
            v.differential()
        } else {
            v
        }
    }

    pub fn state(&mut self) -> State {
        let mut w = State::new();
        for x in VARS {
            let r = self.value();
            w.set(Variable::new(x), r);
        }
        w
    }

    fn term_leaf(&mut self) -> Term {
        loop {
            match self.rng.gen_range(0..6) {
                0..=2 if self.shape.vars => return Term::Var(self.var()),
                3 => return Term::Number(self.number()),
                4 if self.shape.heads => return Term::Func("c".into(), vec![]),
                5 if self.shape.dots > 0 => return Term::Dot(self.rng.gen_range(0..self.shape.dots)),
                _ => {}
            }
        }
    }

    pub fn term(&mut self, depth: u32) -> Term {
        if depth == 0 || self.chance(0.3) {
            return self.term_leaf();
        }
        let d = depth - 1;
        loop {
            match self.rng.gen_range(0..11) {
                0 | 1 => return Term::plus(self.term(d), self.term(d)),
                2 | 3 => return Term::times(self.term(d), self.term(d)),
                4 if self.shape.sugar => return Term::minus(self.term(d), self.term(d)),
                5 if self.shape.sugar => return Term::neg(self.term(d)),
                6 if self.shape.sugar => {
                    let n = self.rng.gen_range(0..4);
                    return Term::power(self.term(d), n);
                }
                7 if self.shape.heads => return Term::Func("f".into(), vec![self.term(d)]),
                8 if self.shape.heads => return Term::Func("g".into(), vec![self.term(d), self.term(d)]),
                9 if self.shape.differentials => return Term::differential(self.term(d)),
                10 => return self.term_leaf(),
                _ => {}
            }
        }
    }

    fn cmp_op(&mut self) -> CmpOp {
        if self.shape.sugar {
            *[CmpOp::Geq, CmpOp::Leq, CmpOp::Gt, CmpOp::Lt, CmpOp::Eq, CmpOp::Neq].choose(&mut self.rng).unwrap()
        } else {
            CmpOp::Geq
        }
    }

    fn formula_leaf(&mut self, depth: u32) -> Formula {
        let td = depth.min(2);
        loop {
            match self.rng.gen_range(0..12) {
                0 => return if self.chance(0.5) { Formula::True } else { Formula::False },
                1..=5 => {
                    let op = self.cmp_op();
                    return Formula::cmp(op, self.term(td), self.term(td));
                }
                6 | 7 if self.shape.heads => return Formula::Pred("p".into(), vec![self.term(td)]),
                8 if self.shape.heads => return Formula::Pred("q".into(), vec![]),
                9 if self.shape.heads => return Formula::Pred("r".into(), vec![self.term(td), self.term(td)]),
                10 | 11 if self.shape.heads => {
                    let name = if self.chance(0.5) { "P" } else { "Q" };
                    return Formula::Predicational(name.into());
                }
                _ => {}
            }
        }
    }

    pub fn formula(&mut self, depth: u32) -> Formula {
        if depth == 0 || self.chance(0.25) {
            return self.formula_leaf(depth);
        }
        let d = depth - 1;
        loop {
            match self.rng.gen_range(0..13) {
                0 | 1 => return Formula::not(self.formula(d)),
                2 | 3 => return Formula::and(self.formula(d), self.formula(d)),
                4 if self.shape.sugar => return Formula::or(self.formula(d), self.formula(d)),
                5 if self.shape.sugar => return Formula::imply(self.formula(d), self.formula(d)),
                6 if self.shape.sugar => return Formula::equiv(self.formula(d), self.formula(d)),
                7 if self.shape.quantifiers && self.shape.vars => {
                    let x = self.base_var();
                    return Formula::exists(x, self.formula(d));
                }
                8 if self.shape.quantifiers && self.shape.vars && self.shape.sugar => {
                    let x = self.base_var();
                    return Formula::forall(x, self.formula(d));
                }
                9 | 10 if self.shape.modalities && self.shape.vars => {
                    return Formula::diamond(self.game(d.min(2)), self.formula(d));
                }
                11 if self.shape.modalities && self.shape.vars && self.shape.sugar => {
                    return Formula::boxed(self.game(d.min(2)), self.formula(d));
                }
                12 => return self.formula_leaf(depth),
                _ => {}
            }
        }
    }

    fn game_leaf(&mut self, depth: u32) -> Game {
        loop {
            match self.rng.gen_range(0..8) {
                0 | 1 if self.shape.heads => {
                    return Game::symbol(if self.chance(0.5) { "a" } else { "b" });
                }
                2..=4 => {
                    let x = self.var();
                    return Game::assign(x, self.term(1));
                }
                5 | 6 => return Game::test(self.formula(depth.min(1))),
                7 if self.shape.odes => {
                    let x = self.base_var();
                    let rhs = self.term(1);
                    let domain = if self.chance(0.5) { Formula::True } else { self.formula(depth.min(1)) };
                    return Game::ode(x, rhs, domain);
                }
                _ => {}
            }
        }
    }

    pub fn game(&mut self, depth: u32) -> Game {
        if depth == 0 || self.chance(0.3) {
            return self.game_leaf(depth);
        }
        let d = depth - 1;
        loop {
            match self.rng.gen_range(0..8) {
                0 | 1 => return Game::choice(self.game(d), self.game(d)),
                2 | 3 => return Game::seq(self.game(d), self.game(d)),
                4 if self.shape.loops && !self.in_loop => {
                    self.in_loop = true;
                    let body = self.game(d);
                    self.in_loop = false;
                    return Game::repeat(body);
                }
                5 | 6 => return Game::dual(self.game(d)),
                7 => return self.game_leaf(depth),
                _ => {}
            }
        }
    }

    /// A formula without loops or quantifiers, so that the oracle usually decides it.
    pub fn decidable_formula(&mut self, depth: u32) -> Formula {
        let shape = Shape { quantifiers: false, loops: false, ..self.shape };
        self.with_shape(shape, |g| g.formula(depth))
    }

    /// Closes every vocabulary symbol. Function and predicate meanings read
    /// their arguments only, as real functions and relations do.
    pub fn interpretation(&mut self) -> SyntacticInterpretation {
        let closed = Shape { heads: false, vars: false, quantifiers: false, modalities: false, ..Shape::ground() };
        let open = Shape { loops: false, quantifiers: false, ..Shape::ground() };
        let mut i = UniformSubstitution::new();
        let c = self.with_shape(closed, |g| g.term(1));
        i.insert_function("c", 0, c).unwrap();
        let f = self.with_shape(closed.with_dots(1), |g| g.term(2));
        i.insert_function("f", 1, f).unwrap();
        let g2 = self.with_shape(closed.with_dots(2), |g| g.term(2));
        i.insert_function("g", 2, g2).unwrap();
        let q = self.with_shape(closed, |g| g.formula(1));
        i.insert_predicate("q", 0, q).unwrap();
        let p = self.with_shape(closed.with_dots(1), |g| g.formula(2));
        i.insert_predicate("p", 1, p).unwrap();
        let r = self.with_shape(closed.with_dots(2), |g| g.formula(2));
        i.insert_predicate("r", 2, r).unwrap();
        for name in ["P", "Q"] {
            let body = self.with_shape(open, |g| g.formula(2));
            i.insert_predicational(name, body).unwrap();
        }
        for name in ["a", "b"] {
            let body = self.with_shape(open, |g| g.game(2));
            i.insert_game(name, body).unwrap();
        }
        i
    }

    /// A random substitution over a random subset of the vocabulary.
    /// Replacements may themselves use vocabulary symbols.
    pub fn substitution(&mut self) -> UniformSubstitution {
        let base = Shape { loops: false, ..self.shape };
        let mut s = UniformSubstitution::new();
        if self.chance(0.5) {
            let t = self.with_shape(base, |g| g.term(2));
            s.insert_function("c", 0, t).unwrap();
        }
        if self.chance(0.5) {
            let t = self.with_shape(base.with_dots(1), |g| g.term(2));
            s.insert_function("f", 1, t).unwrap();
        }
        if self.chance(0.5) {
            let t = self.with_shape(base.with_dots(2), |g| g.term(2));
            s.insert_function("g", 2, t).unwrap();
        }
        if self.chance(0.5) {
            let f = self.with_shape(base, |g| g.formula(1));
            s.insert_predicate("q", 0, f).unwrap();
        }
        if self.chance(0.5) {
            let f = self.with_shape(base.with_dots(1), |g| g.formula(2));
            s.insert_predicate("p", 1, f).unwrap();
        }
        if self.chance(0.5) {
            let f = self.with_shape(base.with_dots(2), |g| g.formula(2));
            s.insert_predicate("r", 2, f).unwrap();
        }
        for name in ["P", "Q"] {
            if self.chance(0.5) {
                let f = self.with_shape(base, |g| g.formula(2));
                s.insert_predicational(name, f).unwrap();
            }
        }
        for name in ["a", "b"] {
            if self.chance(0.5) {
                let body = self.with_shape(base, |g| g.game(1));
                s.insert_game(name, body).unwrap();
            }
        }
        s
    }
}
