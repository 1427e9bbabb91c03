//! Abstract syntax of terms, hybrid games and formulas.
//!
//! Sugar nodes (`Minus`, `Neg`, `Power`, non-`>=` comparisons, `|`, `->`,
//! `<->`, `\forall`, `[α]`) are kept structurally so that printing
//! round-trips; every kernel operation treats them by their expansion.

use std::fmt;

use num_rational::BigRational;

pub type Rational = BigRational;

/// A state variable `x` or its differential twin `x'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: String,
    pub primed: bool,
}

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable { name: name.into(), primed: false }
    }

    pub fn primed(name: impl Into<String>) -> Self {
        Variable { name: name.into(), primed: true }
    }

    /// The differential twin `x'` of a base variable.
    pub fn differential(&self) -> Self {
        Variable { name: self.name.clone(), primed: true }
    }

    pub fn base(&self) -> Self {
        Variable { name: self.name.clone(), primed: false }
    }

    /// Transposition of `x` and `y` (and of `x'` and `y'`).
    pub fn transpose(&self, x: &str, y: &str) -> Self {
        let name = if self.name == x {
            y.to_string()
        } else if self.name == y {
            x.to_string()
        } else {
            self.name.clone()
        };
        Variable { name, primed: self.primed }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primed {
            write!(f, "{}'", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Variable),
    Number(Rational),
    /// Function symbol application; the arity is the argument count.
    Func(String, Vec<Term>),
    /// Reserved argument placeholder `.i`, only valid inside replacements.
    Dot(usize),
    Plus(Box<Term>, Box<Term>),
    Times(Box<Term>, Box<Term>),
    Differential(Box<Term>),
    Minus(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Power(Box<Term>, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Geq,
    Leq,
    Gt,
    Lt,
    Eq,
    Neq,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Geq => ">=",
            CmpOp::Leq => "<=",
            CmpOp::Gt => ">",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=",
            CmpOp::Neq => "!=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Game {
    Symbol(String),
    Assign(Variable, Term),
    /// `{x'=rhs & domain}`; `var` is always a base variable.
    Ode {
        var: Variable,
        rhs: Term,
        domain: Box<Formula>,
    },
    Test(Box<Formula>),
    Choice(Box<Game>, Box<Game>),
    Seq(Box<Game>, Box<Game>),
    Repeat(Box<Game>),
    Dual(Box<Game>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Cmp(CmpOp, Term, Term),
    Pred(String, Vec<Term>),
    /// Nullary predicational `P(||)`, depending on the whole state.
    Predicational(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imply(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Exists(Variable, Box<Formula>),
    Forall(Variable, Box<Formula>),
    Diamond(Box<Game>, Box<Formula>),
    Box(Box<Game>, Box<Formula>),
}

/// Syntactic category of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Term,
    Game,
    Formula,
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "term" => Ok(Category::Term),
            "game" => Ok(Category::Game),
            "formula" => Ok(Category::Formula),
            other => Err(format!("unknown category `{other}` (expected term, game or formula)")),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Term => "term",
            Category::Game => "game",
            Category::Formula => "formula",
        })
    }
}

/// An expression of any of the three categories.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expression {
    Term(Term),
    Game(Game),
    Formula(Formula),
}

impl Expression {
    pub fn category(&self) -> Category {
        match self {
            Expression::Term(_) => Category::Term,
            Expression::Game(_) => Category::Game,
            Expression::Formula(_) => Category::Formula,
        }
    }
}

impl From<Term> for Expression {
    fn from(t: Term) -> Self {
        Expression::Term(t)
    }
}

impl From<Game> for Expression {
    fn from(g: Game) -> Self {
        Expression::Game(g)
    }
}

impl From<Formula> for Expression {
    fn from(f: Formula) -> Self {
        Expression::Formula(f)
    }
}

// Small constructors used throughout the kernel and the tests.

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Variable::new(name))
    }

    pub fn int(n: i64) -> Term {
        Term::Number(Rational::from_integer(n.into()))
    }

    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Box::new(a), Box::new(b))
    }

    pub fn times(a: Term, b: Term) -> Term {
        Term::Times(Box::new(a), Box::new(b))
    }

    pub fn minus(a: Term, b: Term) -> Term {
        Term::Minus(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Term) -> Term {
        Term::Neg(Box::new(a))
    }

    pub fn power(a: Term, n: u32) -> Term {
        Term::Power(Box::new(a), n)
    }

    pub fn differential(a: Term) -> Term {
        Term::Differential(Box::new(a))
    }
}

impl Formula {
    pub fn cmp(op: CmpOp, a: Term, b: Term) -> Formula {
        Formula::Cmp(op, a, b)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imply(a: Formula, b: Formula) -> Formula {
        Formula::Imply(Box::new(a), Box::new(b))
    }

    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn exists(x: Variable, f: Formula) -> Formula {
        Formula::Exists(x, Box::new(f))
    }

    pub fn forall(x: Variable, f: Formula) -> Formula {
        Formula::Forall(x, Box::new(f))
    }

    pub fn diamond(g: Game, f: Formula) -> Formula {
        Formula::Diamond(Box::new(g), Box::new(f))
    }

    pub fn boxed(g: Game, f: Formula) -> Formula {
        Formula::Box(Box::new(g), Box::new(f))
    }
}

impl Game {
    pub fn symbol(name: &str) -> Game {
        Game::Symbol(name.to_string())
    }

    pub fn assign(x: Variable, t: Term) -> Game {
        Game::Assign(x, t)
    }

    pub fn ode(x: Variable, rhs: Term, domain: Formula) -> Game {
        Game::Ode { var: x, rhs, domain: Box::new(domain) }
    }

    pub fn test(f: Formula) -> Game {
        Game::Test(Box::new(f))
    }

    pub fn choice(a: Game, b: Game) -> Game {
        Game::Choice(Box::new(a), Box::new(b))
    }

    pub fn seq(a: Game, b: Game) -> Game {
        Game::Seq(Box::new(a), Box::new(b))
    }

    pub fn repeat(a: Game) -> Game {
        Game::Repeat(Box::new(a))
    }

    pub fn dual(a: Game) -> Game {
        Game::Dual(Box::new(a))
    }
}
