//! Uniform substitutions and their admissibility-checked application.
//!
//! Application re-checks admissibility at every binder against the free
//! variables of the substitution restricted to the signature of the
//! argument in scope. Taboos of modalities, sequences and loops are the bound
//! variables of the already substituted game.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::statics::{bound_vars, heads_with_dots, StaticSemantics, SymbolSet, VarSet};
use crate::syntax::parser::Parser;
use crate::syntax::{Expression, Formula, Game, ParseError, Term, Tok, Variable};

/// A violated admissibility condition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clash: replacement for {head} has free variable {} in the scope of {position} (taboo {taboo})", variable_text(.variable))]
pub struct ClashError {
    /// The head whose replacement introduces the variable, e.g. `p/1`.
    pub head: String,
    pub taboo: VarSet,
    /// `None` when both the taboo and the free variables are all variables.
    pub variable: Option<Variable>,
    /// The binder at which the check failed, e.g. `\exists y`.
    pub position: String,
}

fn variable_text(v: &Option<Variable>) -> String {
    match v {
        Some(v) => v.to_string(),
        None => "(any)".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("duplicate substitution entry for {0}")]
    Duplicate(String),
    #[error("replacement for {head} uses placeholder .{index}, but the head has arity {arity}")]
    DotIndex { head: String, index: usize, arity: usize },
    #[error("replacement for {0} must not contain argument placeholders")]
    UnexpectedDot(String),
}

/// A finite mapping from symbol heads to replacements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniformSubstitution {
    functions: BTreeMap<(String, usize), Term>,
    predicates: BTreeMap<(String, usize), Formula>,
    predicationals: BTreeMap<String, Formula>,
    games: BTreeMap<String, Game>,
    /// Argument placeholders, only used for the nested substitution that
    /// plugs arguments into a function or predicate replacement.
    dots: BTreeMap<usize, Term>,
}

fn check_dots(head: &str, arity: usize, e: &dyn StaticSemantics) -> Result<(), SubstError> {
    match heads_with_dots(e).dots.into_iter().find(|&i| i >= arity) {
        Some(index) => Err(SubstError::DotIndex { head: head.to_string(), index, arity }),
        None => Ok(()),
    }
}

impl UniformSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
            && self.predicates.is_empty()
            && self.predicationals.is_empty()
            && self.games.is_empty()
            && self.dots.is_empty()
    }

    pub fn insert_function(&mut self, name: &str, arity: usize, replacement: Term) -> Result<(), SubstError> {
        let head = format!("{name}/{arity}");
        check_dots(&head, arity, &replacement)?;
        if self.functions.contains_key(&(name.to_string(), arity)) || self.names_head(name) {
            return Err(SubstError::Duplicate(head));
        }
        self.functions.insert((name.to_string(), arity), replacement);
        Ok(())
    }

    pub fn insert_predicate(&mut self, name: &str, arity: usize, replacement: Formula) -> Result<(), SubstError> {
        let head = format!("{name}/{arity}");
        check_dots(&head, arity, &replacement)?;
        if self.names_head(name) {
            return Err(SubstError::Duplicate(head));
        }
        self.predicates.insert((name.to_string(), arity), replacement);
        Ok(())
    }

    pub fn insert_predicational(&mut self, name: &str, replacement: Formula) -> Result<(), SubstError> {
        let head = format!("{name}(||)");
        if !heads_with_dots(&replacement).dots.is_empty() {
            return Err(SubstError::UnexpectedDot(head));
        }
        if self.predicationals.contains_key(name) {
            return Err(SubstError::Duplicate(head));
        }
        self.predicationals.insert(name.to_string(), replacement);
        Ok(())
    }

    pub fn insert_game(&mut self, name: &str, replacement: Game) -> Result<(), SubstError> {
        if !heads_with_dots(&replacement).dots.is_empty() {
            return Err(SubstError::UnexpectedDot(name.to_string()));
        }
        if self.games.contains_key(name) {
            return Err(SubstError::Duplicate(name.to_string()));
        }
        self.games.insert(name.to_string(), replacement);
        Ok(())
    }

    fn names_head(&self, name: &str) -> bool {
        self.functions.keys().any(|(n, _)| n == name) || self.predicates.keys().any(|(n, _)| n == name)
    }

    pub fn function(&self, name: &str, arity: usize) -> Option<&Term> {
        self.functions.get(&(name.to_string(), arity))
    }

    pub fn predicate(&self, name: &str, arity: usize) -> Option<&Formula> {
        self.predicates.get(&(name.to_string(), arity))
    }

    pub fn predicational(&self, name: &str) -> Option<&Formula> {
        self.predicationals.get(name)
    }

    pub fn game(&self, name: &str) -> Option<&Game> {
        self.games.get(name)
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize, &Term)> {
        self.functions.iter().map(|((n, k), t)| (n.as_str(), *k, t))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize, &Formula)> {
        self.predicates.iter().map(|((n, k), f)| (n.as_str(), *k, f))
    }

    pub fn predicationals(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.predicationals.iter().map(|(n, f)| (n.as_str(), f))
    }

    pub fn games(&self) -> impl Iterator<Item = (&str, &Game)> {
        self.games.iter().map(|(n, g)| (n.as_str(), g))
    }

    /// Every head this substitution replaces.
    pub fn heads(&self) -> SymbolSet {
        let mut s = SymbolSet::default();
        s.functions.extend(self.functions.keys().cloned());
        s.predicates.extend(self.predicates.keys().cloned());
        s.predicationals.extend(self.predicationals.keys().cloned());
        s.games.extend(self.games.keys().cloned());
        s.dots.extend(self.dots.keys().copied());
        s
    }

    fn dot_substitution(args: Vec<Term>) -> UniformSubstitution {
        UniformSubstitution { dots: args.into_iter().enumerate().collect(), ..Default::default() }
    }

    /// FV(σ) restricted to the heads in `restrict`: free variables of function,
    /// predicate and placeholder replacements only.
    pub fn free_vars(&self, restrict: &SymbolSet) -> VarSet {
        self.contributions(restrict).into_iter().fold(VarSet::empty(), |acc, (_, fv)| acc.union(&fv))
    }

    fn contributions(&self, restrict: &SymbolSet) -> Vec<(String, VarSet)> {
        let mut out = Vec::new();
        for ((name, k), t) in &self.functions {
            if restrict.has_function(name, *k) {
                out.push((format!("{name}/{k}"), t.free_vars()));
            }
        }
        for ((name, k), f) in &self.predicates {
            if restrict.has_predicate(name, *k) {
                out.push((format!("{name}/{k}"), f.free_vars()));
            }
        }
        for (i, t) in &self.dots {
            if restrict.dots.contains(i) {
                let head = if *i == 0 { ".".to_string() } else { format!(".{i}") };
                out.push((head, t.free_vars()));
            }
        }
        out
    }

    /// Checks that σ is `taboo`-admissible for an argument with the given heads.
    fn admissible(&self, taboo: &VarSet, heads: &SymbolSet, position: impl FnOnce() -> String) -> Result<(), ClashError> {
        for (head, fv) in self.contributions(heads) {
            let hit = fv.intersection(taboo);
            if !hit.is_empty() {
                return Err(ClashError { head, taboo: taboo.clone(), variable: hit.first().cloned(), position: position() });
            }
        }
        Ok(())
    }

    pub fn apply_term(&self, t: &Term) -> Result<Term, ClashError> {
        Ok(match t {
            Term::Var(_) | Term::Number(_) => t.clone(),
            Term::Dot(i) => self.dots.get(i).cloned().unwrap_or_else(|| t.clone()),
            Term::Func(f, args) => {
                let args = args.iter().map(|a| self.apply_term(a)).collect::<Result<Vec<_>, _>>()?;
                match self.function(f, args.len()) {
                    Some(r) => Self::dot_substitution(args).apply_term(r)?,
                    None => Term::Func(f.clone(), args),
                }
            }
            Term::Plus(a, b) => Term::plus(self.apply_term(a)?, self.apply_term(b)?),
            Term::Times(a, b) => Term::times(self.apply_term(a)?, self.apply_term(b)?),
            Term::Minus(a, b) => Term::minus(self.apply_term(a)?, self.apply_term(b)?),
            Term::Neg(a) => Term::neg(self.apply_term(a)?),
            Term::Power(a, n) => Term::power(self.apply_term(a)?, *n),
            Term::Differential(a) => {
                let inner = self.apply_term(a)?;
                self.admissible(&VarSet::Top, &heads_with_dots(&**a), || format!("differential ({a})'"))?;
                Term::differential(inner)
            }
        })
    }

    pub fn apply_formula(&self, f: &Formula) -> Result<Formula, ClashError> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Cmp(op, a, b) => Formula::cmp(*op, self.apply_term(a)?, self.apply_term(b)?),
            Formula::Pred(p, args) => {
                let args = args.iter().map(|a| self.apply_term(a)).collect::<Result<Vec<_>, _>>()?;
                match self.predicate(p, args.len()) {
                    Some(r) => Self::dot_substitution(args).apply_formula(r)?,
                    None => Formula::Pred(p.clone(), args),
                }
            }
            Formula::Predicational(p) => self.predicational(p).cloned().unwrap_or_else(|| f.clone()),
            Formula::Not(a) => Formula::not(self.apply_formula(a)?),
            Formula::And(a, b) => Formula::and(self.apply_formula(a)?, self.apply_formula(b)?),
            Formula::Or(a, b) => Formula::or(self.apply_formula(a)?, self.apply_formula(b)?),
            Formula::Imply(a, b) => Formula::imply(self.apply_formula(a)?, self.apply_formula(b)?),
            Formula::Equiv(a, b) => Formula::equiv(self.apply_formula(a)?, self.apply_formula(b)?),
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                let inner = self.apply_formula(body)?;
                let exists = matches!(f, Formula::Exists(..));
                self.admissible(&VarSet::singleton(x.clone()), &heads_with_dots(&**body), || {
                    format!("{} {x}", if exists { "\\exists" } else { "\\forall" })
                })?;
                if exists {
                    Formula::exists(x.clone(), inner)
                } else {
                    Formula::forall(x.clone(), inner)
                }
            }
            Formula::Diamond(g, body) | Formula::Box(g, body) => {
                let game = self.apply_game(g)?;
                let inner = self.apply_formula(body)?;
                let diamond = matches!(f, Formula::Diamond(..));
                self.admissible(&bound_vars(&game), &heads_with_dots(&**body), || {
                    if diamond {
                        format!("<{game}>")
                    } else {
                        format!("[{game}]")
                    }
                })?;
                if diamond {
                    Formula::diamond(game, inner)
                } else {
                    Formula::boxed(game, inner)
                }
            }
        })
    }

    pub fn apply_game(&self, g: &Game) -> Result<Game, ClashError> {
        Ok(match g {
            Game::Symbol(a) => self.game(a).cloned().unwrap_or_else(|| g.clone()),
            Game::Assign(x, t) => Game::assign(x.clone(), self.apply_term(t)?),
            Game::Ode { var, rhs, domain } => {
                let new_rhs = self.apply_term(rhs)?;
                let new_domain = self.apply_formula(domain)?;
                let mut heads = heads_with_dots(rhs);
                heads.union_with(&heads_with_dots(&**domain));
                let taboo = VarSet::of([var.clone(), var.differential()]);
                self.admissible(&taboo, &heads, || format!("{g}"))?;
                Game::ode(var.clone(), new_rhs, new_domain)
            }
            Game::Test(f) => Game::test(self.apply_formula(f)?),
            Game::Choice(a, b) => Game::choice(self.apply_game(a)?, self.apply_game(b)?),
            Game::Seq(a, b) => {
                let first = self.apply_game(a)?;
                let second = self.apply_game(b)?;
                self.admissible(&bound_vars(&first), &heads_with_dots(&**b), || format!("{first}; .."))?;
                Game::seq(first, second)
            }
            Game::Repeat(a) => {
                let body = self.apply_game(a)?;
                self.admissible(&bound_vars(&body), &heads_with_dots(&**a), || format!("{{{body}}}*"))?;
                Game::repeat(body)
            }
            Game::Dual(a) => Game::dual(self.apply_game(a)?),
        })
    }

    pub fn apply(&self, e: &Expression) -> Result<Expression, ClashError> {
        Ok(match e {
            Expression::Term(t) => Expression::Term(self.apply_term(t)?),
            Expression::Game(g) => Expression::Game(self.apply_game(g)?),
            Expression::Formula(f) => Expression::Formula(self.apply_formula(f)?),
        })
    }
}

/// FV(σ) restricted to `restrict`.
pub fn subst_free_vars(sigma: &UniformSubstitution, restrict: &SymbolSet) -> VarSet {
    sigma.free_vars(restrict)
}

fn dot_list(arity: usize) -> String {
    match arity {
        0 => String::new(),
        1 => ".".to_string(),
        k => (0..k).map(|i| format!(".{i}")).collect::<Vec<_>>().join(","),
    }
}

impl fmt::Display for UniformSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut entries = Vec::new();
        for ((n, k), t) in &self.functions {
            entries.push(format!("{n}({}) ~> {t}", dot_list(*k)));
        }
        for ((n, k), p) in &self.predicates {
            entries.push(format!("{n}({}) ~> {p}", dot_list(*k)));
        }
        for (n, p) in &self.predicationals {
            entries.push(format!("{n}(||) ~> {p}"));
        }
        for (n, g) in &self.games {
            entries.push(format!("{n} ~> {g}"));
        }
        write!(f, "{{{}}}", entries.join(" ;; "))
    }
}

/// Parses `{ entry ;; ... }`. A function/predicate head whose replacement
/// reads both as a term and as a formula (e.g. `h(.) ~> g(.)`) is taken as a
/// predicate if `hint` declares it one, and as a function otherwise.
pub fn parse_substitution(text: &str, hint: Option<&SymbolSet>) -> Result<UniformSubstitution, SubstError> {
    let mut p = Parser::new(text, true)?;
    let mut sigma = UniformSubstitution::new();
    p.expect_token(Tok::LBrace)?;
    if !p.at(&Tok::RBrace) {
        loop {
            entry(&mut p, &mut sigma, hint)?;
            if !matches!(p.peek_token(0), Tok::SemiSemi) {
                break;
            }
            p.next_token();
        }
    }
    p.expect_token(Tok::RBrace)?;
    p.finish()?;
    Ok(sigma)
}

fn at_entry_end(p: &Parser) -> bool {
    matches!(p.peek_token(0), Tok::SemiSemi | Tok::RBrace)
}

fn entry(p: &mut Parser, sigma: &mut UniformSubstitution, hint: Option<&SymbolSet>) -> Result<(), SubstError> {
    let pos = p.position();
    let name = match p.next_token() {
        Tok::Ident(n) => n,
        other => return Err(ParseError::syntax(pos, format!("expected substitution head, found {}", other.describe())).into()),
    };
    match p.peek_token(0).clone() {
        Tok::Bars => {
            p.next_token();
            p.expect_token(Tok::Squiggle)?;
            let f = p.formula().map_err(|e| p.best_error(e))?;
            check_entry_arities(&Expression::Formula(f.clone()), pos)?;
            sigma.insert_predicational(&name, f)
        }
        Tok::LParen => {
            p.next_token();
            let arity = head_arguments(p)?;
            p.expect_token(Tok::Squiggle)?;
            let prefer_predicate = hint.is_some_and(|h| h.has_predicate(&name, arity));
            let start = p.save();
            let as_term = if prefer_predicate {
                None
            } else {
                match p.term() {
                    Ok(t) if at_entry_end(p) => Some(t),
                    _ => {
                        p.restore(start);
                        None
                    }
                }
            };
            match as_term {
                Some(t) => {
                    check_entry_arities(&Expression::Term(t.clone()), pos)?;
                    sigma.insert_function(&name, arity, t)
                }
                None => {
                    let f = p.formula().map_err(|e| p.best_error(e))?;
                    check_entry_arities(&Expression::Formula(f.clone()), pos)?;
                    sigma.insert_predicate(&name, arity, f)
                }
            }
        }
        Tok::Squiggle => {
            p.next_token();
            let g = p.game().map_err(|e| p.best_error(e))?;
            check_entry_arities(&Expression::Game(g.clone()), pos)?;
            sigma.insert_game(&name, g)
        }
        other => Err(ParseError::syntax(p.position(), format!("expected `(`, `(||)` or `~>`, found {}", other.describe())).into()),
    }
}

/// Reads `.0,.1,...)` (or `)` or `.)`) and returns the arity.
fn head_arguments(p: &mut Parser) -> Result<usize, ParseError> {
    let mut arity = 0;
    if p.at(&Tok::RParen) {
        p.next_token();
        return Ok(0);
    }
    loop {
        let pos = p.position();
        match p.next_token() {
            Tok::Dot(i) if i == arity => arity += 1,
            other => {
                return Err(ParseError::syntax(pos, format!("expected placeholder .{arity}, found {}", other.describe())))
            }
        }
        match p.next_token() {
            Tok::Comma => continue,
            Tok::RParen => return Ok(arity),
            other => return Err(ParseError::syntax(p.position(), format!("expected `,` or `)`, found {}", other.describe()))),
        }
    }
}

fn check_entry_arities(e: &Expression, pos: crate::syntax::Position) -> Result<(), ParseError> {
    crate::statics::check_arities(e).map_err(|(symbol, first, second)| {
        ParseError::new(pos, crate::syntax::ParseErrorKind::ArityConflict { symbol, first, second })
    })
}

/// Transposes `x` with `y` and `x'` with `y'` everywhere.
pub trait Rename: Sized {
    fn rename(&self, x: &Variable, y: &Variable) -> Self;
}

fn swap(v: &Variable, x: &Variable, y: &Variable) -> Variable {
    v.transpose(&x.name, &y.name)
}

impl Rename for Term {
    fn rename(&self, x: &Variable, y: &Variable) -> Term {
        match self {
            Term::Var(v) => Term::Var(swap(v, x, y)),
            Term::Number(_) | Term::Dot(_) => self.clone(),
            Term::Func(f, args) => Term::Func(f.clone(), args.iter().map(|a| a.rename(x, y)).collect()),
            Term::Plus(a, b) => Term::plus(a.rename(x, y), b.rename(x, y)),
            Term::Times(a, b) => Term::times(a.rename(x, y), b.rename(x, y)),
            Term::Minus(a, b) => Term::minus(a.rename(x, y), b.rename(x, y)),
            Term::Neg(a) => Term::neg(a.rename(x, y)),
            Term::Power(a, n) => Term::power(a.rename(x, y), *n),
            Term::Differential(a) => Term::differential(a.rename(x, y)),
        }
    }
}

impl Rename for Formula {
    fn rename(&self, x: &Variable, y: &Variable) -> Formula {
        let r = |f: &Formula| f.rename(x, y);
        match self {
            Formula::True | Formula::False | Formula::Predicational(_) => self.clone(),
            Formula::Cmp(op, a, b) => Formula::cmp(*op, a.rename(x, y), b.rename(x, y)),
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| a.rename(x, y)).collect()),
            Formula::Not(a) => Formula::not(r(a)),
            Formula::And(a, b) => Formula::and(r(a), r(b)),
            Formula::Or(a, b) => Formula::or(r(a), r(b)),
            Formula::Imply(a, b) => Formula::imply(r(a), r(b)),
            Formula::Equiv(a, b) => Formula::equiv(r(a), r(b)),
            Formula::Exists(v, body) => Formula::exists(swap(v, x, y), r(body)),
            Formula::Forall(v, body) => Formula::forall(swap(v, x, y), r(body)),
            Formula::Diamond(g, body) => Formula::diamond(g.rename(x, y), r(body)),
            Formula::Box(g, body) => Formula::boxed(g.rename(x, y), r(body)),
        }
    }
}

impl Rename for Game {
    fn rename(&self, x: &Variable, y: &Variable) -> Game {
        match self {
            Game::Symbol(_) => self.clone(),
            Game::Assign(v, t) => Game::assign(swap(v, x, y), t.rename(x, y)),
            Game::Ode { var, rhs, domain } => Game::ode(swap(var, x, y), rhs.rename(x, y), domain.rename(x, y)),
            Game::Test(f) => Game::test(f.rename(x, y)),
            Game::Choice(a, b) => Game::choice(a.rename(x, y), b.rename(x, y)),
            Game::Seq(a, b) => Game::seq(a.rename(x, y), b.rename(x, y)),
            Game::Repeat(a) => Game::repeat(a.rename(x, y)),
            Game::Dual(a) => Game::dual(a.rename(x, y)),
        }
    }
}

impl Rename for Expression {
    fn rename(&self, x: &Variable, y: &Variable) -> Expression {
        match self {
            Expression::Term(t) => Expression::Term(t.rename(x, y)),
            Expression::Game(g) => Expression::Game(g.rename(x, y)),
            Expression::Formula(f) => Expression::Formula(f.rename(x, y)),
        }
    }
}

/// Uniform renaming of base variables `x` and `y` (and their differentials).
pub fn uniform_rename<E: Rename>(x: &Variable, y: &Variable, e: &E) -> E {
    e.rename(x, y)
}
