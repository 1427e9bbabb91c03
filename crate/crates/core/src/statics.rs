//! Static semantics: syntactic free/bound variables and signatures.
//!
//! The computed sets are supersets of the smallest sets with the
//! coincidence and bound-effect properties. Game symbols and predicationals
//! read (and game symbols write) the whole state, hence [`VarSet::Top`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Expression, Formula, Game, Term, Variable};

/// A finite set of variables, or all variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarSet {
    Finite(BTreeSet<Variable>),
    Top,
}

impl Default for VarSet {
    fn default() -> Self {
        VarSet::empty()
    }
}

impl VarSet {
    pub fn empty() -> Self {
        VarSet::Finite(BTreeSet::new())
    }

    pub fn singleton(x: Variable) -> Self {
        VarSet::Finite(BTreeSet::from([x]))
    }

    pub fn of(vars: impl IntoIterator<Item = Variable>) -> Self {
        VarSet::Finite(vars.into_iter().collect())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, VarSet::Top)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, VarSet::Finite(s) if s.is_empty())
    }

    pub fn contains(&self, x: &Variable) -> bool {
        match self {
            VarSet::Top => true,
            VarSet::Finite(s) => s.contains(x),
        }
    }

    pub fn insert(&mut self, x: Variable) {
        if let VarSet::Finite(s) = self {
            s.insert(x);
        }
    }

    pub fn union_with(&mut self, other: &VarSet) {
        match (&mut *self, other) {
            (VarSet::Top, _) => {}
            (_, VarSet::Top) => *self = VarSet::Top,
            (VarSet::Finite(a), VarSet::Finite(b)) => a.extend(b.iter().cloned()),
        }
    }

    pub fn union(mut self, other: &VarSet) -> VarSet {
        self.union_with(other);
        self
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        match (self, other) {
            (VarSet::Top, o) | (o, VarSet::Top) => o.clone(),
            (VarSet::Finite(a), VarSet::Finite(b)) => VarSet::Finite(a.intersection(b).cloned().collect()),
        }
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// `self \ {x}`. The cofinite set `Top \ {x}` is approximated by `Top`.
    pub fn without(mut self, x: &Variable) -> VarSet {
        if let VarSet::Finite(s) = &mut self {
            s.remove(x);
        }
        self
    }

    /// `self \ other` where `other` is finite or `self` is finite. A set
    /// difference that would be cofinite is not representable.
    pub fn difference(&self, other: &VarSet) -> VarSet {
        match (self, other) {
            (_, VarSet::Top) => VarSet::empty(),
            (VarSet::Finite(a), VarSet::Finite(b)) => VarSet::Finite(a.difference(b).cloned().collect()),
            (VarSet::Top, VarSet::Finite(_)) => {
                panic!("internal error: cofinite variable set requested (Top minus a finite set)")
            }
        }
    }

    /// The elements of a finite set; `None` for `Top`.
    pub fn finite(&self) -> Option<&BTreeSet<Variable>> {
        match self {
            VarSet::Finite(s) => Some(s),
            VarSet::Top => None,
        }
    }

    /// Some element of the set, if one can be named.
    pub fn first(&self) -> Option<&Variable> {
        self.finite().and_then(|s| s.iter().next())
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarSet::Top => f.write_str("ALL"),
            VarSet::Finite(s) => {
                f.write_str("{")?;
                for (i, x) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Heads of the function, predicate, predicational and game symbols of an
/// expression. `dots` records reserved argument placeholders; it is only
/// populated by [`heads_with_dots`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolSet {
    pub functions: BTreeMap<String, usize>,
    pub predicates: BTreeMap<String, usize>,
    pub predicationals: BTreeSet<String>,
    pub games: BTreeSet<String>,
    pub dots: BTreeSet<usize>,
}

impl SymbolSet {
    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
            && self.predicates.is_empty()
            && self.predicationals.is_empty()
            && self.games.is_empty()
            && self.dots.is_empty()
    }

    pub fn has_function(&self, name: &str, arity: usize) -> bool {
        self.functions.get(name) == Some(&arity)
    }

    pub fn has_predicate(&self, name: &str, arity: usize) -> bool {
        self.predicates.get(name) == Some(&arity)
    }

    pub fn union_with(&mut self, other: &SymbolSet) {
        self.functions.extend(other.functions.iter().map(|(k, v)| (k.clone(), *v)));
        self.predicates.extend(other.predicates.iter().map(|(k, v)| (k.clone(), *v)));
        self.predicationals.extend(other.predicationals.iter().cloned());
        self.games.extend(other.games.iter().cloned());
        self.dots.extend(other.dots.iter().copied());
    }
}

impl fmt::Display for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let arities = |m: &BTreeMap<String, usize>| m.iter().map(|(n, k)| format!("{n}/{k}")).collect::<Vec<_>>();
        if !self.functions.is_empty() {
            parts.push(format!("functions {{{}}}", arities(&self.functions).join(", ")));
        }
        if !self.predicates.is_empty() {
            parts.push(format!("predicates {{{}}}", arities(&self.predicates).join(", ")));
        }
        if !self.predicationals.is_empty() {
            let v: Vec<_> = self.predicationals.iter().cloned().collect();
            parts.push(format!("predicationals {{{}}}", v.join(", ")));
        }
        if !self.games.is_empty() {
            let v: Vec<_> = self.games.iter().cloned().collect();
            parts.push(format!("games {{{}}}", v.join(", ")));
        }
        if parts.is_empty() {
            f.write_str("{}")
        } else {
            f.write_str(&parts.join("; "))
        }
    }
}

/// Syntactic free variables, bound variables and signature.
pub trait StaticSemantics {
    fn free_vars(&self) -> VarSet;
    fn collect_heads(&self, out: &mut HeadCollector);

    /// Symbols occurring in the expression, without argument placeholders.
    fn signature(&self) -> SymbolSet {
        let mut c = HeadCollector::default();
        self.collect_heads(&mut c);
        let mut s = c.into_set();
        s.dots.clear();
        s
    }
}

pub fn free_vars<E: StaticSemantics + ?Sized>(e: &E) -> VarSet {
    e.free_vars()
}

pub fn signature<E: StaticSemantics + ?Sized>(e: &E) -> SymbolSet {
    e.signature()
}

/// Symbols including argument placeholders, as needed for admissibility
/// checks of argument substitutions.
pub fn heads_with_dots<E: StaticSemantics + ?Sized>(e: &E) -> SymbolSet {
    let mut c = HeadCollector::default();
    e.collect_heads(&mut c);
    c.into_set()
}

/// Accumulates heads, remembering the first arity conflict.
#[derive(Default)]
pub struct HeadCollector {
    set: SymbolSet,
    conflict: Option<(String, usize, usize)>,
}

impl HeadCollector {
    fn function(&mut self, name: &str, arity: usize) {
        Self::record(&mut self.set.functions, &mut self.conflict, name, arity);
    }

    fn predicate(&mut self, name: &str, arity: usize) {
        Self::record(&mut self.set.predicates, &mut self.conflict, name, arity);
    }

    fn record(
        map: &mut BTreeMap<String, usize>,
        conflict: &mut Option<(String, usize, usize)>,
        name: &str,
        arity: usize,
    ) {
        match map.get(name) {
            Some(&k) if k != arity => {
                conflict.get_or_insert((name.to_string(), k, arity));
            }
            Some(_) => {}
            None => {
                map.insert(name.to_string(), arity);
            }
        }
    }

    fn into_set(self) -> SymbolSet {
        self.set
    }
}

/// Checks that every symbol is used at one arity only.
pub fn check_arities(e: &Expression) -> Result<(), (String, usize, usize)> {
    let mut c = HeadCollector::default();
    e.collect_heads(&mut c);
    match c.conflict {
        Some(conflict) => Err(conflict),
        None => Ok(()),
    }
}

impl StaticSemantics for Term {
    fn free_vars(&self) -> VarSet {
        match self {
            Term::Var(x) => VarSet::singleton(x.clone()),
            Term::Number(_) | Term::Dot(_) => VarSet::empty(),
            Term::Func(_, args) => args.iter().fold(VarSet::empty(), |acc, a| acc.union(&a.free_vars())),
            Term::Plus(a, b) | Term::Times(a, b) | Term::Minus(a, b) => a.free_vars().union(&b.free_vars()),
            Term::Neg(a) | Term::Power(a, _) => a.free_vars(),
            Term::Differential(a) => {
                let inner = a.free_vars();
                match inner {
                    VarSet::Top => VarSet::Top,
                    VarSet::Finite(s) => {
                        let mut out = s.clone();
                        out.extend(s.iter().filter(|x| !x.primed).map(Variable::differential));
                        VarSet::Finite(out)
                    }
                }
            }
        }
    }

    fn collect_heads(&self, out: &mut HeadCollector) {
        match self {
            Term::Var(_) | Term::Number(_) => {}
            Term::Dot(i) => {
                out.set.dots.insert(*i);
            }
            Term::Func(f, args) => {
                out.function(f, args.len());
                args.iter().for_each(|a| a.collect_heads(out));
            }
            Term::Plus(a, b) | Term::Times(a, b) | Term::Minus(a, b) => {
                a.collect_heads(out);
                b.collect_heads(out);
            }
            Term::Neg(a) | Term::Power(a, _) | Term::Differential(a) => a.collect_heads(out),
        }
    }
}

impl StaticSemantics for Formula {
    fn free_vars(&self) -> VarSet {
        match self {
            Formula::True | Formula::False => VarSet::empty(),
            Formula::Cmp(_, a, b) => a.free_vars().union(&b.free_vars()),
            Formula::Pred(_, args) => args.iter().fold(VarSet::empty(), |acc, a| acc.union(&a.free_vars())),
            Formula::Predicational(_) => VarSet::Top,
            Formula::Not(a) => a.free_vars(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imply(a, b) | Formula::Equiv(a, b) => {
                a.free_vars().union(&b.free_vars())
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => body.free_vars().without(x),
            // No must-bound refinement: the postcondition's variables stay free.
            Formula::Diamond(g, body) | Formula::Box(g, body) => g.free_vars().union(&body.free_vars()),
        }
    }

    fn collect_heads(&self, out: &mut HeadCollector) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Cmp(_, a, b) => {
                a.collect_heads(out);
                b.collect_heads(out);
            }
            Formula::Pred(p, args) => {
                out.predicate(p, args.len());
                args.iter().for_each(|a| a.collect_heads(out));
            }
            Formula::Predicational(p) => {
                out.set.predicationals.insert(p.clone());
            }
            Formula::Not(a) => a.collect_heads(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imply(a, b) | Formula::Equiv(a, b) => {
                a.collect_heads(out);
                b.collect_heads(out);
            }
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.collect_heads(out),
            Formula::Diamond(g, body) | Formula::Box(g, body) => {
                g.collect_heads(out);
                body.collect_heads(out);
            }
        }
    }
}

impl StaticSemantics for Game {
    fn free_vars(&self) -> VarSet {
        match self {
            Game::Symbol(_) => VarSet::Top,
            Game::Assign(_, t) => t.free_vars(),
            Game::Ode { var, rhs, domain } => {
                let mut s = VarSet::singleton(var.clone());
                s.union_with(&rhs.free_vars());
                s.union_with(&domain.free_vars());
                s
            }
            Game::Test(f) => f.free_vars(),
            Game::Choice(a, b) | Game::Seq(a, b) => a.free_vars().union(&b.free_vars()),
            Game::Repeat(a) | Game::Dual(a) => a.free_vars(),
        }
    }

    fn collect_heads(&self, out: &mut HeadCollector) {
        match self {
            Game::Symbol(a) => {
                out.set.games.insert(a.clone());
            }
            Game::Assign(_, t) => t.collect_heads(out),
            Game::Ode { rhs, domain, .. } => {
                rhs.collect_heads(out);
                domain.collect_heads(out);
            }
            Game::Test(f) => f.collect_heads(out),
            Game::Choice(a, b) | Game::Seq(a, b) => {
                a.collect_heads(out);
                b.collect_heads(out);
            }
            Game::Repeat(a) | Game::Dual(a) => a.collect_heads(out),
        }
    }
}

impl StaticSemantics for Expression {
    fn free_vars(&self) -> VarSet {
        match self {
            Expression::Term(t) => t.free_vars(),
            Expression::Game(g) => g.free_vars(),
            Expression::Formula(f) => f.free_vars(),
        }
    }

    fn collect_heads(&self, out: &mut HeadCollector) {
        match self {
            Expression::Term(t) => t.collect_heads(out),
            Expression::Game(g) => g.collect_heads(out),
            Expression::Formula(f) => f.collect_heads(out),
        }
    }
}

/// Variables a game may write.
pub fn bound_vars(game: &Game) -> VarSet {
    match game {
        Game::Symbol(_) => VarSet::Top,
        Game::Assign(x, _) => VarSet::singleton(x.clone()),
        Game::Ode { var, .. } => VarSet::of([var.clone(), var.differential()]),
        Game::Test(_) => VarSet::empty(),
        Game::Choice(a, b) | Game::Seq(a, b) => bound_vars(a).union(&bound_vars(b)),
        Game::Repeat(a) | Game::Dual(a) => bound_vars(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_game, parse_term};

    fn vars(names: &[&str]) -> VarSet {
        VarSet::of(names.iter().map(|n| match n.strip_suffix('\'') {
            Some(b) => Variable::primed(b),
            None => Variable::new(*n),
        }))
    }

    #[test]
    fn ode_free_vars() {
        assert_eq!(parse_game("{x'=v & true}").unwrap().free_vars(), vars(&["x", "v"]));
    }

    #[test]
    fn test_without_variables() {
        assert_eq!(parse_game("?true").unwrap().free_vars(), VarSet::empty());
    }

    #[test]
    fn differential_adds_primed_twins() {
        assert_eq!(parse_term("(x*y)'").unwrap().free_vars(), vars(&["x", "y", "x'", "y'"]));
    }

    #[test]
    fn bound_vars_examples() {
        assert_eq!(bound_vars(&parse_game("{v:=2 ++ v:=x^2+1}^d ; {x'=v}").unwrap()), vars(&["v", "x", "x'"]));
        assert_eq!(bound_vars(&parse_game("?x>0").unwrap()), VarSet::empty());
        assert_eq!(bound_vars(&parse_game("a").unwrap()), VarSet::Top);
    }

    #[test]
    fn game_symbols_and_predicationals_read_everything() {
        assert!(parse_formula("<a> x>0").unwrap().free_vars().is_top());
        assert!(parse_formula("P(||)").unwrap().free_vars().is_top());
        assert!(parse_formula("\\exists x P(||)").unwrap().free_vars().is_top());
    }

    #[test]
    fn quantifier_removes_variable() {
        assert_eq!(parse_formula("\\exists y x+y>=0").unwrap().free_vars(), vars(&["x"]));
    }

    #[test]
    fn signatures() {
        let s = parse_formula("<a;b> P(||)").unwrap().signature();
        assert_eq!(s.games, BTreeSet::from(["a".to_string(), "b".to_string()]));
        assert_eq!(s.predicationals, BTreeSet::from(["P".to_string()]));
        assert!(s.functions.is_empty() && s.predicates.is_empty());

        let s = parse_formula("p(f()+0>=0)");
        assert!(s.is_err(), "a comparison is not a term argument");
        let s = parse_formula("p(f())").unwrap().signature();
        assert_eq!(s.predicates.get("p"), Some(&1));
        assert_eq!(s.functions.get("f"), Some(&0));

        assert!(parse_term("x+y").unwrap().signature().is_empty());
    }

    #[test]
    fn top_laws() {
        let s = vars(&["x"]);
        assert_eq!(VarSet::Top.union(&s), VarSet::Top);
        assert_eq!(VarSet::Top.intersection(&s), s);
        assert_eq!(s.difference(&VarSet::Top), VarSet::empty());
        assert!(!VarSet::Top.is_disjoint(&s));
        assert!(VarSet::Top.is_disjoint(&VarSet::empty()));
        assert_eq!(VarSet::Top.to_string(), "ALL");
        assert_eq!(vars(&["y", "x'", "x"]).to_string(), "{x, x', y}");
    }

    #[test]
    #[should_panic(expected = "cofinite")]
    fn cofinite_difference_is_an_internal_failure() {
        let _ = VarSet::Top.difference(&vars(&["x"]));
    }
}
