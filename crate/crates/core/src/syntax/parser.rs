//! Recursive-descent parser for the ASCII expression grammar.
//!
//! Precedence, loosest first:
//! formulas `<->` (left), `->` (right), `|`, `&`, prefix literals;
//! games `++`, `;`, postfix `*` / `^d`;
//! terms `+ -`, `*`, unary `-`, postfix `^n` / `'`.
//!
//! A parenthesised literal or an application `p(..)` is first tried as a
//! comparison between terms and only then as a formula, so `(x+1)>=0` and
//! `(x>0 & y>0)` both parse.

use num_traits::{Signed, ToPrimitive};

use super::ast::{CmpOp, Category, Expression, Formula, Game, Term, Variable};
use super::error::{ParseError, ParseErrorKind, Position};
use super::lexer::{tokenize, Spanned, Tok};
use crate::statics::check_arities;

type PResult<T> = Result<T, ParseError>;

pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    allow_dots: bool,
    furthest: Option<ParseError>,
    /// Tokens at or after this index read as end of input.
    limit: usize,
}

static EOF: Tok = Tok::Eof;

const KEYWORDS: &[&str] = &["true", "false"];

impl Parser {
    pub(crate) fn new(text: &str, allow_dots: bool) -> PResult<Self> {
        let toks = tokenize(text)?;
        let limit = toks.len() - 1;
        Ok(Parser { toks, pos: 0, allow_dots, furthest: None, limit })
    }

    fn peek(&self) -> &Tok {
        self.peek_at(0)
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = self.pos + k;
        if i >= self.limit {
            &EOF
        } else {
            &self.toks[i].0
        }
    }

    fn here(&self) -> Position {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        if self.pos < self.limit {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {}", tok.describe())))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        ParseError::syntax(self.here(), format!("{what}, found {}", self.peek().describe()))
    }

    fn record(&mut self, err: ParseError) -> ParseError {
        let keep = match &self.furthest {
            Some(f) => err.position > f.position,
            None => true,
        };
        if keep {
            self.furthest = Some(err.clone());
        }
        err
    }

    /// Runs `f`, rewinding on failure.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let saved = self.pos;
        match f(self) {
            Ok(v) => Some(v),
            Err(e) => {
                self.record(e);
                self.pos = saved;
                None
            }
        }
    }

    /// The failure reported when every alternative failed: the one that got furthest.
    pub(crate) fn best_error(&mut self, err: ParseError) -> ParseError {
        let err = self.record(err);
        match &self.furthest {
            Some(f) if f.position > err.position => f.clone(),
            _ => err,
        }
    }

    pub(crate) fn finish(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            let err = self.unexpected("expected end of input");
            Err(self.best_error(err))
        }
    }

    pub(crate) fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    pub(crate) fn position(&self) -> Position {
        self.here()
    }

    pub(crate) fn save(&self) -> usize {
        self.pos
    }

    pub(crate) fn restore(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub(crate) fn next_token(&mut self) -> Tok {
        self.bump()
    }

    pub(crate) fn peek_token(&self, k: usize) -> &Tok {
        self.peek_at(k)
    }

    pub(crate) fn expect_token(&mut self, tok: Tok) -> PResult<()> {
        self.expect(tok)
    }

    // ---- terms ----

    pub(crate) fn term(&mut self) -> PResult<Term> {
        let mut t = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    t = Term::plus(t, self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    t = Term::minus(t, self.product()?);
                }
                _ => return Ok(t),
            }
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut t = self.unary()?;
        // A `*` not followed by an operand belongs to an enclosing game (`x:=y*`).
        while self.at(&Tok::Star)
            && matches!(self.peek_at(1), Tok::Num(_) | Tok::Ident(_) | Tok::Dot(_) | Tok::LParen | Tok::Minus)
        {
            self.bump();
            t = Term::times(t, self.unary()?);
        }
        Ok(t)
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.eat(&Tok::Minus) {
            return Ok(Term::neg(self.unary()?));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Term> {
        let mut t = self.atom()?;
        if self.at(&Tok::Caret) {
            match self.peek_at(1).clone() {
                Tok::Num(n) => {
                    let exp = if n.is_integer() && !n.is_negative() { n.to_integer().to_u32() } else { None };
                    match exp {
                        Some(e) => {
                            self.bump();
                            self.bump();
                            t = Term::power(t, e);
                        }
                        None => {
                            self.bump();
                            return Err(ParseError::syntax(self.here(), "exponent must be a natural number"));
                        }
                    }
                }
                Tok::Ident(ref d) if d == "d" => {}
                _ => {
                    self.bump();
                    return Err(self.unexpected("expected natural-number exponent"));
                }
            }
        }
        if self.eat(&Tok::Prime) {
            t = Term::differential(t);
            if self.at(&Tok::Prime) {
                return Err(ParseError::new(self.here(), ParseErrorKind::TooManyPrimes(format!("{t}"))));
            }
        }
        Ok(t)
    }

    fn atom(&mut self) -> PResult<Term> {
        let pos = self.here();
        match self.bump() {
            Tok::Num(n) => Ok(Term::Number(n)),
            Tok::Dot(i) => {
                if self.allow_dots {
                    Ok(Term::Dot(i))
                } else {
                    Err(ParseError::syntax(pos, "argument placeholder `.` is only allowed in substitution replacements"))
                }
            }
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) => {
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(ParseError::syntax(pos, format!("keyword `{name}` is not a term")));
                }
                match self.peek() {
                    Tok::LParen => {
                        self.bump();
                        let args = self.arguments()?;
                        Ok(Term::Func(name, args))
                    }
                    Tok::Bars => Err(ParseError::syntax(pos, format!("predicational `{name}(||)` is not a term"))),
                    _ => Ok(Term::Var(self.variable_suffix(name, pos)?)),
                }
            }
            other => Err(ParseError::syntax(pos, format!("expected term, found {}", other.describe()))),
        }
    }

    /// Arguments after an already consumed `(`.
    fn arguments(&mut self) -> PResult<Vec<Term>> {
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(Tok::RParen)?;
            return Ok(args);
        }
    }

    fn variable_suffix(&mut self, name: String, pos: Position) -> PResult<Variable> {
        if self.eat(&Tok::Prime) {
            if self.at(&Tok::Prime) {
                return Err(ParseError::new(pos, ParseErrorKind::TooManyPrimes(name)));
            }
            Ok(Variable::primed(name))
        } else {
            Ok(Variable::new(name))
        }
    }

    fn base_variable(&mut self) -> PResult<Variable> {
        let pos = self.here();
        match self.bump() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                if self.at(&Tok::Prime) {
                    return Err(ParseError::syntax(pos, "quantified variable must not be primed"));
                }
                Ok(Variable::new(name))
            }
            other => Err(ParseError::syntax(pos, format!("expected variable, found {}", other.describe()))),
        }
    }

    // ---- formulas ----

    pub(crate) fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.implication()?;
        while self.eat(&Tok::DArrow) {
            f = Formula::equiv(f, self.implication()?);
        }
        Ok(f)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let f = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            return Ok(Formula::imply(f, self.implication()?));
        }
        Ok(f)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.literal()?;
        while self.eat(&Tok::Amp) {
            f = Formula::and(f, self.literal()?);
        }
        Ok(f)
    }

    fn literal(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.literal()?))
            }
            Tok::Exists => {
                self.bump();
                let x = self.base_variable()?;
                Ok(Formula::exists(x, self.literal()?))
            }
            Tok::Forall => {
                self.bump();
                let x = self.base_variable()?;
                Ok(Formula::forall(x, self.literal()?))
            }
            Tok::Lt => {
                self.bump();
                let g = self.diamond_game()?;
                Ok(Formula::diamond(g, self.literal()?))
            }
            Tok::LBracket => {
                self.bump();
                let g = self.game()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::boxed(g, self.literal()?))
            }
            Tok::Ident(name) if name == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) if matches!(self.peek_at(1), Tok::Bars) => {
                self.bump();
                self.bump();
                Ok(Formula::Predicational(name))
            }
            tok => {
                if let Some(f) = self.attempt(|p| p.comparison()) {
                    return Ok(f);
                }
                let res = match tok {
                    Tok::Ident(name) if matches!(self.peek_at(1), Tok::LParen) => self.predicate_application(name),
                    Tok::LParen => self.parenthesised_formula(),
                    _ => Err(self.unexpected("expected formula")),
                };
                res.map_err(|e| self.best_error(e))
            }
        }
    }

    /// The game of `<g>` and its closing `>`. A `>` inside a test could also
    /// be a comparison, so every candidate closing bracket is tried in order
    /// and the first one that ends a complete game wins.
    fn diamond_game(&mut self) -> PResult<Game> {
        let start = self.pos;
        let outer = self.limit;
        let mut depth = 0usize;
        let mut err = None;
        for j in start..outer {
            match &self.toks[j].0 {
                Tok::LParen | Tok::LBrace | Tok::LBracket => depth += 1,
                Tok::RParen | Tok::RBrace | Tok::RBracket => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                Tok::Gt if depth == 0 => {
                    self.limit = j;
                    let res = self.game().and_then(|g| match self.peek() {
                        Tok::Eof => Ok(g),
                        _ => Err(self.unexpected("expected `>`")),
                    });
                    self.limit = outer;
                    match res {
                        Ok(g) => {
                            self.pos = j + 1;
                            return Ok(g);
                        }
                        Err(e) => {
                            self.record(e.clone());
                            err = Some(e);
                            self.pos = start;
                        }
                    }
                }
                _ => {}
            }
        }
        let e = match err {
            Some(e) => e,
            None => {
                self.game()?;
                self.unexpected("expected `>`")
            }
        };
        Err(self.best_error(e))
    }

    fn predicate_application(&mut self, name: String) -> PResult<Formula> {
        self.bump();
        self.bump();
        let args = self.arguments()?;
        Ok(Formula::Pred(name, args))
    }

    fn parenthesised_formula(&mut self) -> PResult<Formula> {
        self.bump();
        let f = self.formula()?;
        self.expect(Tok::RParen)?;
        Ok(f)
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let lhs = self.term()?;
        let op = match self.peek() {
            Tok::Ge => CmpOp::Geq,
            Tok::Le => CmpOp::Leq,
            Tok::Gt => CmpOp::Gt,
            Tok::Lt => CmpOp::Lt,
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Neq,
            _ => return Err(self.unexpected("expected comparison operator")),
        };
        self.bump();
        let rhs = self.term()?;
        Ok(Formula::cmp(op, lhs, rhs))
    }

    // ---- games ----

    pub(crate) fn game(&mut self) -> PResult<Game> {
        let mut g = self.sequence()?;
        while self.eat(&Tok::PlusPlus) {
            g = Game::choice(g, self.sequence()?);
        }
        Ok(g)
    }

    fn sequence(&mut self) -> PResult<Game> {
        let mut g = self.game_postfix()?;
        while self.eat(&Tok::Semi) {
            g = Game::seq(g, self.game_postfix()?);
        }
        Ok(g)
    }

    fn game_postfix(&mut self) -> PResult<Game> {
        let mut g = self.game_atom()?;
        loop {
            if self.eat(&Tok::Star) {
                g = Game::repeat(g);
            } else if self.at(&Tok::Caret) && matches!(self.peek_at(1), Tok::Ident(d) if d == "d") {
                self.bump();
                self.bump();
                g = Game::dual(g);
            } else {
                return Ok(g);
            }
        }
    }

    fn game_atom(&mut self) -> PResult<Game> {
        let pos = self.here();
        match self.peek().clone() {
            Tok::Ident(name) => {
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(ParseError::syntax(pos, format!("keyword `{name}` is not a game")));
                }
                self.bump();
                if self.eat(&Tok::ColonEq) {
                    return Ok(Game::assign(Variable::new(name), self.term()?));
                }
                if self.at(&Tok::Prime) {
                    let x = self.variable_suffix(name, pos)?;
                    self.expect(Tok::ColonEq)?;
                    return Ok(Game::assign(x, self.term()?));
                }
                Ok(Game::Symbol(name))
            }
            Tok::Question => {
                self.bump();
                Ok(Game::test(self.formula()?))
            }
            Tok::LBrace => {
                self.bump();
                let is_ode = matches!(
                    (self.peek_at(0), self.peek_at(1), self.peek_at(2)),
                    (Tok::Ident(_), Tok::Prime, Tok::Eq)
                );
                if is_ode {
                    let Tok::Ident(name) = self.bump() else { unreachable!() };
                    self.bump();
                    self.bump();
                    let rhs = self.term()?;
                    let domain = if self.eat(&Tok::Amp) { self.formula()? } else { Formula::True };
                    self.expect(Tok::RBrace)?;
                    return Ok(Game::ode(Variable::new(name), rhs, domain));
                }
                let g = self.game()?;
                self.expect(Tok::RBrace)?;
                Ok(g)
            }
            other => Err(ParseError::syntax(pos, format!("expected game, found {}", other.describe()))),
        }
    }
}

fn finish_with_arities(expr: Expression) -> PResult<Expression> {
    check_arities(&expr).map_err(|(symbol, first, second)| {
        ParseError::new(Position { line: 1, column: 1 }, ParseErrorKind::ArityConflict { symbol, first, second })
    })?;
    Ok(expr)
}

pub(crate) fn parse_with(text: &str, category: Category, allow_dots: bool) -> PResult<Expression> {
    let mut p = Parser::new(text, allow_dots)?;
    let expr = match category {
        Category::Term => Expression::Term(p.term().map_err(|e| p.best_error(e))?),
        Category::Game => Expression::Game(p.game().map_err(|e| p.best_error(e))?),
        Category::Formula => Expression::Formula(p.formula().map_err(|e| p.best_error(e))?),
    };
    p.finish()?;
    finish_with_arities(expr)
}

/// Parses user text of the given category. Argument placeholders are rejected.
pub fn parse(text: &str, category: Category) -> PResult<Expression> {
    parse_with(text, category, false)
}

pub fn parse_term(text: &str) -> PResult<Term> {
    match parse(text, Category::Term)? {
        Expression::Term(t) => Ok(t),
        _ => unreachable!(),
    }
}

pub fn parse_formula(text: &str) -> PResult<Formula> {
    match parse(text, Category::Formula)? {
        Expression::Formula(f) => Ok(f),
        _ => unreachable!(),
    }
}

pub fn parse_game(text: &str) -> PResult<Game> {
    match parse(text, Category::Game)? {
        Expression::Game(g) => Ok(g),
        _ => unreachable!(),
    }
}
