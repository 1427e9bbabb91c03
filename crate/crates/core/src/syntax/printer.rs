//! Minimal-parenthesis printer; `parse(print(e)) == e` for every AST whose
//! numbers are non-negative and representable as decimals.

use std::fmt::{self, Display, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ast::{Expression, Formula, Game, Rational, Term};
use super::lexer::{tokenize, Tok};

pub fn format_rational(r: &Rational) -> String {
    if r.is_negative() {
        return format!("(-{})", format_rational(&-r.clone()));
    }
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    let mut den = r.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut digits = 0usize;
    while den.is_even() {
        den /= &two;
        digits += 1;
    }
    let mut fives = 0usize;
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = digits.max(fives);
    let scaled = r * Rational::from_integer(BigInt::from(10u32).pow(digits as u32));
    let s = scaled.to_integer().to_string();
    let s = format!("{:0>width$}", s, width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{int}.{frac}")
}

// Term precedence levels.
const SUM: u8 = 1;
const PROD: u8 = 2;
const UNARY: u8 = 3;
const POST: u8 = 4;
const ATOM: u8 = 5;

fn term_level(t: &Term) -> u8 {
    match t {
        Term::Plus(..) | Term::Minus(..) => SUM,
        Term::Times(..) => PROD,
        Term::Neg(_) => UNARY,
        Term::Power(..) | Term::Differential(_) => POST,
        Term::Number(r) if r.is_negative() => ATOM,
        _ => ATOM,
    }
}

fn write_term(out: &mut String, t: &Term, min: u8) {
    if term_level(t) < min {
        out.push('(');
        write_term(out, t, SUM);
        out.push(')');
        return;
    }
    match t {
        Term::Var(v) => {
            let _ = write!(out, "{v}");
        }
        Term::Number(r) => out.push_str(&format_rational(r)),
        Term::Func(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(out, a, SUM);
            }
            out.push(')');
        }
        Term::Dot(0) => out.push('.'),
        Term::Dot(i) => {
            let _ = write!(out, ".{i}");
        }
        Term::Plus(a, b) => {
            write_term(out, a, SUM);
            out.push('+');
            write_term(out, b, PROD);
        }
        Term::Minus(a, b) => {
            write_term(out, a, SUM);
            out.push('-');
            write_term(out, b, PROD);
        }
        Term::Times(a, b) => {
            write_term(out, a, PROD);
            out.push('*');
            write_term(out, b, UNARY);
        }
        Term::Neg(a) => {
            out.push('-');
            write_term(out, a, UNARY);
        }
        Term::Power(a, n) => {
            write_term(out, a, ATOM);
            let _ = write!(out, "^{n}");
        }
        Term::Differential(a) => {
            out.push('(');
            write_term(out, a, SUM);
            out.push_str(")'");
        }
    }
}

// Formula precedence levels.
const EQUIV: u8 = 1;
const IMPLY: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const LIT: u8 = 5;

fn formula_level(f: &Formula) -> u8 {
    match f {
        Formula::Equiv(..) => EQUIV,
        Formula::Imply(..) => IMPLY,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => LIT,
    }
}

fn write_formula(out: &mut String, f: &Formula, min: u8) {
    if formula_level(f) < min {
        out.push('(');
        write_formula(out, f, EQUIV);
        out.push(')');
        return;
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Cmp(op, a, b) => {
            write_term(out, a, SUM);
            out.push_str(op.symbol());
            write_term(out, b, SUM);
        }
        Formula::Pred(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(out, a, SUM);
            }
            out.push(')');
        }
        Formula::Predicational(name) => {
            out.push_str(name);
            out.push_str("(||)");
        }
        Formula::Not(a) => {
            out.push('!');
            write_formula(out, a, LIT);
        }
        Formula::And(a, b) => binary(out, a, " & ", b, AND, LIT),
        Formula::Or(a, b) => binary(out, a, " | ", b, OR, AND),
        Formula::Imply(a, b) => binary(out, a, " -> ", b, OR, IMPLY),
        Formula::Equiv(a, b) => binary(out, a, " <-> ", b, EQUIV, IMPLY),
        Formula::Exists(x, body) | Formula::Forall(x, body) => {
            out.push_str(if matches!(f, Formula::Exists(..)) { "\\exists " } else { "\\forall " });
            let _ = write!(out, "{x} ");
            if matches!(**body, Formula::Cmp(..)) {
                out.push('(');
                write_formula(out, body, EQUIV);
                out.push(')');
            } else {
                write_formula(out, body, LIT);
            }
        }
        Formula::Diamond(g, body) | Formula::Box(g, body) => {
            let (open, close) = if matches!(f, Formula::Diamond(..)) { ('<', '>') } else { ('[', ']') };
            out.push(open);
            write_game(out, g, CHOICE);
            out.push(close);
            if !matches!(**body, Formula::Diamond(..) | Formula::Box(..)) {
                out.push(' ');
            }
            write_formula(out, body, LIT);
        }
    }
}

fn binary(out: &mut String, a: &Formula, op: &str, b: &Formula, left: u8, right: u8) {
    write_formula(out, a, left);
    out.push_str(op);
    write_formula(out, b, right);
}

// Game precedence levels.
const CHOICE: u8 = 1;
const SEQ: u8 = 2;
const GPOST: u8 = 3;
const GATOM: u8 = 4;

fn game_level(g: &Game) -> u8 {
    match g {
        Game::Choice(..) => CHOICE,
        Game::Seq(..) => SEQ,
        // Assignments and tests end in an open-ended term or formula and
        // need braces before a postfix operator.
        Game::Repeat(_) | Game::Dual(_) | Game::Assign(..) | Game::Test(_) => GPOST,
        Game::Symbol(_) | Game::Ode { .. } => GATOM,
    }
}

fn write_game(out: &mut String, g: &Game, min: u8) {
    if game_level(g) < min {
        out.push('{');
        write_game(out, g, CHOICE);
        out.push('}');
        return;
    }
    match g {
        Game::Symbol(a) => out.push_str(a),
        Game::Assign(x, t) => {
            let _ = write!(out, "{x}:=");
            write_term(out, t, SUM);
        }
        Game::Ode { var, rhs, domain } => {
            let _ = write!(out, "{{{var}'=");
            write_term(out, rhs, SUM);
            if **domain != Formula::True {
                out.push_str(" & ");
                write_formula(out, domain, EQUIV);
            }
            out.push('}');
        }
        Game::Test(f) => {
            // A `>` in a test would be read as the end of an enclosing `<..>`.
            let mut body = String::new();
            write_formula(&mut body, f, EQUIV);
            let has_gt = tokenize(&body).map_or(true, |t| t.iter().any(|(t, _)| *t == Tok::Gt));
            if has_gt {
                let _ = write!(out, "?({body})");
            } else {
                let _ = write!(out, "?{body}");
            }
        }
        Game::Choice(a, b) => {
            write_game(out, a, CHOICE);
            out.push_str(" ++ ");
            write_game(out, b, SEQ);
        }
        Game::Seq(a, b) => {
            write_game(out, a, SEQ);
            out.push_str("; ");
            write_game(out, b, GPOST);
        }
        Game::Repeat(a) => {
            write_game(out, a, GATOM);
            out.push('*');
        }
        Game::Dual(a) => {
            write_game(out, a, GATOM);
            out.push_str("^d");
        }
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self, SUM);
        f.write_str(&s)
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self, EQUIV);
        f.write_str(&s)
    }
}

impl Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_game(&mut s, self, CHOICE);
        f.write_str(&s)
    }
}

impl Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Term(t) => t.fmt(f),
            Expression::Game(g) => g.fmt(f),
            Expression::Formula(p) => p.fmt(f),
        }
    }
}
