use num_bigint::BigInt;
use num_traits::Zero;

use super::ast::Rational;
use super::error::{ParseError, ParseErrorKind, Position};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(Rational),
    Ident(String),
    Prime,
    LParen,
    RParen,
    Comma,
    Dot(usize),
    Plus,
    Minus,
    Star,
    Caret,
    PlusPlus,
    Semi,
    SemiSemi,
    ColonEq,
    Question,
    LBrace,
    RBrace,
    Amp,
    Bar,
    Bang,
    Arrow,
    DArrow,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    LBracket,
    RBracket,
    Exists,
    Forall,
    /// The predicational argument marker `(||)`.
    Bars,
    Squiggle,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Dot(i) => format!("`.{i}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Prime => "'",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Caret => "^",
            Tok::PlusPlus => "++",
            Tok::Semi => ";",
            Tok::SemiSemi => ";;",
            Tok::ColonEq => ":=",
            Tok::Question => "?",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Bang => "!",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Exists => "\\exists",
            Tok::Forall => "\\forall",
            Tok::Bars => "(||)",
            Tok::Squiggle => "~>",
            _ => "?",
        }
    }
}

pub(crate) type Spanned = (Tok, Position);

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! advance {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }

    let starts_with = |i: usize, s: &str| -> bool {
        let n = s.chars().count();
        i + n <= chars.len() && chars[i..i + n].iter().copied().eq(s.chars())
    };

    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, column: col };
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance!(1);
            }
            let int_part: String = chars[start..i].iter().collect();
            let mut value = Rational::from_integer(int_part.parse::<BigInt>().unwrap());
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                advance!(1);
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance!(1);
                }
                let frac: String = chars[fs..i].iter().collect();
                let scale = BigInt::from(10u32).pow(frac.len() as u32);
                value += Rational::new(frac.parse::<BigInt>().unwrap(), scale);
            } else if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                advance!(1);
                let ds = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance!(1);
                }
                let den: BigInt = chars[ds..i].iter().collect::<String>().parse().unwrap();
                if den.is_zero() {
                    return Err(ParseError::new(pos, ParseErrorKind::Syntax("zero denominator".into())));
                }
                value /= Rational::from_integer(den);
            }
            out.push((Tok::Num(value), pos));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance!(1);
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c == '\\' {
            if starts_with(i, "\\exists") {
                advance!(7);
                out.push((Tok::Exists, pos));
                continue;
            }
            if starts_with(i, "\\forall") {
                advance!(7);
                out.push((Tok::Forall, pos));
                continue;
            }
            return Err(ParseError::new(pos, ParseErrorKind::Syntax("unknown keyword after `\\`".into())));
        }
        if c == '.' {
            advance!(1);
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance!(1);
            }
            let index = if start == i {
                0
            } else {
                chars[start..i].iter().collect::<String>().parse().unwrap()
            };
            out.push((Tok::Dot(index), pos));
            continue;
        }
        let multi: &[(&str, Tok)] = &[
            ("(||)", Tok::Bars),
            ("<->", Tok::DArrow),
            ("->", Tok::Arrow),
            ("<=", Tok::Le),
            (">=", Tok::Ge),
            ("!=", Tok::Ne),
            (":=", Tok::ColonEq),
            ("++", Tok::PlusPlus),
            (";;", Tok::SemiSemi),
            ("~>", Tok::Squiggle),
        ];
        if let Some((s, tok)) = multi.iter().find(|(s, _)| starts_with(i, s)) {
            advance!(s.chars().count());
            out.push((tok.clone(), pos));
            continue;
        }
        let tok = match c {
            '\'' => Tok::Prime,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            ';' => Tok::Semi,
            '?' => Tok::Question,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '!' => Tok::Bang,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '=' => Tok::Eq,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            other => {
                return Err(ParseError::new(
                    pos,
                    ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                ))
            }
        };
        advance!(1);
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Position { line, column: col }));
    Ok(out)
}

/// Parses a standalone rational literal: optional sign, decimal or `n/m`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, text),
    };
    let toks = tokenize(body).ok()?;
    match toks.as_slice() {
        [(Tok::Num(r), _), (Tok::Eof, _)] => Some(if negative { -r.clone() } else { r.clone() }),
        _ => None,
    }
}
