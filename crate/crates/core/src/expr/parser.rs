//! Recursive-descent parser for coordinate expressions.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" exponent)*
//! exponent:= ["-"] INT | "(" ["-"] INT ")"
//! primary := NUMBER | IDENT | FUNC "(" expr ")" | "(" expr ")"
//! ```

use std::fmt;

use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: &'static str },
    UnexpectedEnd { expected: &'static str },
    UnknownIdentifier(String),
    UnknownFunction(String),
    NonIntegerExponent(String),
    BadNumber(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found {found:?}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier {name:?}"),
            ParseErrorKind::UnknownFunction(name) => write!(f, "unknown function {name:?}"),
            ParseErrorKind::NonIntegerExponent(s) => {
                write!(f, "exponent must be an integer literal, found {s:?}")
            }
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number {s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { text: String, value: f64 },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { text, .. } => text.clone(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            i += 1;
            column += 1;
            continue;
        }
        let begin = i;
        if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[begin..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| ParseError {
                kind: ParseErrorKind::BadNumber(text.clone()),
                line: start_line,
                column: start_col,
            })?;
            column += i - begin;
            out.push(Spanned {
                tok: Tok::Num { text, value },
                line: start_line,
                column: start_col,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[begin..i].iter().collect();
            column += i - begin;
            out.push(Spanned {
                tok: Tok::Ident(text),
                line: start_line,
                column: start_col,
            });
            continue;
        }
        return Err(ParseError {
            kind: ParseErrorKind::UnexpectedChar(c),
            line: start_line,
            column: start_col,
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    coords: &'a [String],
    end: (usize, usize),
}

/// Parse `text` with identifiers resolved against `coords`.
pub fn parse(text: &str, coords: &[String]) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            line: 1,
            column: 1,
        });
    }
    let end = end_position(text);
    let mut parser = Parser {
        toks,
        pos: 0,
        coords,
        end,
    };
    let expr = parser.expr()?;
    if let Some(extra) = parser.peek() {
        return Err(parser.error_at(
            extra,
            ParseErrorKind::UnexpectedToken {
                found: extra.tok.describe(),
                expected: "operator or end of input",
            },
        ));
    }
    Ok(expr)
}

fn end_position(text: &str) -> (usize, usize) {
    let mut line = 1;
    let mut column = 1;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: &Spanned, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            line: at.line,
            column: at.column,
        }
    }

    fn error_end(&self, expected: &'static str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::UnexpectedEnd { expected },
            line: self.end.0,
            column: self.end.1,
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().is_some_and(|t| &t.tok == tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t.tok == tok => Ok(()),
            Some(t) => Err(self.error_at(
                &t,
                ParseErrorKind::UnexpectedToken {
                    found: t.tok.describe(),
                    expected,
                },
            )),
            None => Err(self.error_end(expected)),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(&Tok::Slash) {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.eat(&Tok::Caret) {
            let k = self.exponent()?;
            base = Expr::Pow(Box::new(base), k);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parens = self.eat(&Tok::LParen);
        let negative = self.eat(&Tok::Minus);
        let tok = self.next().ok_or_else(|| self.error_end("integer exponent"))?;
        let k = match &tok.tok {
            Tok::Num { text, .. } if text.chars().all(|c| c.is_ascii_digit()) => {
                text.parse::<i32>().map_err(|_| {
                    self.error_at(&tok, ParseErrorKind::NonIntegerExponent(text.clone()))
                })?
            }
            other => {
                return Err(self.error_at(
                    &tok,
                    ParseErrorKind::NonIntegerExponent(other.describe()),
                ))
            }
        };
        if parens {
            self.expect(Tok::RParen, "\")\"")?;
        }
        Ok(if negative { -k } else { k })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.next().ok_or_else(|| self.error_end("operand"))?;
        match &tok.tok {
            Tok::Num { value, .. } => Ok(Expr::Lit(*value)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "\")\"")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek().is_some_and(|t| t.tok == Tok::LParen) {
                    let func = Func::from_name(name).ok_or_else(|| {
                        self.error_at(&tok, ParseErrorKind::UnknownFunction(name.clone()))
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "\")\"")?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                self.coords
                    .iter()
                    .position(|c| c == name)
                    .map(Expr::Coord)
                    .ok_or_else(|| {
                        self.error_at(&tok, ParseErrorKind::UnknownIdentifier(name.clone()))
                    })
            }
            other => Err(self.error_at(
                &tok,
                ParseErrorKind::UnexpectedToken {
                    found: other.describe(),
                    expected: "operand",
                },
            )),
        }
    }
}
