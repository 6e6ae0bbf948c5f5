//! Recursive-descent parser for the metric expression language.
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := factor (('*'|'/') factor)* ;
//! factor := '-' factor | base ('^' exponent)? ;
//! base   := number | ident | ident '(' expr ')' | '(' expr ')' ;
//! exponent := signed_number ('/' integer)? | '(' constant expr ')' ;
//! ```
//!
//! An exponent written `a/b` is a single rational literal, so `t^4/3` is
//! `t^(4/3)`. Outside exponents `/` is always division; integer quotients such
//! as `1/3` are still folded to exact rationals by [`super::simplify`].

use std::sync::Arc;

use thiserror::Error;

use super::{simplify, BinaryOp, Constant, Expr, Node, UnaryFn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at byte {offset} is not a numeric constant")]
    NonConstantExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::NonConstantExponent { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek_byte(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.peek_byte().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(b) = self.peek_byte() else {
            return Ok((Tok::End, start));
        };
        if b.is_ascii_digit() || b == b'.' {
            self.lex_number();
            return Ok((Tok::Number(self.src[start..self.pos].to_string()), start));
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            while self
                .peek_byte()
                .is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_')
            {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if b"+-*/^()".contains(&b) {
            self.pos += 1;
            return Ok((Tok::Sym(b as char), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{ch}`"),
        })
    }

    fn lex_number(&mut self) {
        let digits = |lx: &mut Self| {
            while lx.peek_byte().is_some_and(|b| b.is_ascii_digit()) {
                lx.pos += 1;
            }
        };
        digits(self);
        if self.peek_byte() == Some(b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.peek_byte(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek_byte(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.peek_byte().is_some_and(|b| b.is_ascii_digit()) {
                digits(self);
            } else {
                self.pos = save;
            }
        }
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    coords: &'a [String],
    params: &'a [String],
}

/// Parses `text` against the given coordinate names and parameter names.
///
/// The returned tree mirrors the source structure exactly; run
/// [`super::simplify`] to fold constants.
pub fn parse<S: AsRef<str>>(text: &str, coords: &[S], params: &[S]) -> Result<Expr, ParseError> {
    let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
    let params: Vec<String> = params.iter().map(|s| s.as_ref().to_string()).collect();
    let mut p = Parser {
        toks: Lexer::tokens(text)?,
        idx: 0,
        coords: &coords,
        params: &params,
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        other => Err(p.syntax(format!("unexpected {}", describe(other)))),
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Number(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".to_string(),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn offset(&self) -> usize {
        self.toks[self.idx].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            message,
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`, found {}", describe(self.peek()))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinaryOp::Add,
                Tok::Sym('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::new(Node::Binary(op, lhs, rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinaryOp::Mul,
                Tok::Sym('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::new(Node::Binary(op, lhs, rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            let inner = self.factor()?;
            return Ok(Expr::new(Node::Unary(UnaryFn::Neg, inner)));
        }
        let base = self.base()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let q = self.exponent()?;
            return Ok(Expr::new(Node::Pow(base, q)));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<Constant, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Number(text) => Constant::parse_decimal(&text).ok_or(ParseError::Syntax {
                offset: at,
                message: format!("invalid number `{text}`"),
            }),
            other => Err(ParseError::Syntax {
                offset: at,
                message: format!("expected number, found {}", describe(&other)),
            }),
        }
    }

    fn exponent(&mut self) -> Result<Constant, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Sym('(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect(')')?;
                simplify(&inner)
                    .as_const()
                    .ok_or(ParseError::NonConstantExponent { offset: at })
            }
            Tok::Sym('-') | Tok::Number(_) => {
                let negative = *self.peek() == Tok::Sym('-');
                if negative {
                    self.bump();
                }
                let mut q = self.number()?;
                if *self.peek() == Tok::Sym('/')
                    && matches!(self.toks.get(self.idx + 1), Some((Tok::Number(_), _)))
                {
                    self.bump();
                    let den_at = self.offset();
                    let den = self.number()?;
                    if den.is_zero() {
                        return Err(ParseError::Syntax {
                            offset: den_at,
                            message: "zero denominator in exponent".into(),
                        });
                    }
                    q = q.div(den);
                }
                Ok(if negative { q.neg() } else { q })
            }
            Tok::Ident(_) => Err(ParseError::NonConstantExponent { offset: at }),
            other => Err(self.syntax(format!("expected exponent, found {}", describe(&other)))),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Number(_) => Ok(Expr::constant(self.number()?)),
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::Sym('(') {
                    let Some(func) = UnaryFn::from_name(&name) else {
                        return Err(ParseError::UnknownIdentifier { offset: at, name });
                    };
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::new(Node::Unary(func, arg)));
                }
                if let Some(i) = self.coords.iter().position(|c| *c == name) {
                    Ok(Expr::coord(i))
                } else if self.params.contains(&name) {
                    Ok(Expr::new(Node::Param(Arc::from(name.as_str()))))
                } else {
                    Err(ParseError::UnknownIdentifier { offset: at, name })
                }
            }
            other => Err(self.syntax(format!("expected operand, found {}", describe(&other)))),
        }
    }
}
