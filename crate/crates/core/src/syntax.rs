//! Tokenizer and recursive-descent parser for polynomial expressions.
//!
//! The same token stream feeds the model DSL; the expression grammar is
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' exponent)?
//! atom   := INT | IDENT | '(' expr ')'
//! ```
//!
//! Division is only by nonzero constants; exponents are integers or
//! parenthesised constant rationals.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{Exponent, PolyExpr, Rational, Vars};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(BigInt),
    /// Decimal literal with a fractional part or exponent, kept verbatim.
    Float(String),
    Punct(char),
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

impl Token {
    pub fn text(&self) -> String {
        match &self.kind {
            TokenKind::Ident(s) | TokenKind::Float(s) => s.clone(),
            TokenKind::Int(n) => n.to_string(),
            TokenKind::Punct(c) => c.to_string(),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

const PUNCT: &str = ";,=(){}+-*/^";

/// Split text into tokens; `#` starts a comment running to end of line.
pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            TokenKind::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let mut float = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    float = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            if float {
                TokenKind::Float(s)
            } else {
                TokenKind::Int(s.parse().expect("digit run"))
            }
        } else if PUNCT.contains(c) {
            i += 1;
            TokenKind::Punct(c)
        } else {
            return Err(Error::Parse {
                line: tl,
                col: tc,
                token: c.to_string(),
                message: "unexpected character".into(),
            });
        };
        col += i - start;
        out.push(Token {
            kind,
            line: tl,
            col: tc,
        });
    }
    out.push(Token {
        kind: TokenKind::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Position in a token stream; always ends with [`TokenKind::Eof`].
pub struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(tokens: &'a [Token]) -> Self {
        assert!(
            matches!(tokens.last(), Some(Token { kind: TokenKind::Eof, .. })),
            "token stream must end with Eof"
        );
        Cursor { tokens, pos: 0 }
    }

    pub fn peek(&self) -> &'a Token {
        &self.tokens[self.pos]
    }

    pub fn peek_at(&self, offset: usize) -> &'a Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    pub fn advance(&mut self) -> &'a Token {
        let t = &self.tokens[self.pos];
        if !matches!(t.kind, TokenKind::Eof) {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek().kind, TokenKind::Eof)
    }

    pub fn at_punct(&self, c: char) -> bool {
        self.peek().kind == TokenKind::Punct(c)
    }

    pub fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == kw)
    }

    pub fn eat_punct(&mut self, c: char) -> bool {
        if self.at_punct(c) {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn error_at(&self, tok: &Token, message: impl Into<String>) -> Error {
        Error::Parse {
            line: tok.line,
            col: tok.col,
            token: tok.text(),
            message: message.into(),
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(self.peek(), message)
    }

    pub fn expect_punct(&mut self, c: char) -> Result<()> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`")))
        }
    }

    pub fn expect_ident(&mut self) -> Result<&'a str> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    pub fn expect_int(&mut self) -> Result<BigInt> {
        match &self.peek().kind {
            TokenKind::Int(n) => {
                let n = n.clone();
                self.advance();
                Ok(n)
            }
            _ => Err(self.error("expected integer")),
        }
    }

    /// Optionally signed decimal or integer literal as `f64`.
    pub fn expect_float(&mut self) -> Result<f64> {
        let neg = if self.eat_punct('-') {
            true
        } else {
            self.eat_punct('+');
            false
        };
        let tok = self.peek();
        let v = match &tok.kind {
            TokenKind::Float(s) => s
                .parse::<f64>()
                .map_err(|_| self.error("malformed number"))?,
            TokenKind::Int(n) => n.to_f64().ok_or_else(|| self.error("number out of range"))?,
            _ => return Err(self.error("expected number")),
        };
        self.advance();
        Ok(if neg { -v } else { v })
    }

    /// Optionally signed `p` or `p/q` literal.
    pub fn expect_rational(&mut self) -> Result<Rational> {
        let neg = if self.eat_punct('-') {
            true
        } else {
            self.eat_punct('+');
            false
        };
        let n = self.expect_int()?;
        let mut q = Rational::from_integer(n);
        if self.eat_punct('/') {
            let tok = self.peek();
            let d = self.expect_int()?;
            if d.is_zero() {
                return Err(self.error_at(tok, "zero denominator"));
            }
            q /= Rational::from_integer(d);
        }
        Ok(if neg { -q } else { q })
    }
}

/// Names that are not ring variables but may appear in expressions.
pub trait Resolve {
    fn resolve(&self, name: &str) -> Option<PolyExpr>;
}

impl<F: Fn(&str) -> Option<PolyExpr>> Resolve for F {
    fn resolve(&self, name: &str) -> Option<PolyExpr> {
        self(name)
    }
}

struct NoNames;

impl Resolve for NoNames {
    fn resolve(&self, _: &str) -> Option<PolyExpr> {
        None
    }
}

pub struct ExprParser<'v, 'r> {
    vars: &'v Vars,
    names: &'r dyn Resolve,
}

impl<'v, 'r> ExprParser<'v, 'r> {
    pub fn new(vars: &'v Vars, names: &'r dyn Resolve) -> Self {
        ExprParser { vars, names }
    }

    pub fn expr(&self, cur: &mut Cursor) -> Result<PolyExpr> {
        let mut acc = self.term(cur)?;
        loop {
            let op = cur.peek();
            if cur.eat_punct('+') {
                let rhs = self.term(cur)?;
                acc = acc.try_add(&rhs).map_err(|e| cur.error_at(op, e.to_string()))?;
            } else if cur.eat_punct('-') {
                let rhs = self.term(cur)?;
                acc = acc.try_sub(&rhs).map_err(|e| cur.error_at(op, e.to_string()))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&self, cur: &mut Cursor) -> Result<PolyExpr> {
        let mut acc = self.unary(cur)?;
        loop {
            let op = cur.peek();
            if cur.eat_punct('*') {
                let rhs = self.unary(cur)?;
                acc = acc.try_mul(&rhs).map_err(|e| cur.error_at(op, e.to_string()))?;
            } else if cur.at_punct('/') {
                let op = cur.advance();
                let d = self.unary(cur)?;
                if !d.is_constant() {
                    return Err(cur.error_at(op, "division by a non-constant expression"));
                }
                let c = d.constant_term();
                if c.is_zero() {
                    return Err(cur.error_at(op, "division by zero"));
                }
                acc = acc.scale(&c.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&self, cur: &mut Cursor) -> Result<PolyExpr> {
        if cur.eat_punct('-') {
            Ok(-self.unary(cur)?)
        } else if cur.eat_punct('+') {
            self.unary(cur)
        } else {
            self.power(cur)
        }
    }

    fn power(&self, cur: &mut Cursor) -> Result<PolyExpr> {
        let base = self.atom(cur)?;
        if !cur.at_punct('^') {
            return Ok(base);
        }
        let caret = cur.advance();
        let e = self.exponent(cur)?;
        base.pow_rational(e).map_err(|err| cur.error_at(caret, err.to_string()))
    }

    fn exponent(&self, cur: &mut Cursor) -> Result<Exponent> {
        let tok = cur.peek();
        let value = if cur.eat_punct('(') {
            let v = self.expr(cur)?;
            cur.expect_punct(')')?;
            v
        } else if cur.eat_punct('-') {
            let n = cur.expect_int()?;
            PolyExpr::constant(self.vars, -Rational::from_integer(n))
        } else {
            let n = cur.expect_int()?;
            PolyExpr::constant(self.vars, Rational::from_integer(n))
        };
        if !value.is_constant() {
            return Err(cur.error_at(tok, "exponent must be a constant"));
        }
        let q = value.constant_term();
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(p), Some(d)) => Ok(Exponent::new(p, d)),
            _ => Err(cur.error_at(tok, "exponent out of range")),
        }
    }

    fn atom(&self, cur: &mut Cursor) -> Result<PolyExpr> {
        let tok = cur.peek();
        match &tok.kind {
            TokenKind::Int(n) => {
                cur.advance();
                Ok(PolyExpr::constant(self.vars, Rational::from_integer(n.clone())))
            }
            TokenKind::Ident(name) => {
                cur.advance();
                if let Some(i) = self.vars.index_of(name) {
                    Ok(PolyExpr::var(self.vars, i))
                } else if let Some(p) = self.names.resolve(name) {
                    if p.is_constant() {
                        Ok(PolyExpr::constant(self.vars, p.constant_term()))
                    } else {
                        p.reindex(self.vars)
                            .map_err(|e| cur.error_at(tok, e.to_string()))
                    }
                } else {
                    Err(cur.error_at(tok, format!("unknown identifier `{name}`")))
                }
            }
            TokenKind::Punct('(') => {
                cur.advance();
                let v = self.expr(cur)?;
                cur.expect_punct(')')?;
                Ok(v)
            }
            TokenKind::Float(_) => Err(cur.error_at(
                tok,
                "decimal literal in polynomial; write it as a fraction p/q",
            )),
            _ => Err(cur.error_at(tok, "expected expression")),
        }
    }
}

pub(crate) fn parse_poly_str(text: &str, vars: &Vars) -> Result<PolyExpr> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(&tokens);
    let p = ExprParser::new(vars, &NoNames).expr(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(p)
}
