//! Expression syntax: tokens, AST, parser and canonical printer.
//!
//! ```text
//! expr   := ["-"] term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := atom ("^" ["-"] int)?        negative powers only on t
//! atom   := int | "t" | "x" | "u" | name | "(" expr ")" | "rat:" factor "/" factor
//! ```

use std::fmt;

/// Deepest parenthesis nesting accepted.
pub const MAX_DEPTH: usize = 128;

/// Longest input accepted, in bytes.
pub const MAX_INPUT: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    X,
    U,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::U => "u",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Var(Var),
    /// A stream bound with `--def`.
    Name(String),
    /// `rat:num/den`.
    Rat(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Neg(Box<Expr>),
    /// At least two summands.
    Sum(Vec<Expr>),
    /// At least two factors.
    Product(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    /// Byte offset into the input.
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Rat,
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("integer {n}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Rat => "'rat:'".into(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Caret => "'^'".into(),
        Tok::Slash => "'/'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let err = |pos, msg: &str| SyntaxError { pos, msg: msg.into() };
    if src.len() > MAX_INPUT {
        return Err(err(MAX_INPUT, "input too long"));
    }
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..i].parse::<u64>().map_err(|_| err(start, "integer too large"))?;
                out.push((start, Tok::Int(n)));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &src[start..i];
                if word == "rat" {
                    if bytes.get(i) != Some(&b':') {
                        return Err(err(i, "expected ':' after 'rat'"));
                    }
                    i += 1;
                    out.push((start, Tok::Rat));
                } else {
                    out.push((start, Tok::Ident(word.to_string())));
                }
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError { pos: i, msg: format!("unexpected character '{ch}'") });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("nesting too deep");
        }
        let mut items = Vec::new();
        let first = if *self.peek() == Tok::Minus {
            self.bump();
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        items.push(first);
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    items.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    items.push(Expr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Sum(items) })
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut items = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            items.push(self.factor()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Product(items) })
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let pos = self.pos();
        let Tok::Int(n) = self.bump() else {
            return Err(SyntaxError { pos, msg: "expected an integer exponent".into() });
        };
        let e = i64::try_from(n).map_err(|_| SyntaxError { pos, msg: "exponent too large".into() })?;
        if negative && base != Expr::Var(Var::T) {
            return Err(SyntaxError { pos, msg: "negative powers are only allowed on t".into() });
        }
        Ok(Expr::Pow(Box::new(base), if negative { -e } else { e }))
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Int(n)),
            Tok::Ident(s) => Ok(match s.as_str() {
                "t" => Expr::Var(Var::T),
                "x" => Expr::Var(Var::X),
                "u" => Expr::Var(Var::U),
                _ => Expr::Name(s),
            }),
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.fail(format!("expected ')', found {}", describe(self.peek())));
                }
                self.bump();
                Ok(e)
            }
            Tok::Rat => {
                let num = self.factor()?;
                if *self.peek() != Tok::Slash {
                    return self.fail(format!("expected '/' in rational, found {}", describe(self.peek())));
                }
                self.bump();
                let den = self.factor()?;
                Ok(Expr::Rat(Box::new(num), Box::new(den)))
            }
            t => Err(SyntaxError { pos, msg: format!("unexpected {}", describe(&t)) }),
        }
    }
}

/// Parses a complete expression.
pub fn parse(src: &str) -> Result<Expr, SyntaxError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, depth: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(format!("unexpected {}", describe(p.peek())));
    }
    Ok(e)
}

/// Whether `s` may be used as a stream name.
pub fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(c) = chars.next() else { return false };
    (c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "t" | "x" | "u" | "rat")
}

fn bare_base(e: &Expr) -> bool {
    matches!(e, Expr::Int(_) | Expr::Var(_) | Expr::Name(_))
}

fn write_factor(e: &Expr, out: &mut String) {
    match e {
        Expr::Sum(_) | Expr::Neg(_) | Expr::Product(_) => {
            out.push('(');
            write_expr(e, out);
            out.push(')');
        }
        _ => write_expr(e, out),
    }
}

fn write_rat_part(e: &Expr, out: &mut String) {
    if bare_base(e) || matches!(e, Expr::Pow(..)) {
        write_expr(e, out);
    } else {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    }
}

/// Operand of a sum or of a negation: products and atoms print bare.
fn write_term(e: &Expr, out: &mut String) {
    match e {
        Expr::Sum(_) | Expr::Neg(_) => {
            out.push('(');
            write_expr(e, out);
            out.push(')');
        }
        _ => write_expr(e, out),
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Int(n) => out.push_str(&n.to_string()),
        Expr::Var(v) => out.push_str(v.symbol()),
        Expr::Name(s) => out.push_str(s),
        Expr::Rat(a, b) => {
            out.push_str("rat:");
            write_rat_part(a, out);
            out.push('/');
            write_rat_part(b, out);
        }
        Expr::Pow(b, k) => {
            if bare_base(b) {
                write_expr(b, out);
            } else {
                out.push('(');
                write_expr(b, out);
                out.push(')');
            }
            out.push('^');
            out.push_str(&k.to_string());
        }
        Expr::Neg(a) => {
            out.push('-');
            write_term(a, out);
        }
        Expr::Sum(items) => {
            for (i, it) in items.iter().enumerate() {
                match (i, it) {
                    (0, Expr::Neg(a)) => {
                        out.push('-');
                        write_term(a, out);
                    }
                    (0, _) => write_term(it, out),
                    (_, Expr::Neg(a)) => {
                        out.push_str(" - ");
                        write_term(a, out);
                    }
                    _ => {
                        out.push_str(" + ");
                        write_term(it, out);
                    }
                }
            }
        }
        Expr::Product(items) => {
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                write_factor(it, out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(self, &mut s);
        f.write_str(&s)
    }
}
