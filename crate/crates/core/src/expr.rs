//! Complex-valued expressions in the coordinates `z1, z2, ...`.
//!
//! Used for custom defining functions (`psi`) and for test functions handed
//! to the reproducing formula. Supported syntax: numbers, `i`, `pi`, the
//! variables `zj`, `+ - * / ^`, parentheses and the functions
//! `re im abs conj exp log sqrt sin cos`.
//!
//! ```
//! use plurikernel::expr::Expr;
//! use plurikernel::linalg::from_reals;
//! let e = Expr::parse("abs(z1)^2 + 2*abs(z2)^2 - 1").unwrap();
//! assert_eq!(e.dimension(), 2);
//! assert!((e.eval_real(&from_reals(&[1.0, 0.0])) - 0.0).abs() < 1e-15);
//! ```

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Re,
    Im,
    Abs,
    Conj,
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "re" => Func::Re,
            "im" => Func::Im,
            "abs" => Func::Abs,
            "conj" => Func::Conj,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn apply(self, x: Complex64) -> Complex64 {
        match self {
            Func::Re => Complex64::new(x.re, 0.0),
            Func::Im => Complex64::new(x.im, 0.0),
            Func::Abs => Complex64::new(x.norm(), 0.0),
            Func::Conj => x.conj(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    /// 0-based coordinate index.
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval(&self, z: &CVector) -> Complex64 {
        match self {
            Node::Const(c) => *c,
            Node::Var(k) => z.get(*k).copied().unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
            Node::Neg(a) => -a.eval(z),
            Node::Add(a, b) => a.eval(z) + b.eval(z),
            Node::Sub(a, b) => a.eval(z) - b.eval(z),
            Node::Mul(a, b) => a.eval(z) * b.eval(z),
            Node::Div(a, b) => a.eval(z) / b.eval(z),
            Node::Pow(a, b) => {
                let base = a.eval(z);
                let e = b.eval(z);
                if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= 64.0 {
                    base.powi(e.re as i32)
                } else {
                    base.powc(e)
                }
            }
            Node::Call(f, a) => f.apply(a.eval(z)),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Node::Const(_) => None,
            Node::Var(k) => Some(*k),
            Node::Neg(a) | Node::Call(_, a) => a.max_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Expr> {
        let tokens = tokenize(source)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input in {source:?} at token {}",
                p.pos
            )));
        }
        Ok(Expr {
            source: source.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Number of coordinates referenced (highest index used).
    pub fn dimension(&self) -> usize {
        self.root.max_var().map_or(0, |k| k + 1)
    }

    pub fn eval(&self, z: &CVector) -> Complex64 {
        self.root.eval(z)
    }

    /// Real part of the value; the convention for real fields.
    pub fn eval_real(&self, z: &CVector) -> f64 {
        self.eval(z).re
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
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
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {text:?}")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Token::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Token::RParen);
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Node::Const(Complex64::new(v, 0.0))),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            Some(Token::Ident(name)) => {
                if let Some(f) = Func::from_name(&name) {
                    match self.next() {
                        Some(Token::LParen) => {}
                        _ => return Err(Error::Parse(format!("expected '(' after {name}"))),
                    }
                    let arg = self.expr()?;
                    match self.next() {
                        Some(Token::RParen) => Ok(Node::Call(f, Box::new(arg))),
                        _ => Err(Error::Parse(format!("missing ')' after argument of {name}"))),
                    }
                } else if name == "i" {
                    Ok(Node::Const(Complex64::new(0.0, 1.0)))
                } else if name == "pi" {
                    Ok(Node::Const(Complex64::new(std::f64::consts::PI, 0.0)))
                } else if let Some(idx) = name.strip_prefix('z').and_then(|s| s.parse::<usize>().ok()) {
                    if idx == 0 {
                        return Err(Error::Parse("coordinates are numbered from z1".into()));
                    }
                    Ok(Node::Var(idx - 1))
                } else {
                    Err(Error::Parse(format!("unknown identifier {name:?}")))
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}
