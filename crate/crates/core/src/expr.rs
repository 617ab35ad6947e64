//! Scalar expressions over the coordinates `x` and `y`.
//!
//! Grammar (usual precedence, `^` binds tighter than unary minus and is
//! right associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Identifiers: `x`, `y`, `pi`, `e`. Functions: `sin cos tan exp ln log sqrt
//! abs sign step min max pow`. `step(t)` is 1 for `t >= 0` and 0 otherwise,
//! which is enough to write piecewise exponents.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sign,
    Step,
    Min,
    Max,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            "step" => Func::Step,
            "min" => Func::Min,
            "max" => Func::Max,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn arity(self) -> (usize, usize) {
        match self {
            Func::Min | Func::Max => (2, usize::MAX),
            Func::Pow => (2, 2),
            _ => (1, 1),
        }
    }

    fn apply(self, args: &[f64]) -> f64 {
        let a = args[0];
        match self {
            Func::Sin => math::sin(a),
            Func::Cos => math::cos(a),
            Func::Tan => math::tan(a),
            Func::Exp => math::exp(a),
            Func::Ln => math::ln(a),
            Func::Sqrt => math::sqrt(a),
            Func::Abs => math::abs(a),
            Func::Sign => {
                if a > 0.0 {
                    1.0
                } else if a < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Func::Step => {
                if a >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Func::Min => args.iter().copied().fold(f64::INFINITY, f64::min),
            Func::Max => args.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Func::Pow => math::powf(a, args[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    X,
    Y,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::X => x,
            Node::Y => y,
            Node::Neg(a) => -a.eval(x, y),
            Node::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Node::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Node::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Node::Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Node::Pow(a, b) => math::powf(a.eval(x, y), b.eval(x, y)),
            Node::Call(f, args) => {
                let mut vals = [0.0; 8];
                if args.len() <= vals.len() {
                    for (slot, a) in vals.iter_mut().zip(args) {
                        *slot = a.eval(x, y);
                    }
                    f.apply(&vals[..args.len()])
                } else {
                    let vals: Vec<f64> = args.iter().map(|a| a.eval(x, y)).collect();
                    f.apply(&vals)
                }
            }
        }
    }

    fn mentions(&self, var: &Node) -> bool {
        match self {
            Node::Num(_) => false,
            Node::X | Node::Y => self == var,
            Node::Neg(a) => a.mentions(var),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                a.mentions(var) || b.mentions(var)
            }
            Node::Call(_, args) => args.iter().any(|a| a.mentions(var)),
        }
    }
}

/// A parsed expression; cheap to evaluate repeatedly.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(source)?;
        let mut parser = Parser { tokens, pos: 0, len: source.len() };
        let root = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(ParseError::new(tok.offset, "unexpected trailing input"));
        }
        Ok(Self {
            source: source.to_string(),
            root,
        })
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.root.eval(x, y)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True when the expression does not reference `x` or `y`.
    pub fn is_constant(&self) -> bool {
        !self.root.mentions(&Node::X) && !self.root.mentions(&Node::Y)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
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
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| ParseError::new(start, "malformed number"))?;
                out.push(Token { tok: Tok::Num(v), offset: start });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => return Err(ParseError::new(start, "unexpected character")),
        };
        i += 1;
        out.push(Token { tok, offset: start });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.len, |t| t.offset)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().is_some_and(|t| &t.tok == tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(ParseError::new(self.offset(), alloc::format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(&Tok::Slash) {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if self.eat(&Tok::Caret) {
            let exponent = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let offset = self.offset();
        let Some(token) = self.tokens.get(self.pos).cloned() else {
            return Err(ParseError::new(offset, "unexpected end of expression"));
        };
        self.pos += 1;
        match token.tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.eat(&Tok::LParen) {
                    let func = Func::lookup(&name)
                        .ok_or_else(|| ParseError::new(offset, alloc::format!("unknown function '{name}'")))?;
                    let mut args = alloc::vec![self.expr()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.expr()?);
                    }
                    self.expect(&Tok::RParen, "')'")?;
                    let (lo, hi) = func.arity();
                    if args.len() < lo || args.len() > hi {
                        return Err(ParseError::new(
                            offset,
                            alloc::format!("wrong number of arguments to '{name}'"),
                        ));
                    }
                    return Ok(Node::Call(func, args));
                }
                match name.as_str() {
                    "x" => Ok(Node::X),
                    "y" => Ok(Node::Y),
                    "pi" => Ok(Node::Num(core::f64::consts::PI)),
                    "e" => Ok(Node::Num(core::f64::consts::E)),
                    _ => Err(ParseError::new(offset, alloc::format!("unknown identifier '{name}'"))),
                }
            }
            _ => Err(ParseError::new(offset, "expected a value")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64, y: f64) -> f64 {
        Expr::parse(s).unwrap().eval(x, y)
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1+2*3", 0.0, 0.0), 7.0);
        assert_eq!(ev("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(ev("(1+2)*3", 0.0, 0.0), 9.0);
        assert_eq!(ev("8/2/2", 0.0, 0.0), 2.0);
    }

    #[test]
    fn variables_and_functions() {
        assert!((ev("2+sin(pi*x)/2", 0.5, 0.0) - 2.5).abs() < 1e-15);
        assert_eq!(ev("max(x, y, 0.25)", 0.1, 0.2), 0.25);
        assert_eq!(ev("min(x,y)", 0.1, 0.2), 0.1);
        assert_eq!(ev("2 + 2*step(x-0.5)", 0.7, 0.0), 4.0);
        assert_eq!(ev("2 + 2*step(x-0.5)", 0.3, 0.0), 2.0);
        assert_eq!(ev("abs(-3)", 0.0, 0.0), 3.0);
        assert_eq!(ev("1.5e-1*2", 0.0, 0.0), 0.3);
        assert!(Expr::parse("2.2 + 0.2*x").unwrap().eval(1.0, 0.0) - 2.4 < 1e-15);
    }

    #[test]
    fn constant_detection() {
        assert!(Expr::parse("2*pi").unwrap().is_constant());
        assert!(!Expr::parse("2+y").unwrap().is_constant());
    }

    #[test]
    fn malformed_input_is_rejected() {
        let err = Expr::parse("2+*x").unwrap_err();
        assert_eq!(err.offset, 2);
        assert!(Expr::parse("sin(x").is_err());
        assert!(Expr::parse("foo(x)").is_err());
        assert!(Expr::parse("z").is_err());
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("1 2").is_err());
        assert!(Expr::parse("pow(x)").is_err());
        assert!(Expr::parse("3 $ 4").is_err());
    }
}
