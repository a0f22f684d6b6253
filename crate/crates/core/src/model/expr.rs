//! Expression trees for user-supplied nonlinearities.
//!
//! Grammar (recursive descent, `^` binds tighter than unary minus and is
//! right-associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | variable | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | abs
//! ```
//!
//! `-u^2` therefore reads as `-(u^2)` and `2^-1` as `2^(-1)`.

use std::fmt;

use thiserror::Error;

/// Variables an expression may reference. `R` and `X` both name the spatial
/// coordinate; they differ only in how they are printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    R,
    X,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::R => "r",
            Var::X => "x",
        }
    }

    pub fn is_spatial(self) -> bool {
        !matches!(self, Var::U)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    /// Only produced by differentiating `abs`; `sign(0) = 0`.
    Sign,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Abs => x.abs(),
            Func::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected token '{0}'")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("malformed number '{0}'")]
    BadNumber(String),
}

/// Syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

impl Expr {
    /// Parses `text`, accepting only the variables in `vars`; `pi` is a
    /// built-in constant.
    pub fn parse(text: &str, vars: &[Var]) -> Result<Expr, ParseError> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            vars,
            end: text.len(),
        };
        let expr = parser.expr()?;
        match parser.peek() {
            None => Ok(expr),
            Some((tok, at)) => Err(ParseError {
                kind: ParseErrorKind::UnexpectedToken(tok.to_string()),
                position: at,
            }),
        }
    }

    /// Evaluates with `s` bound to the spatial variable (`r` or `x`).
    pub fn eval(&self, s: f64, u: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::U) => u,
            Expr::Var(_) => s,
            Expr::Neg(a) => -a.eval(s, u),
            Expr::Add(a, b) => a.eval(s, u) + b.eval(s, u),
            Expr::Sub(a, b) => a.eval(s, u) - b.eval(s, u),
            Expr::Mul(a, b) => a.eval(s, u) * b.eval(s, u),
            Expr::Div(a, b) => a.eval(s, u) / b.eval(s, u),
            Expr::Pow(a, b) => pow(a.eval(s, u), b.eval(s, u)),
            Expr::Call(f, a) => f.apply(a.eval(s, u)),
        }
    }

    pub fn uses(&self, pred: &dyn Fn(Var) -> bool) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => pred(*v),
            Expr::Neg(a) | Expr::Call(_, a) => a.uses(pred),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.uses(pred) || b.uses(pred)
            }
        }
    }

    pub fn uses_spatial(&self) -> bool {
        self.uses(&|v| v.is_spatial())
    }

    fn is_constant(&self) -> bool {
        !self.uses(&|_| true)
    }

    /// Symbolic derivative. `spatial = true` differentiates with respect to
    /// the spatial variable, otherwise with respect to `u`.
    pub fn derivative(&self, spatial: bool) -> Expr {
        let is_target = |v: Var| v.is_spatial() == spatial;
        match self {
            Expr::Num(_) => num(0.0),
            Expr::Var(v) => num(if is_target(*v) { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.derivative(spatial)),
            Expr::Add(a, b) => add(a.derivative(spatial), b.derivative(spatial)),
            Expr::Sub(a, b) => sub(a.derivative(spatial), b.derivative(spatial)),
            Expr::Mul(a, b) => add(
                mul(a.derivative(spatial), (**b).clone()),
                mul((**a).clone(), b.derivative(spatial)),
            ),
            Expr::Div(a, b) => {
                let da = a.derivative(spatial);
                let db = b.derivative(spatial);
                sub(
                    div(da, (**b).clone()),
                    div(mul((**a).clone(), db), powc((**b).clone(), 2.0)),
                )
            }
            Expr::Pow(a, b) => {
                let da = a.derivative(spatial);
                if b.is_constant() {
                    let e = b.eval(0.0, 0.0);
                    mul(mul(num(e), powc((**a).clone(), e - 1.0)), da)
                } else if a.is_constant() {
                    let db = b.derivative(spatial);
                    mul(mul(self.clone(), call(Func::Log, (**a).clone())), db)
                } else {
                    let db = b.derivative(spatial);
                    mul(
                        self.clone(),
                        add(
                            mul(db, call(Func::Log, (**a).clone())),
                            div(mul((**b).clone(), da), (**a).clone()),
                        ),
                    )
                }
            }
            Expr::Call(f, a) => {
                let da = a.derivative(spatial);
                let inner = (**a).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Exp => call(Func::Exp, inner),
                    Func::Log => div(num(1.0), inner),
                    Func::Abs => call(Func::Sign, inner),
                    Func::Sign => num(0.0),
                };
                mul(outer, da)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(v) if *v < 0.0 => 3,
            _ => 5,
        }
    }
}

fn pow(base: f64, exp: f64) -> f64 {
    if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
        base.powi(exp as i32)
    } else {
        base.powf(exp)
    }
}

// Smart constructors: fold constants and drop neutral elements so derivative
// trees stay small.

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn as_num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        _ => None,
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => num(-v),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => num(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => num(x / y),
        (Some(x), _) if x == 0.0 => num(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn powc(a: Expr, e: f64) -> Expr {
    if e == 0.0 {
        num(1.0)
    } else if e == 1.0 {
        a
    } else if let Some(x) = as_num(&a) {
        num(pow(x, e))
    } else {
        Expr::Pow(Box::new(a), Box::new(num(e)))
    }
}

fn call(f: Func, a: Expr) -> Expr {
    match as_num(&a) {
        Some(x) => num(f.apply(x)),
        None => Expr::Call(f, Box::new(a)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Parenthesise so that re-parsing yields the identical tree.
        let wrap = |out: &mut fmt::Formatter<'_>, e: &Expr, parens: bool| {
            if parens {
                write!(out, "({e})")
            } else {
                write!(out, "{e}")
            }
        };
        match self {
            Expr::Num(v) => {
                if *v < 0.0 {
                    write!(out, "-{:?}", -v)
                } else {
                    write!(out, "{v:?}")
                }
            }
            Expr::Var(v) => write!(out, "{}", v.name()),
            Expr::Neg(a) => {
                write!(out, "-")?;
                wrap(out, a, a.precedence() < 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, prec) = match self {
                    Expr::Add(..) => (" + ", 1),
                    Expr::Sub(..) => (" - ", 1),
                    Expr::Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                wrap(out, a, a.precedence() < prec)?;
                write!(out, "{op}")?;
                wrap(out, b, b.precedence() <= prec)
            }
            Expr::Pow(a, b) => {
                wrap(out, a, a.precedence() <= 4)?;
                write!(out, "^")?;
                wrap(out, b, b.precedence() < 3)
            }
            Expr::Call(f, a) => write!(out, "{}({a})", f.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

impl fmt::Display for Token {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(v) => write!(out, "{v}"),
            Token::Ident(s) => write!(out, "{s}"),
            Token::Op(c) => write!(out, "{c}"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
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
            let lit = &text[start..i];
            let value = lit.parse::<f64>().map_err(|_| ParseError {
                kind: ParseErrorKind::BadNumber(lit.to_string()),
                position: start,
            })?;
            out.push((Token::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Ident(text[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Token::Op(c), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or(c);
            return Err(ParseError {
                kind: ParseErrorKind::UnexpectedChar(ch),
                position: i,
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    vars: &'a [Var],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<(&Token, usize)> {
        self.tokens.get(self.pos).map(|(t, p)| (t, *p))
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some((Token::Op(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn next(&mut self) -> Result<(Token, usize), ParseError> {
        let item = self.tokens.get(self.pos).cloned().ok_or(ParseError {
            kind: ParseErrorKind::UnexpectedEnd,
            position: self.end,
        })?;
        self.pos += 1;
        Ok(item)
    }

    fn expect_op(&mut self, op: char) -> Result<(), ParseError> {
        match self.next()? {
            (Token::Op(c), _) if c == op => Ok(()),
            (tok, at) => Err(ParseError {
                kind: ParseErrorKind::UnexpectedToken(tok.to_string()),
                position: at,
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.next()? {
            (Token::Num(v), _) => Ok(Expr::Num(v)),
            (Token::Op('('), _) => {
                let inner = self.expr()?;
                self.expect_op(')')?;
                Ok(inner)
            }
            (Token::Ident(name), at) => {
                if let Some(f) = Func::from_name(&name) {
                    self.expect_op('(')?;
                    let arg = self.expr()?;
                    self.expect_op(')')?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                let var = match name.as_str() {
                    "u" => Some(Var::U),
                    "r" => Some(Var::R),
                    "x" => Some(Var::X),
                    _ => None,
                };
                match var {
                    Some(v) if self.vars.contains(&v) => Ok(Expr::Var(v)),
                    _ => Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        position: at,
                    }),
                }
            }
            (tok, at) => Err(ParseError {
                kind: ParseErrorKind::UnexpectedToken(tok.to_string()),
                position: at,
            }),
        }
    }
}
