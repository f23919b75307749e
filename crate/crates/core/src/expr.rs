//! Small arithmetic expression language for scenario potentials and densities.
//!
//! Grammar: numbers, the single variable `x`, the constants `pi` and `e`,
//! binary `+ - * / ^`, unary minus, parentheses and the functions
//! `exp sin cos ln abs`. `^` is right associative and binds tighter than unary minus.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("expression error at column {column}: {message}")]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Ln,
    Abs,
    /// Derivative of `abs`; not reachable from the surface grammar.
    Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if let Some(t) = p.tokens.get(p.pos) {
            return Err(ExprError {
                column: t.column,
                message: format!("unexpected token {:?}", t.kind),
            });
        }
        Ok(e)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match b.as_ref() {
                    Expr::Num(n) if n.fract() == 0.0 && n.abs() < 64.0 => base.powi(*n as i32),
                    other => base.powf(other.eval(x)),
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Ln => v.ln(),
                    Func::Abs => v.abs(),
                    Func::Sign => {
                        if v > 0.0 {
                            1.0
                        } else if v < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
        }
    }

    /// Symbolic derivative with respect to `x`.
    pub fn derivative(&self) -> Expr {
        use Expr::*;
        match self {
            Num(_) => Num(0.0),
            Var => Num(1.0),
            Neg(a) => neg(a.derivative()),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
            Div(a, b) => div(
                sub(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
                pow((**b).clone(), Num(2.0)),
            ),
            Pow(a, b) => {
                if let Num(n) = b.as_ref() {
                    mul(mul(Num(*n), pow((**a).clone(), Num(n - 1.0))), a.derivative())
                } else {
                    // u^v (v' ln u + v u'/u)
                    mul(
                        self.clone(),
                        add(
                            mul(b.derivative(), call(Func::Ln, (**a).clone())),
                            div(mul((**b).clone(), a.derivative()), (**a).clone()),
                        ),
                    )
                }
            }
            Call(f, a) => {
                let inner = a.derivative();
                let outer = match f {
                    Func::Exp => call(Func::Exp, (**a).clone()),
                    Func::Sin => call(Func::Cos, (**a).clone()),
                    Func::Cos => neg(call(Func::Sin, (**a).clone())),
                    Func::Ln => div(Num(1.0), (**a).clone()),
                    Func::Abs => call(Func::Sign, (**a).clone()),
                    Func::Sign => Num(0.0),
                };
                mul(outer, inner)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }
}

fn num_of(e: &Expr) -> Option<f64> {
    if let Expr::Num(v) = e {
        Some(*v)
    } else {
        None
    }
}

fn neg(a: Expr) -> Expr {
    match num_of(&a) {
        Some(v) => Expr::Num(-v),
        None => Expr::Neg(Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (num_of(&a), num_of(&b)) {
        (Some(x), Some(y)) => Expr::Num(x + y),
        (Some(x), None) if x == 0.0 => b,
        (None, Some(y)) if y == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (num_of(&a), num_of(&b)) {
        (Some(x), Some(y)) => Expr::Num(x - y),
        (Some(x), None) if x == 0.0 => neg(b),
        (None, Some(y)) if y == 0.0 => a,
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (num_of(&a), num_of(&b)) {
        (Some(x), Some(y)) => Expr::Num(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Num(0.0),
        (Some(x), None) if x == 1.0 => b,
        (None, Some(y)) if y == 1.0 => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (num_of(&a), num_of(&b)) {
        (Some(x), Some(y)) => Expr::Num(x / y),
        (Some(x), None) if x == 0.0 => Expr::Num(0.0),
        (None, Some(y)) if y == 1.0 => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (num_of(&a), num_of(&b)) {
        (Some(x), Some(y)) => Expr::Num(x.powf(y)),
        (_, Some(y)) if y == 0.0 => Expr::Num(1.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Exp => "exp",
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Ln => "ln",
                    Func::Abs => "abs",
                    Func::Sign => "sign",
                };
                write!(f, "{name}({a})")
            }
        }
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
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let kind = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ if c.is_ascii_digit() || c == '.' => {
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
                let v = text.parse::<f64>().map_err(|_| ExprError {
                    column,
                    message: format!("bad number '{text}'"),
                })?;
                out.push(Token {
                    kind: Tok::Num(v),
                    column,
                });
                continue;
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Token {
                    kind: Tok::Ident(text),
                    column,
                });
                continue;
            }
            _ => {
                return Err(ExprError {
                    column,
                    message: format!("unexpected character '{c}'"),
                })
            }
        };
        out.push(Token { kind, column });
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.column)
            .or_else(|| self.tokens.last().map(|t| t.column + 1))
            .unwrap_or(1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "x" => {
                        self.pos += 1;
                        return Ok(Expr::Var);
                    }
                    "pi" => {
                        self.pos += 1;
                        return Ok(Expr::Num(std::f64::consts::PI));
                    }
                    "e" => {
                        self.pos += 1;
                        return Ok(Expr::Num(std::f64::consts::E));
                    }
                    "exp" => Func::Exp,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "ln" => Func::Ln,
                    "abs" => Func::Abs,
                    _ => return self.err(format!("unknown identifier '{name}'")),
                };
                self.pos += 1;
                if self.peek() != Some(&Tok::LParen) {
                    return self.err(format!("'{name}' must be followed by '('"));
                }
                self.pos += 1;
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            other => self.err(format!("unexpected token {other:?}")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            self.err("expected ')'")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64) -> f64 {
        Expr::parse(s).unwrap().eval(x)
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("2 * -x", 4.0), -8.0);
        assert!((ev("exp(ln(x))", 2.5) - 2.5).abs() < 1e-15);
        assert!((ev("1.5e-1 * 2", 0.0) - 0.3).abs() < 1e-16);
    }

    #[test]
    fn errors_report_column() {
        let e = Expr::parse("1 + foo(x)").unwrap_err();
        assert_eq!(e.column, 5);
        let e = Expr::parse("sin(x").unwrap_err();
        assert!(e.message.contains("')'"));
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("x $ 2").is_err());
        assert!(Expr::parse("1 2").is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            "x^2/2",
            "x",
            "exp(-x^2) * sin(3*x)",
            "ln(1 + x^2)",
            "abs(x)^3",
            "(1 + x^2)^0.5",
            "cos(x) / (2 + sin(x))",
            "2^x",
        ];
        for src in cases {
            let Ok(e) = Expr::parse(src) else { continue };
            let d = e.derivative();
            for &x in &[-1.3, -0.2, 0.4, 1.7] {
                let h = 1e-5;
                let fd = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
                assert!((d.eval(x) - fd).abs() < 1e-7, "{src} at {x}: {} vs {fd}", d.eval(x));
            }
        }
    }
}
