//! Small arithmetic expression language for metric components and scalar
//! fields: `+ - * / ^`, `exp`, `log`, `sin`, `cos`, numeric literals, `pi`,
//! and the coordinate symbols of the chart. Expressions evaluate either to
//! plain values or to order-3 jets.

use crate::error::{Error, Result};
use crate::jet::Jet3;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

#[allow(clippy::should_implement_trait)] // tree builders, not std::ops
impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(idx: usize) -> Expr {
        Expr::Var(idx)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    /// Evaluate to a plain value.
    pub fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => vars[*i],
            Expr::Add(a, b) => a.eval(vars) + b.eval(vars),
            Expr::Sub(a, b) => a.eval(vars) - b.eval(vars),
            Expr::Mul(a, b) => a.eval(vars) * b.eval(vars),
            Expr::Div(a, b) => a.eval(vars) / b.eval(vars),
            Expr::Neg(a) => -a.eval(vars),
            Expr::Pow(a, b) => a.eval(vars).powf(b.eval(vars)),
            Expr::Exp(a) => a.eval(vars).exp(),
            Expr::Log(a) => a.eval(vars).ln(),
            Expr::Sin(a) => a.eval(vars).sin(),
            Expr::Cos(a) => a.eval(vars).cos(),
        }
    }

    /// Evaluate to an order-3 jet; `vars[i]` is the seeded coordinate jet.
    pub fn eval_jet(&self, vars: &[Jet3]) -> Jet3 {
        match self {
            Expr::Const(c) => Jet3::constant(vars[0].dim(), *c),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Add(a, b) => a.eval_jet(vars).add_jet(&b.eval_jet(vars)),
            Expr::Sub(a, b) => a.eval_jet(vars).sub_jet(&b.eval_jet(vars)),
            Expr::Mul(a, b) => a.eval_jet(vars).mul_jet(&b.eval_jet(vars)),
            Expr::Div(a, b) => a.eval_jet(vars).div_jet(&b.eval_jet(vars)),
            Expr::Neg(a) => a.eval_jet(vars).scale(-1.0),
            Expr::Pow(a, b) => {
                let base = a.eval_jet(vars);
                match b.as_ref() {
                    Expr::Const(c) => base.powf(*c),
                    Expr::Neg(inner) => {
                        if let Expr::Const(c) = inner.as_ref() {
                            base.powf(-c)
                        } else {
                            base.ln().mul_jet(&b.eval_jet(vars)).exp()
                        }
                    }
                    _ => base.ln().mul_jet(&b.eval_jet(vars)).exp(),
                }
            }
            Expr::Exp(a) => a.eval_jet(vars).exp(),
            Expr::Log(a) => a.eval_jet(vars).ln(),
            Expr::Sin(a) => a.eval_jet(vars).sin(),
            Expr::Cos(a) => a.eval_jet(vars).cos(),
        }
    }

    /// True when the expression never references `Var(idx)`.
    pub fn independent_of(&self, idx: usize) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(i) => *i != idx,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.independent_of(idx) && b.independent_of(idx)
            }
            Expr::Neg(a) | Expr::Exp(a) | Expr::Log(a) | Expr::Sin(a) | Expr::Cos(a) => {
                a.independent_of(idx)
            }
        }
    }
}

/// Parse `src` against the given coordinate names.
pub fn parse(src: &str, var_names: &[&str]) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        vars: var_names,
        src,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Expr(format!(
            "unexpected trailing input at token {} in `{}`",
            p.pos, src
        )));
    }
    Ok(e)
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

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                    i += 1;
                }
                // Scientific notation tail: e.g. 1.5e-3
                if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = bytes[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::Expr(format!("bad numeric literal `{text}`")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(bytes[start..i].iter().collect()));
            }
            other => return Err(Error::Expr(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.bump() {
            Some(found) if found == t => Ok(()),
            other => Err(Error::Expr(format!(
                "expected {:?}, found {:?} in `{}`",
                t, other, self.src
            ))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    let arg = Box::new(arg);
                    return match name.as_str() {
                        "exp" => Ok(Expr::Exp(arg)),
                        "log" => Ok(Expr::Log(arg)),
                        "sin" => Ok(Expr::Sin(arg)),
                        "cos" => Ok(Expr::Cos(arg)),
                        other => Err(Error::Expr(format!("unknown function `{other}`"))),
                    };
                }
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(idx) => Ok(Expr::Var(idx)),
                    None => Err(Error::Expr(format!(
                        "unknown symbol `{}`; coordinates are {:?}",
                        name, self.vars
                    ))),
                }
            }
            other => Err(Error::Expr(format!(
                "unexpected token {:?} in `{}`",
                other, self.src
            ))),
        }
    }
}
