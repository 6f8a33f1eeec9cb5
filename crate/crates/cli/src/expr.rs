//! Arithmetic expressions in `x`, turned into [`TargetFunction`]s.
//!
//! Grammar (`^` binds tighter than unary minus and is right-associative):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'x' | 'pi' | 'e' | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```

use std::sync::Arc;

use qbs_core::{builtins, TargetFunction};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] qbs_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        if self == Func::Pow {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    X,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::X => x,
            Node::Neg(a) => -a.eval(x),
            Node::Add(a, b) => a.eval(x) + b.eval(x),
            Node::Sub(a, b) => a.eval(x) - b.eval(x),
            Node::Mul(a, b) => a.eval(x) * b.eval(x),
            Node::Div(a, b) => a.eval(x) / b.eval(x),
            Node::Pow(a, b) => a.eval(x).powf(b.eval(x)),
            Node::Call(f, args) => {
                let v = args[0].eval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Abs => v.abs(),
                    Func::Sqrt => v.sqrt(),
                    Func::Pow => v.powf(args[1].eval(x)),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when digits follow, so `2e` stays `2` then `e`
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
            let text: String = chars[start - 1..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| ExprError::Syntax {
                pos: start,
                msg: format!("bad number `{text}`"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start - 1..i].iter().collect())));
        } else if "+-*/^(),".contains(c) {
            out.push((start, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ExprError::Syntax {
                pos: start,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        match tok {
            Tok::Num(v) => {
                self.at += 1;
                Ok(Node::Num(v))
            }
            Tok::Op('(') => {
                self.at += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                match name.as_str() {
                    "x" => {
                        self.at += 1;
                        return Ok(Node::X);
                    }
                    "pi" => {
                        self.at += 1;
                        return Ok(Node::Num(std::f64::consts::PI));
                    }
                    "e" => {
                        self.at += 1;
                        return Ok(Node::Num(std::f64::consts::E));
                    }
                    _ => {}
                }
                let Some(func) = Func::lookup(&name) else {
                    return self.err(format!("unknown name `{name}`"));
                };
                self.at += 1;
                self.expect('(')?;
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if args.len() != func.arity() {
                    return self.err(format!(
                        "`{name}` takes {} argument(s), got {}",
                        func.arity(),
                        args.len()
                    ));
                }
                self.expect(')')?;
                Ok(Node::Call(func, args))
            }
            Tok::Op(c) => self.err(format!("unexpected `{c}`")),
        }
    }
}

fn parse(src: &str) -> Result<Node, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.chars().count() + 1,
    };
    let node = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(node)
}

/// Finite-difference step for parsed expressions.
pub const FD_STEP: f64 = 1e-5;
const LIPSCHITZ_GRID: usize = 2001;

/// Central differences, switching to one-sided ones within a step of the
/// ends of `[0, 1]`.
fn first_difference(f: &(dyn Fn(f64) -> f64 + Send + Sync), x: f64) -> f64 {
    let h = FD_STEP;
    if x - h < 0.0 {
        (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
    } else if x + h > 1.0 {
        (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h)
    } else {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }
}

fn second_difference(f: &(dyn Fn(f64) -> f64 + Send + Sync), x: f64) -> f64 {
    let h = FD_STEP;
    let c = if x - h < 0.0 {
        x + h
    } else if x + h > 1.0 {
        x - h
    } else {
        x
    };
    (f(c + h) - 2.0 * f(c) + f(c - h)) / (h * h)
}

fn lipschitz_estimate(f: &TargetFunction) -> f64 {
    let last = (LIPSCHITZ_GRID - 1) as f64;
    let vals: Vec<f64> = (0..LIPSCHITZ_GRID)
        .map(|i| f.eval(i as f64 / last))
        .collect();
    vals.windows(2)
        .map(|w| (w[1] - w[0]).abs() * last)
        .fold(0.0, f64::max)
}

/// A built-in name or an expression in `x`.
///
/// Parsed expressions get finite-difference derivatives (flagged as
/// approximate) and a Lipschitz constant estimated as the largest secant
/// slope on a 2001-point grid, with exponent 1.
pub fn parse_function(src: &str) -> Result<TargetFunction, ExprError> {
    let src = src.trim();
    if let Some(f) = builtins::by_name(src) {
        return Ok(f);
    }
    let node = Arc::new(parse(src)?);
    let eval: Arc<dyn Fn(f64) -> f64 + Send + Sync> = {
        let node = node.clone();
        Arc::new(move |x| node.eval(x))
    };
    let (e0, e1, e2) = (eval.clone(), eval.clone(), eval);
    let f = TargetFunction::new(src, move |x| e0(x))?
        .with_d1(move |x| first_difference(&*e1, x))
        .with_d2(move |x| second_difference(&*e2, x))
        .with_approximate_derivatives(true);
    let m = lipschitz_estimate(&f);
    if m == 0.0 || !m.is_finite() {
        return Ok(f);
    }
    // prefer a tidy constant; fall back to the raw estimate if it is too tight
    let tidy: f64 = format!("{m:.9e}").parse().unwrap_or(m);
    match f.clone().with_lipschitz(tidy, 1.0) {
        Ok(g) => Ok(g),
        Err(_) => Ok(f.with_lipschitz(m, 1.0)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, x: f64) -> f64 {
        parse(src).unwrap().eval(x)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1+2*3", 0.0), 7.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("-x^2", 3.0), -9.0);
        assert_eq!(eval("2^-1", 0.0), 0.5);
        assert_eq!(eval("(1+2)*3", 0.0), 9.0);
        assert_eq!(eval("8/4/2", 0.0), 1.0);
        assert_eq!(eval("1-2-3", 0.0), -4.0);
        assert_eq!(eval("pow(x, 3)", 2.0), 8.0);
        assert_eq!(eval("2.5e-1 + 1E1", 0.0), 10.25);
        assert!(
            (eval("1 - cos(4*exp(x))", 0.3) - (1.0 - (4.0 * 0.3f64.exp()).cos())).abs() < 1e-15
        );
        assert!((eval("sin(pi/2) + e", 0.0) - (1.0 + std::f64::consts::E)).abs() < 1e-15);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let cases = [
            ("1 +", 4),
            ("x $ 2", 3),
            ("foo(x)", 1),
            ("sin(x", 6),
            ("pow(x)", 6),
            ("4e^x", 2),
            ("(x))", 4),
        ];
        for (src, pos) in cases {
            match parse(src) {
                Err(ExprError::Syntax { pos: p, .. }) => assert_eq!(p, pos, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn builtins_take_priority() {
        let f = parse_function("fig6").unwrap();
        assert!(!f.has_approximate_derivatives());
        let d1 = f.require_d1().unwrap();
        let u = 4.0 * 0.2f64.exp();
        assert!((d1(0.2) - u * u.sin()).abs() < 1e-14);
        let id = parse_function("x").unwrap();
        assert_eq!(id.require_d1().unwrap()(0.3), 1.0);
        assert_eq!(id.require_d2().unwrap()(0.3), 0.0);
    }

    #[test]
    fn parsed_functions_get_metadata() {
        let f = parse_function("abs(x-0.5)").unwrap();
        let lip = f.lipschitz().unwrap();
        assert_eq!((lip.m, lip.alpha), (1.0, 1.0));
        assert!(f.has_approximate_derivatives());

        let g = parse_function("sin(3*x)").unwrap();
        let d1 = g.require_d1().unwrap();
        let d2 = g.require_d2().unwrap();
        for x in [0.0, 0.4, 1.0] {
            assert!((d1(x) - 3.0 * (3.0 * x).cos()).abs() < 1e-8);
            assert!((d2(x) + 9.0 * (3.0 * x).sin()).abs() < 1e-3);
        }
        assert!(parse_function("2").unwrap().lipschitz().is_none());
    }

    #[test]
    fn non_finite_expressions_are_rejected() {
        assert!(matches!(parse_function("1/x"), Err(ExprError::Invalid(_))));
        assert!(matches!(
            parse_function("sqrt(x-1)"),
            Err(ExprError::Invalid(_))
        ));
    }
}
