//! Small complex arithmetic expression language used to declare contact-form
//! coefficients in configuration files.
//!
//! Grammar: `+ - * /`, unary minus, parentheses, the functions `exp`, `sin`,
//! `cos`, `conj` and `pow(expr, integer)`, real literals, the imaginary unit
//! `i`, and the variables `z` (base), `w`, `y`, `zeta3` … `zeta<2n>` (fibre).
//! `zeta1` and `zeta2` are accepted as aliases for `w` and `y`.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unexpected character {ch:?} at byte {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unexpected token {found} at byte {pos}, expected {expected}")]
    UnexpectedToken {
        found: String,
        expected: &'static str,
        pos: usize,
    },
    #[error("unknown identifier {0:?}")]
    UnknownIdent(String),
    #[error("pow exponent must be an integer literal")]
    NonIntegerPower,
    #[error("unexpected end of input")]
    UnexpectedEnd,
}

/// Variable slot: base coordinate or fibre coordinate index (0 = w, 1 = y, …).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Base,
    Fiber(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Conj,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e.simplify()),
            Some((t, pos)) => Err(ExprError::UnexpectedToken {
                found: t.to_string(),
                expected: "end of input",
                pos,
            }),
        }
    }

    pub fn constant(c: impl Into<Complex64>) -> Expr {
        Expr::Const(c.into())
    }

    pub fn zero() -> Expr {
        Expr::Const(Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, base: Complex64, fiber: &[Complex64]) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::Base) => base,
            Expr::Var(Var::Fiber(j)) => fiber.get(*j).copied().unwrap_or_default(),
            Expr::Neg(a) => -a.eval(base, fiber),
            Expr::Add(a, b) => a.eval(base, fiber) + b.eval(base, fiber),
            Expr::Sub(a, b) => a.eval(base, fiber) - b.eval(base, fiber),
            Expr::Mul(a, b) => a.eval(base, fiber) * b.eval(base, fiber),
            Expr::Div(a, b) => a.eval(base, fiber) / b.eval(base, fiber),
            Expr::Pow(a, k) => a.eval(base, fiber).powi(*k),
            Expr::Call(f, a) => {
                let v = a.eval(base, fiber);
                match f {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Conj => v.conj(),
                }
            }
        }
    }

    /// Largest fibre index referenced, if any.
    pub fn max_fiber_index(&self) -> Option<usize> {
        match self {
            Expr::Const(_) | Expr::Var(Var::Base) => None,
            Expr::Var(Var::Fiber(j)) => Some(*j),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_fiber_index(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_fiber_index(), b.max_fiber_index()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    /// Wirtinger derivative with respect to `var`. With `anti = false` this is
    /// ∂/∂v, with `anti = true` it is ∂/∂v̄.
    pub fn diff(&self, var: Var, anti: bool) -> Expr {
        use Expr::*;
        let d = match self {
            Const(_) => Expr::zero(),
            Var(v) => {
                if *v == var && !anti {
                    Expr::constant(1.0)
                } else {
                    Expr::zero()
                }
            }
            Neg(a) => Neg(Box::new(a.diff(var, anti))),
            Add(a, b) => Add(Box::new(a.diff(var, anti)), Box::new(b.diff(var, anti))),
            Sub(a, b) => Sub(Box::new(a.diff(var, anti)), Box::new(b.diff(var, anti))),
            Mul(a, b) => Add(
                Box::new(Mul(Box::new(a.diff(var, anti)), b.clone())),
                Box::new(Mul(a.clone(), Box::new(b.diff(var, anti)))),
            ),
            Div(a, b) => Div(
                Box::new(Sub(
                    Box::new(Mul(Box::new(a.diff(var, anti)), b.clone())),
                    Box::new(Mul(a.clone(), Box::new(b.diff(var, anti)))),
                )),
                Box::new(Pow(b.clone(), 2)),
            ),
            Pow(a, k) => {
                if *k == 0 {
                    Expr::zero()
                } else {
                    Mul(
                        Box::new(Mul(
                            Box::new(Expr::constant(*k as f64)),
                            Box::new(Pow(a.clone(), k - 1)),
                        )),
                        Box::new(a.diff(var, anti)),
                    )
                }
            }
            Call(Func::Conj, a) => Call(Func::Conj, Box::new(a.diff(var, !anti))),
            Call(f, a) => {
                let outer = match f {
                    Func::Exp => Call(Func::Exp, a.clone()),
                    Func::Sin => Call(Func::Cos, a.clone()),
                    Func::Cos => Neg(Box::new(Call(Func::Sin, a.clone()))),
                    Func::Conj => unreachable!(),
                };
                Mul(Box::new(outer), Box::new(a.diff(var, anti)))
            }
        };
        d.simplify()
    }

    /// Constant folding and removal of trivial zeros and ones.
    pub fn simplify(self) -> Expr {
        use Expr::*;
        let is_zero = |e: &Expr| matches!(e, Const(c) if *c == Complex64::new(0.0, 0.0));
        let is_one = |e: &Expr| matches!(e, Const(c) if *c == Complex64::new(1.0, 0.0));
        match self {
            Neg(a) => match a.simplify() {
                Const(c) => Const(-c),
                a => Neg(Box::new(a)),
            },
            Add(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (&a, &b) {
                    (Const(x), Const(y)) => Const(x + y),
                    _ if is_zero(&a) => b,
                    _ if is_zero(&b) => a,
                    _ => Add(Box::new(a), Box::new(b)),
                }
            }
            Sub(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (&a, &b) {
                    (Const(x), Const(y)) => Const(x - y),
                    _ if is_zero(&b) => a,
                    _ if is_zero(&a) => Neg(Box::new(b)),
                    _ => Sub(Box::new(a), Box::new(b)),
                }
            }
            Mul(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (&a, &b) {
                    (Const(x), Const(y)) => Const(x * y),
                    _ if is_zero(&a) || is_zero(&b) => Expr::zero(),
                    _ if is_one(&a) => b,
                    _ if is_one(&b) => a,
                    _ => Mul(Box::new(a), Box::new(b)),
                }
            }
            Div(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (&a, &b) {
                    (Const(x), Const(y)) => Const(x / y),
                    _ if is_zero(&a) => Expr::zero(),
                    _ if is_one(&b) => a,
                    _ => Div(Box::new(a), Box::new(b)),
                }
            }
            Pow(a, k) => {
                let a = a.simplify();
                match (&a, k) {
                    (_, 0) => Expr::constant(1.0),
                    (_, 1) => a,
                    (Const(c), k) => Const(c.powi(k)),
                    _ => Pow(Box::new(a), k),
                }
            }
            Call(f, a) => match (f, a.simplify()) {
                (Func::Conj, Const(c)) => Const(c.conj()),
                (Func::Exp, Const(c)) => Const(c.exp()),
                (Func::Sin, Const(c)) => Const(c.sin()),
                (Func::Cos, Const(c)) => Const(c.cos()),
                (f, a) => Call(f, Box::new(a)),
            },
            e => e,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.im == 0.0 {
                    write!(f, "{:?}", c.re)
                } else {
                    write!(f, "({:?} + {:?}*i)", c.re, c.im)
                }
            }
            Expr::Var(Var::Base) => write!(f, "z"),
            Expr::Var(Var::Fiber(0)) => write!(f, "w"),
            Expr::Var(Var::Fiber(1)) => write!(f, "y"),
            Expr::Var(Var::Fiber(j)) => write!(f, "zeta{}", j + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => write!(f, "pow({a}, {k})"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Exp => "exp",
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Conj => "conj",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(x) => write!(f, "{x}"),
            Token::Ident(s) => write!(f, "{s}"),
            Token::Op(c) => write!(f, "{c}"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
            Token::Comma => write!(f, ","),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let bytes = src.as_bytes();
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
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| ExprError::UnexpectedChar { ch: c, pos: start })?;
            out.push((Token::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Ident(src[start..i].to_string()), start));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                ',' => Token::Comma,
                _ => return Err(ExprError::UnexpectedChar { ch: c, pos: i }),
            };
            out.push((tok, i));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<(Token, usize)> {
        self.tokens.get(self.pos).cloned()
    }

    fn next(&mut self) -> Result<(Token, usize), ExprError> {
        let t = self.peek().ok_or(ExprError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Token, expected: &'static str) -> Result<(), ExprError> {
        let (t, pos) = self.next()?;
        if t == want {
            Ok(())
        } else {
            Err(ExprError::UnexpectedToken {
                found: t.to_string(),
                expected,
                pos,
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some((Token::Op(c @ ('+' | '-')), _)) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some((Token::Op(c @ ('*' | '/')), _)) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some((Token::Op('-'), _)) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some((Token::Op('+'), _)) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let (tok, pos) = self.next()?;
        match tok {
            Token::Num(v) => Ok(Expr::constant(v)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(e)
            }
            Token::Ident(name) => self.ident(name),
            t => Err(ExprError::UnexpectedToken {
                found: t.to_string(),
                expected: "number, variable, function or '('",
                pos,
            }),
        }
    }

    fn ident(&mut self, name: String) -> Result<Expr, ExprError> {
        let func = match name.as_str() {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "conj" => Some(Func::Conj),
            _ => None,
        };
        if let Some(func) = func {
            self.expect(Token::LParen, "'('")?;
            let arg = self.expr()?;
            self.expect(Token::RParen, "')'")?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if name == "pow" {
            self.expect(Token::LParen, "'('")?;
            let base = self.expr()?;
            self.expect(Token::Comma, "','")?;
            let neg = matches!(self.peek(), Some((Token::Op('-'), _)));
            if neg {
                self.pos += 1;
            }
            let (tok, _) = self.next()?;
            let k = match tok {
                Token::Num(v) if v.fract() == 0.0 && v.abs() < i32::MAX as f64 => v as i32,
                _ => return Err(ExprError::NonIntegerPower),
            };
            self.expect(Token::RParen, "')'")?;
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
        }
        match name.as_str() {
            "z" => Ok(Expr::Var(Var::Base)),
            "w" | "zeta1" => Ok(Expr::Var(Var::Fiber(0))),
            "y" | "zeta2" => Ok(Expr::Var(Var::Fiber(1))),
            "i" => Ok(Expr::constant(Complex64::new(0.0, 1.0))),
            _ => match name.strip_prefix("zeta").and_then(|d| d.parse::<usize>().ok()) {
                Some(k) if k >= 1 => Ok(Expr::Var(Var::Fiber(k - 1))),
                _ => Err(ExprError::UnknownIdent(name)),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parses_precedence_and_unary_minus() {
        let e = Expr::parse("-y + 2*w*z - 1/2").unwrap();
        let v = e.eval(c(3.0, 0.0), &[c(1.0, 0.0), c(5.0, 0.0)]);
        assert!((v - c(-5.0 + 6.0 - 0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn functions_and_pow() {
        let e = Expr::parse("exp(i*z) + pow(w, 3) + conj(z) + pow(z, -2)").unwrap();
        let z = c(0.3, 0.2);
        let w = c(0.1, -0.4);
        let want = (c(0.0, 1.0) * z).exp() + w.powi(3) + z.conj() + z.powi(-2);
        assert!((e.eval(z, &[w]) - want).norm() < 1e-14);
    }

    #[test]
    fn zeta_indices() {
        let e = Expr::parse("zeta3 * zeta4 + zeta1").unwrap();
        assert_eq!(e.max_fiber_index(), Some(3));
        let v = e.eval(c(0.0, 0.0), &[c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(v, c(7.0, 0.0));
    }

    #[test]
    fn scientific_literals() {
        let e = Expr::parse("1.5e-2 * w").unwrap();
        assert!((e.eval(c(0.0, 0.0), &[c(2.0, 0.0)]) - c(0.03, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(Expr::parse("w $ y"), Err(ExprError::UnexpectedChar { .. })));
        assert!(matches!(Expr::parse("foo"), Err(ExprError::UnknownIdent(_))));
        assert!(matches!(Expr::parse("pow(w, 1.5)"), Err(ExprError::NonIntegerPower)));
        assert!(matches!(Expr::parse("(w"), Err(ExprError::UnexpectedEnd)));
    }

    #[test]
    fn holomorphic_derivative_matches_finite_difference() {
        let e = Expr::parse("exp(z*w) * sin(y) / (2 + z)").unwrap();
        let z = c(0.2, -0.1);
        let fib = [c(0.3, 0.1), c(-0.2, 0.4)];
        let h = 1e-6;
        let dz = e.diff(Var::Base, false).eval(z, &fib);
        let fd = (e.eval(z + h, &fib) - e.eval(z - h, &fib)) / (2.0 * h);
        assert!((dz - fd).norm() < 1e-8);
        let dw = e.diff(Var::Fiber(0), false).eval(z, &fib);
        let fib_p = [fib[0] + h, fib[1]];
        let fib_m = [fib[0] - h, fib[1]];
        let fd = (e.eval(z, &fib_p) - e.eval(z, &fib_m)) / (2.0 * h);
        assert!((dw - fd).norm() < 1e-8);
    }

    #[test]
    fn conj_has_antiholomorphic_derivative_only() {
        let e = Expr::parse("conj(z) * z").unwrap();
        let z = c(0.5, 0.25);
        assert!((e.diff(Var::Base, false).eval(z, &[]) - z.conj()).norm() < 1e-15);
        assert!((e.diff(Var::Base, true).eval(z, &[]) - z).norm() < 1e-15);
    }

    #[test]
    fn display_round_trips_through_parser() {
        let e = Expr::parse("dummy_free(1)").err();
        assert!(e.is_some());
        let e = Expr::parse("-y*z + 0.05*w*pow(y, 2) - conj(zeta3)").unwrap();
        let again = Expr::parse(&e.to_string()).unwrap();
        let z = c(0.1, 0.7);
        let f = [c(0.2, 0.0), c(-0.3, 0.1), c(0.0, 1.0)];
        assert!((e.eval(z, &f) - again.eval(z, &f)).norm() < 1e-15);
    }
}
