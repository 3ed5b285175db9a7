//! Drift laws written as small arithmetic expressions in the variable `x`.
//!
//! Grammar (operator binding from loosest to tightest):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          // right-associative
//! atom  := NUMBER | 'x' | IDENT '(' expr ')' | '(' expr ')'
//! IDENT := exp | sin | cos | tanh | abs
//! ```
//!
//! `^` binds tighter than unary minus, so `-2^2` is `-(2^2)` and `2^3^2` is `2^9`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Tanh,
    Abs,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Exp, Func::Sin, Func::Cos, Func::Tanh, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tanh => "tanh",
            Func::Abs => "abs",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply<T: Real>(self, v: T) -> T {
        match self {
            Func::Exp => v.exp(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tanh => v.tanh(),
            Func::Abs => v.abs(),
        }
    }
}

/// Expression tree. Literals are stored in `f64` regardless of the evaluation scalar.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    // Printing precedence; a negative literal prints like a negation.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if v.is_sign_negative() => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Var | Expr::Call(..) => 5,
        }
    }

    /// Evaluates the tree at `x`. Division by zero and non-finite intermediates are errors.
    pub fn eval<T: Real>(&self, x: T) -> Result<T, EvalError> {
        let v = match self {
            Expr::Num(c) => T::from_f64(*c).ok_or(EvalError::NonFinite)?,
            Expr::Var => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == T::zero() {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(x)?),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Binary(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    /// Replaces every variable-free subtree by its value. Subtrees whose evaluation
    /// fails (e.g. `1/0`) are kept as written.
    pub fn fold_constants(&self) -> Expr {
        if self.is_constant() {
            if let Ok(v) = self.eval::<f64>(0.0) {
                return Expr::Num(v);
            }
        }
        match self {
            Expr::Num(_) | Expr::Var => self.clone(),
            Expr::Neg(e) => Expr::negate(e.fold_constants()),
            Expr::Call(f, e) => Expr::call(*f, e.fold_constants()),
            Expr::Binary(op, l, r) => Expr::bin(*op, l.fold_constants(), r.fold_constants()),
        }
    }

    // Structural a*x + b recognition on an already folded tree.
    fn affine_of_folded(&self) -> Option<Affine> {
        let aff = match self {
            Expr::Num(c) => Affine {
                slope: 0.0,
                intercept: *c,
            },
            Expr::Var => Affine {
                slope: 1.0,
                intercept: 0.0,
            },
            Expr::Neg(e) => {
                let a = e.affine_of_folded()?;
                Affine {
                    slope: -a.slope,
                    intercept: -a.intercept,
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.affine_of_folded()?;
                let b = r.affine_of_folded()?;
                match op {
                    BinOp::Add => Affine {
                        slope: a.slope + b.slope,
                        intercept: a.intercept + b.intercept,
                    },
                    BinOp::Sub => Affine {
                        slope: a.slope - b.slope,
                        intercept: a.intercept - b.intercept,
                    },
                    BinOp::Mul if a.slope == 0.0 => Affine {
                        slope: a.intercept * b.slope,
                        intercept: a.intercept * b.intercept,
                    },
                    BinOp::Mul if b.slope == 0.0 => Affine {
                        slope: a.slope * b.intercept,
                        intercept: a.intercept * b.intercept,
                    },
                    BinOp::Div if b.slope == 0.0 && b.intercept != 0.0 => Affine {
                        slope: a.slope / b.intercept,
                        intercept: a.intercept / b.intercept,
                    },
                    BinOp::Pow if b.slope == 0.0 && b.intercept == 1.0 => a,
                    _ => return None,
                }
            }
            Expr::Call(..) => return None,
        };
        (aff.slope.is_finite() && aff.intercept.is_finite()).then_some(aff)
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => f.write_str("x"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_child(f, e.precedence() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(BinOp::Pow, l, r) => {
                l.fmt_child(f, l.precedence() <= 4)?;
                f.write_str("^")?;
                r.fmt_child(f, r.precedence() < 3)
            }
            Expr::Binary(op, l, r) => {
                let p = self.precedence();
                l.fmt_child(f, l.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_child(f, r.precedence() <= p)
            }
        }
    }
}

/// `slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub slope: f64,
    pub intercept: f64,
}

impl Affine {
    /// Zero of the drift, `-intercept / slope`, when the slope is non-zero.
    pub fn fixed_point(&self) -> Option<f64> {
        (self.slope != 0.0).then(|| -self.intercept / self.slope)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite value (overflow or domain error)")]
    NonFinite,
}

/// A parsed drift law `A_s(x)`, with its affine form cached when it has one.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftExpr {
    ast: Expr,
    affine: Option<Affine>,
}

impl DriftExpr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Parser::new(text).parse().map(Self::from_ast)
    }

    pub fn from_ast(ast: Expr) -> Self {
        let affine = ast.fold_constants().affine_of_folded();
        DriftExpr { ast, affine }
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn affine(&self) -> Option<Affine> {
        self.affine
    }

    pub fn eval<T: Real>(&self, x: T) -> Result<T, EvalError> {
        self.ast.eval(x)
    }
}

impl fmt::Display for DriftExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

impl FromStr for DriftExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DriftExpr::parse(s)
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
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
    lex_error: Option<ParseError>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let mut p = Parser {
            src,
            pos: 0,
            tok: Tok::End,
            tok_start: 0,
            lex_error: None,
        };
        p.advance();
        p
    }

    fn syntax(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            offset,
            message: message.into(),
        }
    }

    fn advance(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos >= bytes.len() {
            self.tok = Tok::End;
            return;
        }
        let c = bytes[self.pos];
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            self.tok = t;
            return;
        }
        if c.is_ascii_digit() || c == b'.' {
            self.lex_number();
            return;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            self.tok = Tok::Ident(self.src[start..self.pos].to_string());
            return;
        }
        let ch = self.src[self.pos..].chars().next().unwrap_or('?');
        self.lex_error = Some(self.syntax(self.pos, format!("unexpected character `{ch}`")));
        self.tok = Tok::End;
    }

    fn lex_number(&mut self) {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let digits = |p: &mut usize| {
            let s = *p;
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
            *p - s
        };
        let mut p = self.pos;
        let mut n = digits(&mut p);
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            n += digits(&mut p);
        }
        if n == 0 {
            self.lex_error = Some(self.syntax(start, "malformed number"));
            self.tok = Tok::End;
            return;
        }
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) == 0 {
                self.lex_error = Some(self.syntax(p, "malformed exponent"));
                self.tok = Tok::End;
                return;
            }
            p = q;
        }
        self.pos = p;
        match self.src[start..p].parse::<f64>() {
            Ok(v) if v.is_finite() => self.tok = Tok::Num(v),
            _ => {
                self.lex_error = Some(self.syntax(start, "number literal out of range"));
                self.tok = Tok::End;
            }
        }
    }

    fn check_lex(&mut self) -> Result<(), ParseError> {
        match self.lex_error.take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    fn bump(&mut self) -> Result<Tok, ParseError> {
        self.check_lex()?;
        let t = std::mem::replace(&mut self.tok, Tok::End);
        self.advance();
        Ok(t)
    }

    fn parse(mut self) -> Result<Expr, ParseError> {
        self.check_lex()?;
        if self.tok == Tok::End {
            return Err(ParseError::Empty);
        }
        let e = self.expr()?;
        self.check_lex()?;
        if self.tok != Tok::End {
            return Err(self.syntax(self.tok_start, format!("unexpected {}", self.tok.describe())));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            self.check_lex()?;
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            self.check_lex()?;
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.check_lex()?;
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(Expr::negate(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        self.check_lex()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exponent = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.tok_start;
        match self.bump()? {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen(start)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.check_lex()?;
                if self.tok == Tok::LParen {
                    let func = Func::lookup(&name).ok_or(ParseError::UnknownFunction { offset: start, name })?;
                    self.bump()?;
                    let arg = self.expr()?;
                    self.expect_rparen(start)?;
                    Ok(Expr::call(func, arg))
                } else if name == "x" {
                    Ok(Expr::Var)
                } else {
                    Err(ParseError::UnknownIdentifier { offset: start, name })
                }
            }
            Tok::End => Err(self.syntax(start, "unexpected end of input")),
            other => Err(self.syntax(start, format!("unexpected {}", other.describe()))),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ParseError> {
        self.check_lex()?;
        if self.tok == Tok::RParen {
            self.bump()?;
            Ok(())
        } else {
            Err(self.syntax(
                self.tok_start,
                format!(
                    "expected `)` to close `(` at byte {open}, found {}",
                    self.tok.describe()
                ),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Expr {
        DriftExpr::parse(s).unwrap().ast().clone()
    }

    fn ev(s: &str, x: f64) -> f64 {
        DriftExpr::parse(s).unwrap().eval(x).unwrap()
    }

    #[test]
    fn relaxation_drift_shape() {
        let expected = Expr::bin(
            BinOp::Add,
            Expr::bin(BinOp::Mul, Expr::negate(Expr::num(0.001)), Expr::Var),
            Expr::num(1.0),
        );
        assert_eq!(p("-0.001*x + 1"), expected);
        assert_eq!(p("x"), Expr::Var);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("1 - 2 - 3", 0.0), -4.0);
        assert_eq!(ev("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("--x", 3.0), 3.0);
        assert_eq!(ev("2*-x", 3.0), -6.0);
        assert_eq!(ev("abs(x - 5)", 3.0), 2.0);
        assert_eq!(ev("1.5e1", 0.0), 15.0);
        assert_eq!(ev(".5", 0.0), 0.5);
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(ev("-0.001*x + 2", 2000.0), 0.0);
        assert_eq!(ev("0", 17.0), 0.0);
        assert_eq!(ev("-x+1", 0.0), 1.0);
    }

    #[test]
    fn eval_errors() {
        let d = DriftExpr::parse("1/x").unwrap();
        assert_eq!(d.eval(0.0), Err(EvalError::DivisionByZero));
        let d = DriftExpr::parse("exp(x)").unwrap();
        assert_eq!(d.eval(1000.0), Err(EvalError::NonFinite));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        assert_eq!(DriftExpr::parse("  "), Err(ParseError::Empty));
        assert_eq!(
            DriftExpr::parse("1 + y"),
            Err(ParseError::UnknownIdentifier {
                offset: 4,
                name: "y".into()
            })
        );
        assert_eq!(
            DriftExpr::parse("log(x)"),
            Err(ParseError::UnknownFunction {
                offset: 0,
                name: "log".into()
            })
        );
        match DriftExpr::parse("1 + * 2") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match DriftExpr::parse("(x + 1") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        match DriftExpr::parse("x $ 1") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            DriftExpr::parse("1e999"),
            Err(ParseError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(DriftExpr::parse("1e"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            DriftExpr::parse("x x"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn affine_detection_after_folding() {
        let a = DriftExpr::parse("-(1e-3)*x + 1").unwrap().affine().unwrap();
        assert_eq!(
            a,
            Affine {
                slope: -1e-3,
                intercept: 1.0
            }
        );
        let a = DriftExpr::parse("(2*3)*(x - 1)/2").unwrap().affine().unwrap();
        assert_eq!(
            a,
            Affine {
                slope: 3.0,
                intercept: -3.0
            }
        );
        let a = DriftExpr::parse("exp(0)*x^1 - cos(0)").unwrap().affine().unwrap();
        assert_eq!(
            a,
            Affine {
                slope: 1.0,
                intercept: -1.0
            }
        );
        assert!(DriftExpr::parse("-tanh(x)").unwrap().affine().is_none());
        assert!(DriftExpr::parse("x*x").unwrap().affine().is_none());
        assert!(DriftExpr::parse("1/x").unwrap().affine().is_none());
        assert_eq!(
            DriftExpr::parse("-x+1").unwrap().affine().unwrap().fixed_point(),
            Some(1.0)
        );
    }

    #[test]
    fn folding_keeps_failing_subtrees() {
        let e = p("x + 1/0").fold_constants();
        assert_eq!(
            e,
            Expr::bin(
                BinOp::Add,
                Expr::Var,
                Expr::bin(BinOp::Div, Expr::num(1.0), Expr::num(0.0))
            )
        );
    }

    #[test]
    fn printing_is_minimal_and_reparses() {
        for (src, printed) in [
            ("-0.001*x + 1", "-0.001 * x + 1"),
            ("2^3^2", "2^3^2"),
            ("(2^3)^2", "(2^3)^2"),
            ("(-2)^2", "(-2)^2"),
            ("-(2^2)", "-2^2"),
            ("1 - (2 - 3)", "1 - (2 - 3)"),
            ("(1 - 2) - 3", "1 - 2 - 3"),
            ("-(x + 1)", "-(x + 1)"),
            ("2^(x+1)", "2^(x + 1)"),
            ("tanh(-x)", "tanh(-x)"),
        ] {
            assert_eq!(p(src).to_string(), printed, "{src}");
            assert_eq!(p(printed), p(src), "{src}");
        }
    }

    #[test]
    fn affine_eval_matches_closed_form() {
        let d = DriftExpr::parse("-0.37*x + 2.5").unwrap();
        let a = d.affine().unwrap();
        for i in 0..1000 {
            let x = -50.0 + 0.1 * i as f64;
            let v: f64 = d.eval(x).unwrap();
            assert_eq!(v, a.slope * x + a.intercept);
        }
    }

    #[test]
    fn f32_evaluation() {
        let d = DriftExpr::parse("-x + 1").unwrap();
        assert_eq!(d.eval(0.5f32).unwrap(), 0.5f32);
    }

    pub(crate) fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..10_000).prop_map(|n| Expr::Num(n as f64 / 100.0)),
            Just(Expr::Var),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Expr::negate),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, l, r)| Expr::bin(op, l, r)),
                (prop::sample::select(Func::ALL.to_vec()), inner).prop_map(|(f, e)| Expr::call(f, e)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let once = p(&e.to_string());
            prop_assert_eq!(&once, &e);
            prop_assert_eq!(p(&once.to_string()), once);
        }

        #[test]
        fn affine_eval_is_exact(slope in -10.0f64..10.0, intercept in -100.0f64..100.0, x in -1e3f64..1e3) {
            let d = DriftExpr::parse(&format!("{slope}*x + {intercept}")).unwrap();
            let a = d.affine().unwrap();
            prop_assert_eq!(a.slope, slope);
            prop_assert_eq!(a.intercept, intercept);
            prop_assert_eq!(d.eval(x).unwrap(), slope * x + intercept);
        }
    }
}
