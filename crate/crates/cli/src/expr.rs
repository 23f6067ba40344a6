//! Expressions in one variable `x`, lowered to truncated series about a
//! chosen center.
//!
//! Grammar:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? INT)?
//! atom  := INT | 'x' | FUNC '(' expr ')' | '(' expr ')'
//! FUNC  := exp | log | sqrt
//! ```
//!
//! `p/q` literals are ordinary divisions of integers and stay exact.

use std::fmt;

use normal_order::fps::FpsError;
use normal_order::rational::{self, Rational};
use normal_order::Series;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LoweringError {
    #[error("{0}")]
    Series(#[from] FpsError),
    #[error("log needs a unit argument at the center, got constant term {0}")]
    LogOfNonUnit(Rational),
    #[error("sqrt needs a rational square constant term at the center, got {0}")]
    SqrtOfNonSquare(Rational),
    #[error("result carries the irrational factor e^{0}")]
    IrrationalFactor(Rational),
    #[error("sums of terms with different exponential factors are not rational series")]
    MixedExponentials,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(num_bigint::BigInt),
    Ident(String),
    Sym(char),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse().expect("ascii digits");
            out.push((Tok::Int(n), start));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if b"+-*/^()".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().expect("in bounds");
            return Err(ParseError { offset: i, message: format!("unexpected character `{ch}`") });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset(), message: message.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                let Some(n) = n.to_i64().filter(|n| *n <= 4096) else {
                    return Err(ParseError { offset: at, message: "exponent too large".into() });
                };
                Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
            }
            _ => Err(ParseError { offset: at, message: "exponent must be an integer literal".into() }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Num(Rational::from_integer(n))),
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "x" => return Ok(Expr::X),
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    "sqrt" => Func::Sqrt,
                    _ => return Err(ParseError { offset: at, message: format!("unknown identifier `{name}`") }),
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(ParseError { offset: at, message: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(ParseError { offset: at, message: format!("unexpected `{c}`") }),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(e)
}

/// `e^{shift}·series`, which keeps `exp(1)*x` exact until a `log` removes
/// the factor again.
struct Lowered {
    shift: Rational,
    series: Series,
}

impl Lowered {
    fn plain(series: Series) -> Self {
        Lowered { shift: Rational::zero(), series }
    }
}

impl Expr {
    /// Polynomial in `x`: no functions, no negative powers, and divisors
    /// free of `x`.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::X => true,
            Expr::Neg(a) => a.is_polynomial(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.is_polynomial() && b.is_polynomial(),
            Expr::Div(a, b) => a.is_polynomial() && b.is_constant(),
            Expr::Pow(a, n) => *n >= 0 && a.is_polynomial(),
            Expr::Call(..) => false,
        }
    }

    /// Upper bound on the degree of a polynomial expression.
    pub fn degree_bound(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::X => 1,
            Expr::Neg(a) | Expr::Div(a, _) => a.degree_bound(),
            Expr::Add(a, b) | Expr::Sub(a, b) => a.degree_bound().max(b.degree_bound()),
            Expr::Mul(a, b) => a.degree_bound() + b.degree_bound(),
            Expr::Pow(a, n) => a.degree_bound() * n.unsigned_abs() as usize,
            Expr::Call(..) => 0,
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::X => false,
            Expr::Neg(a) | Expr::Pow(a, _) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.is_constant() && b.is_constant(),
            Expr::Call(_, a) => a.is_constant(),
        }
    }

    /// Series in `x - center` known through `x^order`.
    pub fn lower(&self, center: &Rational, order: usize) -> Result<Series, LoweringError> {
        let l = self.lower_inner(center, order)?;
        if !l.shift.is_zero() && !l.series.is_zero() {
            return Err(LoweringError::IrrationalFactor(l.shift));
        }
        Ok(l.series)
    }

    fn lower_inner(&self, center: &Rational, order: usize) -> Result<Lowered, LoweringError> {
        Ok(match self {
            Expr::Num(c) => Lowered::plain(Series::constant(c.clone(), order)),
            Expr::X => Lowered::plain(Series::new(vec![center.clone(), Rational::one()], order)),
            Expr::Neg(a) => {
                let a = a.lower_inner(center, order)?;
                Lowered { shift: a.shift, series: a.series.neg() }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let a = a.lower_inner(center, order)?;
                let mut b = b.lower_inner(center, order)?;
                if matches!(self, Expr::Sub(..)) {
                    b.series = b.series.neg();
                }
                match (a.series.is_zero(), b.series.is_zero()) {
                    (true, _) => b,
                    (_, true) => a,
                    _ if a.shift == b.shift => Lowered { shift: a.shift, series: a.series.add(&b.series) },
                    _ => return Err(LoweringError::MixedExponentials),
                }
            }
            Expr::Mul(a, b) => {
                let a = a.lower_inner(center, order)?;
                let b = b.lower_inner(center, order)?;
                Lowered { shift: a.shift + b.shift, series: a.series.mul(&b.series) }
            }
            Expr::Div(a, b) => {
                let a = a.lower_inner(center, order)?;
                let b = b.lower_inner(center, order)?;
                Lowered { shift: a.shift - b.shift, series: a.series.div(&b.series)? }
            }
            Expr::Pow(a, n) => {
                let a = a.lower_inner(center, order)?;
                let shift = &a.shift * rational::int(*n);
                let e = n.unsigned_abs() as usize;
                let p = a.series.pow(e);
                Lowered { shift, series: if *n < 0 { p.recip()? } else { p } }
            }
            Expr::Call(func, a) => {
                let a = a.lower_inner(center, order)?;
                lower_call(*func, a)?
            }
        })
    }
}

fn lower_call(func: Func, a: Lowered) -> Result<Lowered, LoweringError> {
    let order = a.series.order();
    match func {
        Func::Exp => {
            if !a.shift.is_zero() {
                return Err(LoweringError::IrrationalFactor(a.shift));
            }
            // exp(c + s) = e^c·exp(s)
            let c = a.series.constant_term().clone();
            let s = a.series.sub(&Series::constant(c.clone(), order));
            Ok(Lowered { shift: c, series: s.exp()? })
        }
        Func::Log => {
            // log(e^k·s) = k + log(s), s(0) = 1
            let c0 = a.series.constant_term().clone();
            if !c0.is_one() {
                return Err(LoweringError::LogOfNonUnit(c0));
            }
            let log = a.series.log()?;
            Ok(Lowered::plain(log.add(&Series::constant(a.shift, log.order()))))
        }
        Func::Sqrt => {
            let c0 = a.series.constant_term().clone();
            let root = rational::exact_sqrt(&c0)
                .filter(|r| !r.is_zero() && r.is_positive())
                .ok_or_else(|| LoweringError::SqrtOfNonSquare(c0.clone()))?;
            let unit = a.series.scale(&(Rational::one() / &c0));
            let s = unit.pow_rational(&rational::ratio(1, 2))?.scale(&root);
            Ok(Lowered { shift: a.shift / rational::int(2), series: s })
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::X => f.write_str("x"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, n) => write!(f, "({a})^{n}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use normal_order::fps::elementary;
    use normal_order::rational::{int, ratio};

    fn lower(text: &str, center: i64, order: usize) -> Result<Series, LoweringError> {
        parse_expr(text).unwrap().lower(&int(center), order)
    }

    #[test]
    fn parses_precedence() {
        assert_eq!(lower("1 + 2*x^2", 0, 4).unwrap(), Series::from_ints(&[1, 0, 2], 4));
        assert_eq!(lower("-x^2", 0, 3).unwrap(), Series::from_ints(&[0, 0, -1], 3));
        assert_eq!(lower("3/4", 0, 2).unwrap(), Series::constant(ratio(3, 4), 2));
        assert_eq!(lower("(1 - x)^-2", 0, 4).unwrap(), Series::from_ints(&[1, 2, 3, 4, 5], 4));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        assert_eq!(parse_expr("1 + ").unwrap_err().offset, 4);
        assert_eq!(parse_expr("x $ 2").unwrap_err().offset, 2);
        assert_eq!(parse_expr("sin(x)").unwrap_err().offset, 0);
        assert_eq!(parse_expr("(x").unwrap_err().offset, 2);
        assert_eq!(parse_expr("x^x").unwrap_err().offset, 2);
        assert_eq!(parse_expr("x x").unwrap_err().offset, 2);
    }

    #[test]
    fn operator_examples() {
        assert_eq!(lower("x^2", 0, 3).unwrap(), Series::from_ints(&[0, 0, 1], 3));
        // 1/(2 - x) about 1 is the geometric series in x - 1
        assert_eq!(lower("1/(2-x)", 1, 6).unwrap(), elementary::geometric(6));
    }

    #[test]
    fn log_needs_a_unit() {
        assert!(matches!(lower("x*log(exp(1)*x)", 0, 5), Err(LoweringError::LogOfNonUnit(_))));
        // about 1: (1 + y)(1 + log(1 + y))
        let want = Series::from_ints(&[1, 1], 5).mul(&Series::one(5).add(&elementary::log1p(5)));
        assert_eq!(lower("x*log(exp(1)*x)", 1, 5).unwrap(), want);
    }

    #[test]
    fn exponential_factors() {
        assert_eq!(lower("exp(x)", 0, 5).unwrap(), elementary::exp_x(5));
        assert!(matches!(lower("exp(1 + x)", 0, 3), Err(LoweringError::IrrationalFactor(_))));
        assert_eq!(lower("exp(1 + x)*exp(-1)", 0, 3).unwrap(), elementary::exp_x(3));
        assert!(matches!(lower("exp(1) + 1", 0, 3), Err(LoweringError::MixedExponentials)));
    }

    #[test]
    fn square_roots() {
        let s = lower("sqrt(4 - 8*x)", 0, 6).unwrap();
        assert_eq!(s.mul(&s), Series::from_ints(&[4, -8], 6));
        assert!(matches!(lower("sqrt(2 + x)", 0, 3), Err(LoweringError::SqrtOfNonSquare(_))));
        assert!(matches!(lower("sqrt(x)", 0, 3), Err(LoweringError::SqrtOfNonSquare(_))));
    }

    #[test]
    fn polynomial_detection() {
        assert!(parse_expr("1 + x^3/2").unwrap().is_polynomial());
        assert!(!parse_expr("1/(1-x)").unwrap().is_polynomial());
        assert!(!parse_expr("exp(x)").unwrap().is_polynomial());
        assert!(!parse_expr("x^-1").unwrap().is_polynomial());
    }

    #[test]
    fn division_by_non_unit() {
        assert!(matches!(lower("1/x", 0, 3), Err(LoweringError::Series(FpsError::DivisionByNonUnit))));
        assert_eq!(lower("1/x", 1, 3).unwrap(), elementary::geometric(3).compose(&Series::x(3).neg()).unwrap());
    }
}
