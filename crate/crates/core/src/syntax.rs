//! Text syntax for operators and polynomials.
//!
//! ```text
//! EXPR   := ['-'] TERM (('+' | '-') TERM)*
//! TERM   := FACTOR ('*' FACTOR)*
//! FACTOR := BASE ('^' UINT)?
//! BASE   := 'x' | 't' | 'D' | '∂' | 'i' | RATIONAL | '(' EXPR ')'
//! ```
//!
//! `x` is only legal in x-mode; `t` and `i` only in t-mode. Products are
//! taken in the Weyl algebra, so `D*x` parses to `x*D + 1`. The printer
//! emits normal order, grouped by power of `D`, and its output parses back
//! to the same element.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::{imag, GaussianRational, Poly, Rational, Scalar, Var};
use crate::weyl::WeylElement;

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Unexpected { expected: Vec<&'static str>, found: String },
    /// A symbol that belongs to the other variable's mode.
    WrongMode { symbol: String, mode: Var },
    ExponentTooLarge(String),
    InvalidNumber(String),
    NotAPolynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Unexpected { expected, found } => {
                write!(f, "expected one of {}, found {found}", expected.join(", "))
            }
            ParseErrorKind::WrongMode { symbol, mode } => write!(f, "'{symbol}' is not allowed in {mode}-mode"),
            ParseErrorKind::ExponentTooLarge(e) => write!(f, "exponent {e} exceeds {MAX_EXPONENT}"),
            ParseErrorKind::InvalidNumber(n) => write!(f, "invalid number {n}"),
            ParseErrorKind::NotAPolynomial => write!(f, "expected a polynomial, found a differential operator"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { text: String, value: Rational, integer: bool },
    X,
    T,
    D,
    I,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { text, .. } => format!("number {text}"),
            Tok::X => "'x'".into(),
            Tok::T => "'t'".into(),
            Tok::D => "'D'".into(),
            Tok::I => "'i'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const BASE_START: &[&str] = &["'x'", "'t'", "'D'", "'i'", "number", "'('"];

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut text = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() || (d == '/' && !text.contains('/')) {
                    text.push(d);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            let invalid = || ParseError { line: l, column: col, kind: ParseErrorKind::InvalidNumber(text.clone()) };
            let value = match text.split_once('/') {
                Some((n, d)) => {
                    let n: BigInt = n.parse().map_err(|_| invalid())?;
                    let d: BigInt = d.parse().map_err(|_| invalid())?;
                    if d.is_zero() {
                        return Err(invalid());
                    }
                    Rational::new(n, d)
                }
                None => Rational::from_integer(text.parse().map_err(|_| invalid())?),
            };
            let integer = !text.contains('/');
            out.push(Spanned { tok: Tok::Num { text, value, integer }, line: l, column: col });
            continue;
        } else {
            let tok = match c {
                'x' => Tok::X,
                't' => Tok::T,
                'D' | '∂' => Tok::D,
                'i' => Tok::I,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(ParseError {
                        line: l,
                        column: col,
                        kind: ParseErrorKind::Unexpected {
                            expected: BASE_START.iter().chain(&["'+'", "'-'", "'*'", "'^'", "')'"]).copied().collect(),
                            found: format!("'{other}'"),
                        },
                    })
                }
            };
            bump(&mut chars);
            tok
        };
        out.push(Spanned { tok, line: l, column: col });
    }
    out.push(Spanned { tok: Tok::End, line, column });
    Ok(out)
}

type C = GaussianRational;
type W = WeylElement<C>;

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    mode: Var,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError { line: s.line, column: s.column, kind }
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        self.error(ParseErrorKind::Unexpected { expected: expected.to_vec(), found: self.peek().describe() })
    }

    fn expr(&mut self) -> Result<W, ParseError> {
        let negate = *self.peek() == Tok::Minus;
        if negate {
            self.pos += 1;
        }
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<W, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<W, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek().clone() {
            Tok::Num { text, value, integer: true } => {
                let e = value.to_integer().to_u32().filter(|e| *e <= MAX_EXPONENT);
                let Some(e) = e else {
                    return Err(self.error(ParseErrorKind::ExponentTooLarge(text)));
                };
                self.pos += 1;
                Ok(base.pow(e))
            }
            _ => Err(self.unexpected(&["unsigned integer"])),
        }
    }

    fn base(&mut self) -> Result<W, ParseError> {
        let mode = self.mode;
        let wrong_mode = |p: &Self, symbol: &str| {
            p.error(ParseErrorKind::WrongMode { symbol: symbol.into(), mode })
        };
        let out = match self.peek().clone() {
            Tok::X if mode == Var::X => W::variable(mode),
            Tok::X => return Err(wrong_mode(self, "x")),
            Tok::T if mode == Var::T => W::variable(mode),
            Tok::T => return Err(wrong_mode(self, "t")),
            Tok::I if mode == Var::T => W::scalar(mode, imag()),
            Tok::I => return Err(wrong_mode(self, "i")),
            Tok::D => W::derivation(mode),
            Tok::Num { value, .. } => W::scalar(mode, C::from_rational(value)),
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["'+'", "'-'", "'*'", "'^'", "')'"]));
                }
                inner
            }
            _ => return Err(self.unexpected(BASE_START)),
        };
        self.pos += 1;
        Ok(out)
    }
}

/// Parses an operator in the given variable with Gaussian-rational scalars.
pub fn parse(src: &str, mode: Var) -> Result<W, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, mode };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["'+'", "'-'", "'*'", "'^'", "end of input"]));
    }
    Ok(out)
}

/// Parses an x-mode operator; scalars are rational.
pub fn parse_x(src: &str) -> Result<WeylElement<Rational>, ParseError> {
    Ok(parse(src, Var::X)?.to_real().expect("x-mode has no imaginary unit"))
}

pub fn parse_t(src: &str) -> Result<W, ParseError> {
    parse(src, Var::T)
}

/// Parses a polynomial (no `D`) in the given variable.
pub fn parse_poly(src: &str, mode: Var) -> Result<Poly<C>, ParseError> {
    let op = parse(src, mode)?;
    if op.d_order().unwrap_or(0) > 0 {
        return Err(ParseError { line: 1, column: 1, kind: ParseErrorKind::NotAPolynomial });
    }
    let form = op.coefficient_form();
    Ok(form.into_iter().next().unwrap_or_else(|| Poly::zero(mode)))
}

fn power(symbol: &str, n: usize) -> String {
    match n {
        0 => String::new(),
        1 => symbol.to_string(),
        _ => format!("{symbol}^{n}"),
    }
}

fn join_factors(parts: &[&str]) -> String {
    parts.iter().filter(|s| !s.is_empty()).copied().collect::<Vec<_>>().join("*")
}

/// `(negative, magnitude text)` for `c * mono`.
fn signed_piece(c: &C, mono: &str) -> (bool, String) {
    let with = |coef: String| if mono.is_empty() { coef } else { join_factors(&[&coef, mono]) };
    let imag_text = |b: &Rational| if b.is_one() { "i".to_string() } else { format!("{b}*i") };
    if c.im.is_zero() {
        let a = c.re.abs();
        let body = if a.is_one() && !mono.is_empty() { mono.to_string() } else { with(a.to_string()) };
        (c.re.is_negative(), body)
    } else if c.re.is_zero() {
        (c.im.is_negative(), with(imag_text(&c.im.abs())))
    } else {
        let sign = if c.im.is_negative() { "-" } else { "+" };
        (false, with(format!("({} {sign} {})", c.re, imag_text(&c.im.abs()))))
    }
}

fn join_pieces(pieces: &[(bool, String)]) -> String {
    if pieces.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (neg, body)) in pieces.iter().enumerate() {
        match (idx, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(body);
    }
    out
}

fn poly_pieces<S: Scalar>(p: &Poly<S>, suffix: &str) -> Vec<(bool, String)> {
    let name = p.var().name();
    p.coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, c)| signed_piece(&c.to_complex(), &join_factors(&[&power(name, n), suffix])))
        .collect()
}

/// Normal-order text, highest power of `D` first.
pub fn format_operator<S: Scalar>(op: &WeylElement<S>) -> String {
    let form = op.coefficient_form();
    let mut pieces = Vec::new();
    for (k, coeff) in form.iter().enumerate().rev() {
        if coeff.is_zero() {
            continue;
        }
        let d = power("D", k);
        let nonzero = coeff.coeffs().iter().filter(|c| !c.is_zero()).count();
        if nonzero > 1 && k > 0 {
            let inner = join_pieces(&poly_pieces(coeff, ""));
            pieces.push((false, format!("({inner})*{d}")));
        } else {
            pieces.extend(poly_pieces(coeff, &d));
        }
    }
    join_pieces(&pieces)
}

pub fn format_poly<S: Scalar>(p: &Poly<S>) -> String {
    join_pieces(&poly_pieces(p, ""))
}

impl<S: Scalar> fmt::Display for WeylElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_operator(self))
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{gauss, int, rat};
    use crate::weyl::Monomial;
    use proptest::prelude::*;

    #[test]
    fn golden_print() {
        let op = parse_t("(t*D + 2*t^2 - 1)*(t + D)").unwrap();
        assert_eq!(op.to_string(), "t*D^2 + (3*t^2 - 1)*D + 2*t^3");
    }

    #[test]
    fn print_examples() {
        assert_eq!(parse_x("D - x").unwrap().to_string(), "D - x");
        assert_eq!(parse_x("x - D").unwrap().to_string(), "-D + x");
        assert_eq!(parse_x("0").unwrap().to_string(), "0");
        assert_eq!(parse_x("-1/2*x^2").unwrap().to_string(), "-1/2*x^2");
        assert_eq!(parse_t("i*t + D").unwrap().to_string(), "D + i*t");
        assert_eq!(parse_t("(1 + 2*i)*t - 3*i").unwrap().to_string(), "(1 + 2*i)*t - 3*i");
        assert_eq!(parse_t("(-1 - i)*D").unwrap().to_string(), "(-1 - i)*D");
    }

    #[test]
    fn products_are_weyl_products() {
        let expected = WeylElement::from_terms(Var::X, [(Monomial::new(1, 1), int(1)), (Monomial::new(0, 0), int(1))]);
        assert_eq!(parse_x("D*x").unwrap(), expected);
        assert_eq!(parse_x("∂^2").unwrap(), parse_x("D*D").unwrap());
    }

    #[test]
    fn mode_violations() {
        let e = parse("t + D", Var::X).unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        assert!(matches!(e.kind, ParseErrorKind::WrongMode { .. }));
        assert!(matches!(parse("x", Var::T).unwrap_err().kind, ParseErrorKind::WrongMode { .. }));
        assert!(matches!(parse("i*D", Var::X).unwrap_err().kind, ParseErrorKind::WrongMode { .. }));
    }

    #[test]
    fn syntax_errors_report_position() {
        let e = parse_x("D +\n  * x").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        match e.kind {
            ParseErrorKind::Unexpected { expected, found } => {
                assert!(expected.contains(&"'x'"));
                assert_eq!(found, "'*'");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_x("(D").is_err());
        assert!(parse_x("D x").is_err());
        assert!(parse_x("x^").is_err());
        assert!(parse_x("1/0").is_err());
        assert!(matches!(parse_x("x^65").unwrap_err().kind, ParseErrorKind::ExponentTooLarge(_)));
        assert!(parse_x("x^64").is_ok());
        assert!(parse_x("x^1/2").is_err());
    }

    #[test]
    fn poly_parsing() {
        let p = parse_poly("x^2 - 1", Var::X).unwrap();
        assert_eq!(p.to_real().unwrap(), Poly::new(Var::X, vec![int(-1), int(0), int(1)]));
        assert!(matches!(parse_poly("x*D", Var::X).unwrap_err().kind, ParseErrorKind::NotAPolynomial));
        assert_eq!(format_poly(&Poly::new(Var::X, vec![rat(1, 2), int(-3)])), "-3*x + 1/2");
    }

    fn scalar() -> impl Strategy<Value = C> {
        (-4i64..=4, 1i64..=3, -4i64..=4, 1i64..=3).prop_map(|(a, b, c, d)| gauss(rat(a, b), rat(c, d)))
    }

    fn operator(var: Var) -> impl Strategy<Value = W> {
        prop::collection::vec((0usize..4, 0usize..4, scalar()), 0..6).prop_map(move |terms| {
            let terms = terms.into_iter().map(|(n, k, c)| {
                let c = if var == Var::X { gauss(c.re, int(0)) } else { c };
                (Monomial::new(n, k), c)
            });
            WeylElement::from_terms(var, terms)
        })
    }

    proptest! {
        #[test]
        fn round_trip_t(op in operator(Var::T)) {
            prop_assert_eq!(parse_t(&op.to_string()).unwrap(), op);
        }

        #[test]
        fn round_trip_x(op in operator(Var::X)) {
            prop_assert_eq!(parse(&op.to_string(), Var::X).unwrap(), op);
        }
    }
}
