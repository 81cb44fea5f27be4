//! Recursive-descent parser for the equation DSL and `.vie` files.
//!
//! ```text
//! equation := "y(t)" "=" expr
//! expr     := term (("+" | "-") term)*
//! term     := factor (("*" | "/") factor)*
//! factor   := "-" factor | base ("^" INT)?
//! base     := NUMBER | "t" | "s" | "y(s)" | FUNC "(" expr ")" | "(" expr ")"
//!           | "int(" expr "," "s=" NUMBER ".." "t" ")"
//! ```
//!
//! `#` starts a comment. A `.vie` file may open with `key: value` header lines.

use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use super::split::{split_kernel, Equation};
use super::{Expr, Var};
use crate::coeff::{parse_rational, Func};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}: bad header: {message}")]
    Header { line: usize, message: String },
    #[error("non-conforming: multiple integral terms")]
    MultipleIntegrals,
    #[error("non-conforming: integral appears inside `{subtree}`; it must enter linearly")]
    NonLinearIntegral { subtree: String },
    #[error("non-separable kernel: `{subtree}` mixes t with s or y(s)")]
    NonSeparable { subtree: String },
    #[error("`{what}` may only appear inside the integral (found in `{subtree}`)")]
    Misplaced { what: &'static str, subtree: String },
}

/// Optional `.vie` header fields.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Header {
    pub order: Option<usize>,
    pub iters: Option<usize>,
    pub precision: Option<u32>,
    pub label: Option<String>,
    pub backend: Option<String>,
    pub reference: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VieDocument {
    pub header: Header,
    /// Right-hand side exactly as written.
    pub rhs: Expr,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number `{n}`"),
            Tok::Ident(i) => write!(f, "`{i}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                // a '.' is fractional only when not the start of '..'
                if i < chars.len() && chars[i] == '.' && chars.get(i + 1) != Some(&'.') {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Token {
                    tok: Tok::Num(s),
                    line: tl,
                    col: tc,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Token {
                    tok: Tok::Ident(s),
                    line: tl,
                    col: tc,
                });
            }
            _ => {
                let sym = if c == '.' && chars.get(i + 1) == Some(&'.') {
                    ".."
                } else {
                    match c {
                        '+' => "+",
                        '-' => "-",
                        '*' => "*",
                        '/' => "/",
                        '^' => "^",
                        '(' => "(",
                        ')' => ")",
                        ',' => ",",
                        '=' => "=",
                        _ => {
                            return Err(ParseError::Syntax {
                                line,
                                col,
                                message: format!("unexpected character `{c}`"),
                            })
                        }
                    }
                };
                advance(sym.len(), &mut i, &mut col);
                out.push(Token {
                    tok: Tok::Sym(sym),
                    line: tl,
                    col: tc,
                });
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    in_integral: bool,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn unexpected(&self, t: &Token, wanted: &str) -> ParseError {
        self.error_at(t, format!("expected {wanted}, found {}", t.tok))
    }

    fn eat_sym(&mut self, sym: &'static str) -> bool {
        if self.peek().tok == Tok::Sym(sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, sym: &'static str) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(sym) {
            Ok(())
        } else {
            Err(self.unexpected(&t, &format!("`{sym}`")))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<(), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(i) if i == name => Ok(()),
            _ => Err(self.unexpected(&t, &format!("`{name}`"))),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&t, "end of input"))
        }
    }

    fn equation(&mut self) -> Result<Expr, ParseError> {
        self.expect_ident("y")?;
        self.expect_sym("(")?;
        self.expect_ident("t")?;
        self.expect_sym(")")?;
        self.expect_sym("=")?;
        let rhs = self.expr()?;
        self.expect_eof()?;
        Ok(rhs)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat_sym("*") {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat_sym("/") {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat_sym("-") {
            return Ok(match self.factor()? {
                Expr::Const(q) => Expr::Const(-q),
                other => Expr::Neg(Box::new(other)),
            });
        }
        let base = self.base()?;
        if self.eat_sym("^") {
            let t = self.next();
            let n = match &t.tok {
                Tok::Num(n) => n.parse::<u32>().ok().filter(|&n| n >= 1),
                _ => None,
            };
            let n = n.ok_or_else(|| self.unexpected(&t, "a positive integer exponent"))?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn number(&self, t: &Token, text: &str) -> Result<BigRational, ParseError> {
        parse_rational(text).map_err(|_| self.error_at(t, format!("malformed number `{text}`")))
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Num(n) => Ok(Expr::Const(self.number(&t, n)?)),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Var(Var::T)),
                "s" => Ok(Expr::Var(Var::S)),
                "y" => {
                    self.expect_sym("(")?;
                    let arg = self.next();
                    match &arg.tok {
                        Tok::Ident(v) if v == "s" => {}
                        Tok::Ident(v) if v == "t" => {
                            return Err(self.error_at(
                                &arg,
                                "the unknown may appear on the right-hand side only as y(s) inside int(...)",
                            ))
                        }
                        _ => return Err(self.unexpected(&arg, "`s`")),
                    }
                    self.expect_sym(")")?;
                    Ok(Expr::Var(Var::Y))
                }
                "int" => self.integral(&t),
                other => match Func::from_name(other) {
                    Some(func) => {
                        self.expect_sym("(")?;
                        let arg = self.expr()?;
                        self.expect_sym(")")?;
                        Ok(Expr::Apply(func, Box::new(arg)))
                    }
                    None => Err(self.error_at(&t, format!("unknown identifier `{other}`"))),
                },
            },
            _ => Err(self.unexpected(&t, "an expression")),
        }
    }

    fn integral(&mut self, start: &Token) -> Result<Expr, ParseError> {
        if self.in_integral {
            return Err(self.error_at(start, "nested integrals are not supported"));
        }
        self.expect_sym("(")?;
        self.in_integral = true;
        let integrand = self.expr();
        self.in_integral = false;
        let integrand = integrand?;
        self.expect_sym(",")?;
        self.expect_ident("s")?;
        self.expect_sym("=")?;
        let negative = self.eat_sym("-");
        let t = self.next();
        let mut lower = match &t.tok {
            Tok::Num(n) => self.number(&t, n)?,
            _ => return Err(self.unexpected(&t, "a numeric lower limit")),
        };
        if negative {
            lower = -lower;
        }
        self.expect_sym("..")?;
        let upper = self.next();
        match &upper.tok {
            Tok::Ident(v) if v == "t" => {}
            _ => return Err(self.unexpected(&upper, "the upper limit `t`")),
        }
        self.expect_sym(")")?;
        Ok(Expr::Integral {
            integrand: Box::new(integrand),
            lower,
        })
    }
}

fn parser_for(text: &str) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
        in_integral: false,
    })
}

const HEADER_KEYS: [&str; 6] = ["order", "iters", "precision", "label", "backend", "reference"];

/// Splits leading header lines off; returns the header and the body with the
/// header lines blanked so positions stay valid.
fn split_header(text: &str) -> Result<(Header, String), ParseError> {
    let mut header = Header::default();
    let mut body = String::with_capacity(text.len());
    let mut in_header = true;
    for (idx, raw) in text.split_inclusive('\n').enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let entry = content.split_once(':').and_then(|(k, v)| {
            let k = k.trim();
            HEADER_KEYS.contains(&k).then(|| (k, v.trim()))
        });
        match entry {
            Some((key, value)) if in_header => {
                let bad = |what: &str| ParseError::Header {
                    line: line_no,
                    message: format!("{key}: {what} `{value}`"),
                };
                match key {
                    "order" => header.order = Some(value.parse().map_err(|_| bad("expected an integer, got"))?),
                    "iters" => header.iters = Some(value.parse().map_err(|_| bad("expected an integer, got"))?),
                    "precision" => header.precision = Some(value.parse().map_err(|_| bad("expected an integer, got"))?),
                    "label" => header.label = Some(value.to_string()),
                    "backend" => header.backend = Some(value.to_string()),
                    _ => {
                        // the reference keeps its '#'-free text; comments were stripped above
                        header.reference = Some(value.to_string());
                    }
                }
                body.push_str(&" ".repeat(raw.trim_end_matches('\n').len()));
                if raw.ends_with('\n') {
                    body.push('\n');
                }
            }
            _ => {
                if !content.is_empty() {
                    in_header = false;
                }
                body.push_str(raw);
            }
        }
    }
    Ok((header, body))
}

/// Parses a `.vie` document (optional header, then the equation) without
/// splitting the kernel.
pub fn parse_document(text: &str) -> Result<VieDocument, ParseError> {
    let (header, body) = split_header(text)?;
    let rhs = parser_for(&body)?.equation()?;
    Ok(VieDocument { header, rhs })
}

/// Parses an equation and splits it into `phi + f * int(kernel)` form.
pub fn parse(text: &str) -> Result<Equation, ParseError> {
    let doc = parse_document(text)?;
    let mut eq = split_kernel(&doc.rhs)?;
    if let Some(label) = doc.header.label {
        eq.label = label;
    }
    Ok(eq)
}

/// Parses a standalone expression such as a closed-form reference solution.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = parser_for(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rhs(text: &str) -> Expr {
        parse_document(text).unwrap().rhs
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(rhs("y(t) = 1 - t - s").to_string(), "1-t-s");
        assert_eq!(
            rhs("y(t) = 1 - t - s"),
            Expr::Sub(
                Box::new(Expr::Sub(Box::new(Expr::int(1)), Box::new(Expr::t()))),
                Box::new(Expr::s())
            )
        );
        assert_eq!(
            rhs("y(t) = -t^2"),
            Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::t()), 2)))
        );
        assert_eq!(
            rhs("y(t) = 2*-3"),
            Expr::Mul(Box::new(Expr::int(2)), Box::new(Expr::int(-3)))
        );
        assert_eq!(rhs("y(t) = 0.25"), Expr::ratio(1, 4));
    }

    #[test]
    fn integral_syntax() {
        let e = rhs("y(t) = 1 - int(sin(y(s)), s=0..t)");
        assert_eq!(e.to_string(), "1-int(sin(y(s)),s=0..t)");
        let e = rhs("y(t) = int(y(s), s=-1.5..t)");
        assert!(matches!(e, Expr::Integral { lower, .. } if lower == BigRational::new((-3).into(), 2.into())));
    }

    #[test]
    fn comments_and_headers() {
        let doc =
            parse_document("# a comment\norder: 7\niters: 8 # trailing\nlabel: demo\n\ny(t) = t # tail\n").unwrap();
        assert_eq!(doc.header.order, Some(7));
        assert_eq!(doc.header.iters, Some(8));
        assert_eq!(doc.header.label.as_deref(), Some("demo"));
        assert_eq!(doc.rhs, Expr::t());
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            parse_document("order: seven\ny(t) = 0"),
            Err(ParseError::Header { line: 1, .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("y(t) = int(") {
            Err(ParseError::Syntax { line: 1, col: 12, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse("order: 3\ny(t) = 1 +\n  * t") {
            Err(ParseError::Syntax { line: 3, col: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("y(t) = foo(t)"), Err(ParseError::Syntax { col: 8, .. })));
        assert!(matches!(parse("y(t) = t^0"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("y(t) = t $ 2"), Err(ParseError::Syntax { col: 10, .. })));
        assert!(parse("y(t) = y(t)").is_err());
        assert!(parse("y(t) = int(int(y(s), s=0..t), s=0..t)").is_err());
        assert!(parse("y(t) = int(y(s), s=0..s)").is_err());
    }

    #[test]
    fn multiple_integrals_rejected() {
        assert_eq!(
            parse("y(t) = int(y(s), s=0..t) + int(s, s=0..t)"),
            Err(ParseError::MultipleIntegrals)
        );
    }

    #[test]
    fn reference_expression() {
        let e = parse_expr("2*arccot(cot(0.5)*exp(t))").unwrap();
        assert_eq!(e.to_string(), "2*arccot(cot(0.5)*exp(t))");
        assert!(parse_expr("2 +").is_err());
    }
}
